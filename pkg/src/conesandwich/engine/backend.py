"""Backend selection: compiled sweep kernel when importable, else pure Python.

Set CONESANDWICH_PURE=1 before import to force the pure backend. A kernel
OverflowError (values outside int64 range) silently falls back to pure for
that run; results are identical either way.
"""

from __future__ import annotations

import os
from fractions import Fraction

from ..core import ExtReal, NEG_INF, is_neg_inf
from . import sweep_pure

_kernel = None
_kernel_status = "unavailable"
if os.environ.get("CONESANDWICH_PURE", "0") not in ("1", "true", "yes"):
    try:
        from .. import _sweep as _kernel  # type: ignore[attr-defined]

        _kernel_status = "loaded"
    except ImportError as exc:  # pragma: no cover - depends on build
        _kernel = None
        _kernel_status = f"import failed: {exc}"
else:
    _kernel_status = "disabled via CONESANDWICH_PURE"


def kernel_available() -> bool:
    return _kernel is not None


def active_backend() -> str:
    return "kernel" if _kernel is not None else "pure"


def backend_status() -> str:
    return _kernel_status


def _encode(v: ExtReal) -> tuple[int, int]:
    if is_neg_inf(v):
        return (-1, 0)
    return (v.numerator, v.denominator)


def _decode(pair: tuple[int, int]) -> ExtReal:
    num, den = pair
    if den == 0:
        return NEG_INF
    return Fraction(num, den)


def run(
    tables,
    q0: list[ExtReal],
    tol: Fraction,
    max_sweeps: int,
    force_backend: str | None = None,
) -> dict:
    """Dispatch the sweep loop; output format is backend independent."""
    choice = force_backend or active_backend()
    if choice == "kernel":
        if _kernel is None:
            raise RuntimeError("compiled kernel requested but not available")
        try:
            payload = tables.kernel_payload()
            q0_num = []
            q0_den = []
            for v in q0:
                a, b = _encode(v)
                q0_num.append(a)
                q0_den.append(b)
            raw = _kernel.run_sweeps(
                payload, q0_num, q0_den, tol.numerator, tol.denominator, max_sweeps
            )
        except OverflowError:
            return sweep_pure.run_sweeps(tables, q0, tol, max_sweeps)
        raw["snapshots"] = [
            tuple(_decode(pair) for pair in snap) for snap in raw["snapshots"]
        ]
        raw["increases"] = [Fraction(n, d) for n, d in raw["increases"]]
        return raw
    return sweep_pure.run_sweeps(tables, q0, tol, max_sweeps)
