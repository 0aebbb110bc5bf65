"""The round-robin improvement iteration and its trace."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..core import ExtReal, NEG_INF, ext_le, is_neg_inf
from ..functionals import Functional, RayTable
from . import backend as backend_mod
from .instance import SandwichInstance


class EngineInvariantError(RuntimeError):
    """A certified-mode safety invariant broke; indicates an engine bug."""


@dataclass(frozen=True)
class SweepRecord:
    index: int
    q_values: tuple[ExtReal, ...]
    max_increase: Fraction
    promotions: int
    updated: int
    sandwich_ok: bool
    majorant_violations: int


@dataclass(frozen=True)
class IterationTrace:
    records: tuple[SweepRecord, ...]
    converged: bool
    sweep_count: int
    additivity_residual: Fraction
    residual_pairs: int
    backend: str

    @property
    def final_values(self) -> tuple[ExtReal, ...]:
        return self.records[-1].q_values


def iterate_sandwich(
    inst: SandwichInstance, force_backend: Optional[str] = None
) -> tuple[RayTable, IterationTrace]:
    """Run sweeps from Q0 = P until stable (increase <= tol) or out of budget.

    Certified mode asserts P <= Q <= H exactly after every sweep; budget
    exhaustion is reported through converged=False, never an exception.
    """
    tables = inst.tables()
    q0 = list(tables.pray)
    raw = backend_mod.run(tables, q0, inst.tol, inst.max_sweeps, force_backend)

    records: list[SweepRecord] = []
    for i, snap in enumerate(raw["snapshots"]):
        lower_ok = all(
            ext_le(tables.pray[r], snap[r]) for r in range(tables.nrays)
        )
        majorant_violations = sum(
            0 if ext_le(snap[r], tables.hray[r]) else 1
            for r in range(tables.nrays)
        )
        sandwich_ok = lower_ok and majorant_violations == 0
        if inst.certified and not sandwich_ok:
            raise EngineInvariantError(
                f"sandwich bound broke at sweep {i} (certified mode)"
            )
        records.append(
            SweepRecord(
                index=i,
                q_values=snap,
                max_increase=raw["increases"][i],
                promotions=raw["flips"][i],
                updated=raw["updated"][i],
                sandwich_ok=sandwich_ok,
                majorant_violations=majorant_violations,
            )
        )

    final = records[-1].q_values if records else tuple(q0)
    qstar = RayTable.from_carrier(inst.carrier, list(final))
    residual, pairs = _residual_from_values(tables, list(final))
    trace = IterationTrace(
        records=tuple(records),
        converged=raw["converged"],
        sweep_count=len(records),
        additivity_residual=residual,
        residual_pairs=pairs,
        backend=raw["backend"],
    )
    return qstar, trace


def additivity_residual(
    inst: SandwichInstance, q: Functional
) -> tuple[Fraction, int]:
    """max |Q(x+y) - Q(x) - Q(y)| over related carrier pairs with usable sums.

    Pairs whose sum leaves the carrier rays, or where any of the three values
    is the bottom element, are skipped; zero sums use Q(0) = 0. Returns the
    residual and the number of pairs that entered the maximum. Q must be
    positively homogeneous (it is evaluated at the carrier rays only).
    """
    values = [q.evaluate(r) for r in inst.carrier.rays]
    return _residual_from_values(inst.tables(), values)


def _residual_from_values(tables, ray_values) -> tuple[Fraction, int]:
    labels = tables.labels
    best = Fraction(0)
    count = 0
    for (i, j), loc in tables.sum_locations().items():
        ri, si = labels[i]
        rj, sj = labels[j]
        qx = ray_values[ri]
        qy = ray_values[rj]
        if is_neg_inf(qx) or is_neg_inf(qy):
            continue
        if loc == "zero":
            qs: ExtReal = Fraction(0)
        elif loc is None:
            continue
        else:
            qsr = ray_values[loc[0]]
            if is_neg_inf(qsr):
                continue
            qs = loc[1] * qsr
        count += 1
        gap = abs(qs - si * qx - sj * qy)
        if gap > best:
            best = gap
    return best, count
