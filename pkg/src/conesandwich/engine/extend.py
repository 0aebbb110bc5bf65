"""Extension of partial linear functionals and the envelope construction."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..core import ExtReal, Point, ValidationError, ext_eq, ext_le, is_neg_inf
from ..functionals import (
    ConeDomain,
    Functional,
    RayTable,
    check_relation_additivity,
    extend_minus_infinity,
    ray_functional,
)
from .instance import SandwichInstance
from .iterate import IterationTrace, iterate_sandwich


@dataclass(frozen=True)
class ExtendReport:
    restriction_ok: bool
    bound_ok: bool
    restriction_violations: tuple[tuple[Point, ExtReal, ExtReal], ...]
    bound_violations: tuple[tuple[Point, ExtReal, ExtReal], ...]
    trace: IterationTrace

    @property
    def passed(self) -> bool:
        return self.restriction_ok and self.bound_ok


def extend_functional(
    inst: SandwichInstance,
    ell: Functional,
    domain: ConeDomain,
    force_backend: Optional[str] = None,
) -> tuple[RayTable, ExtendReport]:
    """Extend ell (additive on its subcone, below H there) to the carrier.

    Builds the bottom-extension of ell as minorant, iterates, and verifies
    ell <= Q* on the subcone and Q* <= H on the carrier. Precondition
    failures raise ValidationError with a witness.
    """
    y_points = [p for p in inst.carrier.points() if domain(p)]
    if not y_points:
        raise ValidationError("the domain meets no carrier point")
    for p in y_points:
        if not ext_le(ell.evaluate(p), inst.h.evaluate(p)):
            raise ValidationError(
                f"ell exceeds H on the domain at {p}: "
                f"ell={ell.evaluate(p)}, H={inst.h.evaluate(p)}"
            )
    pairs = [
        (x, y)
        for x in y_points
        for y in y_points
        if domain(x + y) or not (x + y).is_zero()
    ]
    pairs = [(x, y) for x, y in pairs if domain(x + y)]
    additive = check_relation_additivity(ell, inst.relation, pairs, "exact")
    if not additive.passed:
        raise ValidationError(
            f"ell is not additive on related domain pairs: witness "
            f"{additive.witness.points}"
        )

    p_ext = extend_minus_infinity(ell, domain)
    sub = inst.with_minorant(p_ext, name=f"{inst.name}:extension")
    qstar, trace = iterate_sandwich(sub, force_backend=force_backend)

    restriction_violations = []
    for p in y_points:
        if not ext_le(ell.evaluate(p), qstar.evaluate(p)):
            restriction_violations.append((p, ell.evaluate(p), qstar.evaluate(p)))
    bound_violations = []
    for r in inst.carrier.rays:
        if not ext_le(qstar.evaluate(r), inst.h.evaluate(r)):
            bound_violations.append((r, qstar.evaluate(r), inst.h.evaluate(r)))
    report = ExtendReport(
        restriction_ok=not restriction_violations,
        bound_ok=not bound_violations,
        restriction_violations=tuple(restriction_violations),
        bound_violations=tuple(bound_violations),
        trace=trace,
    )
    return qstar, report


@dataclass(frozen=True)
class RayEnvelopeResult:
    ray: Point
    h_value: ExtReal
    q_value: Optional[ExtReal]
    attained: bool
    bound_ok: bool
    converged: bool
    error: str = ""


@dataclass(frozen=True)
class EnvelopeReport:
    per_ray: tuple[RayEnvelopeResult, ...]
    family_attains_h: bool
    skipped_bottom_rays: int

    @property
    def passed(self) -> bool:
        return self.family_attains_h and all(
            r.attained and r.bound_ok for r in self.per_ray if not r.error
        ) and not any(r.error for r in self.per_ray)


def envelope(
    inst: SandwichInstance, force_backend: Optional[str] = None
) -> tuple[list[RayTable], EnvelopeReport]:
    """Per-ray extensions whose pointwise maximum recovers H on the carrier.

    For each carrier ray with finite H value, the one-ray functional with
    value H(x) at x is extended; the squeeze pins Q_x(x) = H(x). Per-ray
    failures are collected in the report, not raised.
    """
    members: list[RayTable] = []
    results: list[RayEnvelopeResult] = []
    skipped = 0
    for ray in inst.carrier.rays:
        h_val = inst.h.evaluate(ray)
        if is_neg_inf(h_val):
            skipped += 1
            continue
        try:
            ell = ray_functional(ray, inst.h)
            q, rep = extend_functional(
                inst, ell, ConeDomain.of_ray(ray), force_backend=force_backend
            )
        except ValidationError as exc:
            results.append(
                RayEnvelopeResult(
                    ray, h_val, None, False, False, False, error=str(exc)
                )
            )
            continue
        q_val = q.evaluate(ray)
        results.append(
            RayEnvelopeResult(
                ray=ray,
                h_value=h_val,
                q_value=q_val,
                attained=ext_eq(q_val, h_val),
                bound_ok=rep.bound_ok,
                converged=rep.trace.converged,
            )
        )
        members.append(q)

    family_ok = True
    for r_idx, ray in enumerate(inst.carrier.rays):
        h_val = inst.h.evaluate(ray)
        if is_neg_inf(h_val):
            continue
        best: Optional[ExtReal] = None
        for m in members:
            v = m.evaluate(ray)
            if best is None or ext_le(best, v):
                best = v
        if best is None or not ext_eq(best, h_val):
            family_ok = False
            break
    report = EnvelopeReport(
        per_ray=tuple(results),
        family_attains_h=family_ok,
        skipped_bottom_rays=skipped,
    )
    return members, report
