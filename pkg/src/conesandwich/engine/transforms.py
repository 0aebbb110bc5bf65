"""Reference (table-free) implementations of the two improvement transforms.

These enumerate candidates directly from the instance and are the semantic
contract that both sweep backends must reproduce; the test suite holds the
backends to exact agreement with what repeated application of these maps
computes.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

from ..core import (
    ExtReal,
    NEG_INF,
    Point,
    ext_add,
    ext_le,
    ext_max,
    ext_min,
    ext_scale,
    ext_sub_finite,
    is_neg_inf,
    leq_order,
    zero_point,
)
from ..functionals import Functional, RayLookupError
from .instance import SandwichInstance


class _Unconstrained:
    """Sentinel for an empty infimum; deliberately not an extended real."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "UNCONSTRAINED"


UNCONSTRAINED = _Unconstrained()

AValue = Union[ExtReal, _Unconstrained]


def zero_admissible(inst: SandwichInstance) -> bool:
    """Whether the zero vector may join the candidate pools with Q(0) = 0.

    Requires P(0) <= 0 <= H(0), so that the structural value 0 of every ray
    table at the zero vector stays inside the sandwich there.
    """
    zero = zero_point(inst.carrier.dimension)
    return ext_le(inst.p.evaluate(zero), Fraction(0)) and ext_le(
        Fraction(0), inst.h.evaluate(zero)
    )


def _require_on_ray(inst: SandwichInstance, x: Point, label: str) -> None:
    if inst.carrier.locate(x) is None:
        raise RayLookupError(f"{label} not on a carrier ray: {x}")


def _candidate_ys(inst: SandwichInstance) -> Iterable[Point]:
    yield from inst.carrier.points()
    if zero_admissible(inst):
        yield zero_point(inst.carrier.dimension)


def a_transform(inst: SandwichInstance, q: Functional, x: Point) -> AValue:
    """inf of H(x+y) - Q(y) over related y with finite Q, on the carrier.

    Returns UNCONSTRAINED when no eligible y exists. The zero vector joins
    the index set (value H(x)) whenever it is admissible and relates to x.
    """
    _require_on_ray(inst, x, "x")
    best: AValue = UNCONSTRAINED
    for y in _candidate_ys(inst):
        if not inst.relation.relates(y, x):
            continue
        qy = q.evaluate(y)
        if is_neg_inf(qy):
            continue
        v = ext_sub_finite(inst.h.evaluate(x + y), qy)
        best = v if isinstance(best, _Unconstrained) else ext_min(best, v)
    return best


def _certified_ok(
    inst: SandwichInstance, h: Point, lam: Fraction, g: Point
) -> bool:
    """Certificate eligibility of a lam > 0 pair: h/lam indexes A_Q(g).

    The witness y = h/lam must be a carrier point (or the admissible zero
    vector) relating to g, which is what makes the term's upper bound by
    H(x) provable from subexpressions the engine actually computed.
    """
    if h.is_zero():
        return inst.relation.relates(h, g)
    y = h.scale(Fraction(1) / lam)
    loc = inst.carrier.locate(y)
    if loc is None or loc[1] not in inst.carrier.scales:
        return False
    return inst.relation.relates(y, g)


def t_transform(
    inst: SandwichInstance, g: Point, q: Functional, x: Point
) -> ExtReal:
    """sup of Q(h) + lam*A_Q(g) over related h below x in the vector order.

    Feasibility: h relates to x and h + lam*g <= x componentwise, lam from
    the instance grid (integers 0..n_max in summand mode). lam > 0 terms are
    skipped when A_Q(g) is unconstrained, and in certified mode they must
    additionally pass the certificate eligibility check. The supremum of an
    empty candidate set is the bottom element.
    """
    _require_on_ray(inst, g, "g")
    _require_on_ray(inst, x, "x")
    a_val = a_transform(inst, q, g)
    lams = inst.effective_lambda_grid()
    best: ExtReal = NEG_INF
    for h in _candidate_ys(inst):
        if not inst.relation.relates(h, x):
            continue
        qh = q.evaluate(h)
        for lam in lams:
            if lam == 0:
                if leq_order(h, x, inst.order):
                    best = ext_max(best, qh)
                continue
            if isinstance(a_val, _Unconstrained):
                continue
            if not leq_order(h + g.scale(lam), x, inst.order):
                continue
            if inst.certified and not _certified_ok(inst, h, lam, g):
                continue
            best = ext_max(best, ext_add(qh, ext_scale(lam, a_val)))
    return best
