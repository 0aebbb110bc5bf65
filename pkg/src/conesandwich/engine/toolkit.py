"""Inequality checks for the two transforms against a candidate sandwich map."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..core import (
    ExtReal,
    Point,
    ValidationError,
    ext_add,
    ext_le,
    ext_sub_finite,
    is_neg_inf,
)
from ..functionals import Functional, check_relation_additivity
from .instance import SandwichInstance, related_point_pairs
from .transforms import UNCONSTRAINED, _Unconstrained, a_transform, t_transform


@dataclass(frozen=True)
class ToolkitItem:
    name: str
    passed: bool
    violations: tuple[tuple, ...] = ()
    checked: int = 0
    note: str = ""


@dataclass(frozen=True)
class ToolkitReport:
    items: tuple[ToolkitItem, ...]

    @property
    def all_passed(self) -> bool:
        return all(it.passed for it in self.items)

    def item(self, name: str) -> ToolkitItem:
        for it in self.items:
            if it.name == name:
                return it
        raise KeyError(name)


_MAX_VIOL = 8


def _validate_q(inst: SandwichInstance, q: Functional) -> None:
    for x in inst.carrier.points():
        qx = q.evaluate(x)
        if not ext_le(inst.p.evaluate(x), qx) or not ext_le(qx, inst.h.evaluate(x)):
            raise ValidationError(f"Q outside the sandwich at {x}")
    pairs = related_point_pairs(inst.carrier, inst.relation)
    rep = check_relation_additivity(q, inst.relation, pairs, "super")
    if not rep.passed:
        raise ValidationError(
            f"Q is not superadditive on related pairs: witness {rep.witness.points}"
        )


def verify_toolkit(
    inst: SandwichInstance,
    q: Functional,
    pair_cap: int = 128,
) -> ToolkitReport:
    """Check the transform inequalities for a validated candidate Q.

    Items: (1) A_Q >= Q pointwise (where constrained) and A_Q subadditive on
    related pairs with carrier sums; (2) T_g superadditive on such pairs;
    (3) Q <= T_g(Q) everywhere, with T_g(Q) <= H asserted exactly only in
    certified mode (exploratory collects violations as diagnostics); (4) the
    self-improvement bound T_x(Q)(x) >= A_Q(x) - tol4 at the grid's largest
    scale, with the documented default tol4 = 2*|Q(x)| / lambda_max.
    """
    _validate_q(inst, q)
    pts = inst.carrier.points()
    rays = inst.carrier.rays
    rel = inst.relation

    a_at: dict[Point, object] = {x: a_transform(inst, q, x) for x in pts}

    # (1) A_Q >= Q where constrained
    viol = []
    checked = 0
    for x in pts:
        a = a_at[x]
        if isinstance(a, _Unconstrained):
            continue
        checked += 1
        if not ext_le(q.evaluate(x), a):
            viol.append((x, q.evaluate(x), a))
            if len(viol) >= _MAX_VIOL:
                break
    item1 = ToolkitItem("a_dominates_q", not viol, tuple(viol), checked)

    # pairs with sums evaluable on the carrier
    sum_pairs: list[tuple[Point, Point, Point]] = []
    for i, x in enumerate(pts):
        for y in pts[i:]:
            if not rel.relates(x, y):
                continue
            s = x + y
            if s.is_zero() or inst.carrier.locate(s) is None:
                continue
            sum_pairs.append((x, y, s))
            if len(sum_pairs) >= pair_cap:
                break
        if len(sum_pairs) >= pair_cap:
            break

    # (1b) A_Q subadditive on related pairs
    viol = []
    checked = 0
    for x, y, s in sum_pairs:
        ax, ay, asum = a_at[x], a_at[y], a_transform(inst, q, s)
        if any(isinstance(v, _Unconstrained) for v in (ax, ay, asum)):
            continue
        checked += 1
        if not ext_le(asum, ext_add(ax, ay)):
            viol.append((x, y, asum, ax, ay))
            if len(viol) >= _MAX_VIOL:
                break
    item1b = ToolkitItem("a_subadditive", not viol, tuple(viol), checked)

    # (2) T_g superadditive on related pairs
    viol = []
    checked = 0
    for g in pts:
        for x, y, s in sum_pairs:
            tx = t_transform(inst, g, q, x)
            ty = t_transform(inst, g, q, y)
            ts = t_transform(inst, g, q, s)
            checked += 1
            if not ext_le(ext_add(tx, ty), ts):
                viol.append((g, x, y, ts, tx, ty))
                if len(viol) >= _MAX_VIOL:
                    break
        if len(viol) >= _MAX_VIOL:
            break
    item2 = ToolkitItem("t_superadditive", not viol, tuple(viol), checked)

    # (3) Q <= T_g(Q) <= H
    viol_low = []
    viol_high = []
    checked = 0
    for g in pts:
        for xr, x in enumerate(rays):
            t = t_transform(inst, g, q, x)
            checked += 1
            if not ext_le(q.evaluate(x), t):
                viol_low.append((g, x, q.evaluate(x), t))
            if not ext_le(t, inst.h.evaluate(x)):
                viol_high.append((g, x, t, inst.h.evaluate(x)))
            if len(viol_low) >= _MAX_VIOL or len(viol_high) >= _MAX_VIOL:
                break
        else:
            continue
        break
    item3 = ToolkitItem("q_le_t", not viol_low, tuple(viol_low), checked)
    if inst.certified:
        item3b = ToolkitItem("t_le_h", not viol_high, tuple(viol_high), checked)
    else:
        item3b = ToolkitItem(
            "t_le_h",
            True,
            tuple(viol_high),
            checked,
            note=f"exploratory: {len(viol_high)} discretization diagnostics",
        )

    # (4) T_x(Q)(x) >= A_Q(x) - tol4
    lam_max = max(inst.effective_lambda_grid())
    viol = []
    checked = 0
    note = ""
    if lam_max == 0:
        note = "skipped: lambda grid has no positive scale"
    else:
        for x in rays:
            qx = q.evaluate(x)
            if is_neg_inf(qx):
                continue
            a = a_transform(inst, q, x)
            if isinstance(a, _Unconstrained) or is_neg_inf(a):
                continue
            checked += 1
            tol4 = 2 * abs(qx) / lam_max
            t = t_transform(inst, x, q, x)
            if not ext_le(a - tol4, t):
                viol.append((x, t, a, tol4))
                if len(viol) >= _MAX_VIOL:
                    break
    item4 = ToolkitItem("t_self_near_a", not viol, tuple(viol), checked, note)

    return ToolkitReport((item1, item1b, item2, item3, item3b, item4))
