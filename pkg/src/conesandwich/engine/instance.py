"""Sandwich instances: the engine's validated unit of work."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from ..core import (
    Carrier,
    OrderSpec,
    Point,
    RationalLike,
    ValidationError,
    as_fraction,
    close_carrier,
    ext_add,
    ext_le,
    ext_scale,
    is_neg_inf,
    leq_order,
    zero_point,
)
from ..functionals import Functional
from ..relations import RelationSpec

MODES = ("conic", "summand")
FEASIBILITY_MODES = ("certified", "exploratory")


@dataclass
class SandwichInstance:
    """Carrier, relation, minorant P, majorant H, order, grids and budgets.

    Instances are validated at construction: P <= H on the carrier, H
    monotone and subadditive on related pairs, P superadditive on related
    pairs. The carrier is closed for the configured depth so that sums of
    related pairs are evaluable.
    """

    carrier: Carrier
    relation: RelationSpec
    p: Functional
    h: Functional
    order: OrderSpec
    lambda_grid: tuple[Fraction, ...]
    mode: str = "conic"
    n_max: Optional[int] = None
    feasibility_mode: str = "certified"
    tol: Fraction = Fraction(0)
    max_sweeps: int = 32
    name: str = "instance"
    _tables: object = field(default=None, repr=False, compare=False)

    @property
    def certified(self) -> bool:
        return self.feasibility_mode == "certified"

    def effective_lambda_grid(self) -> tuple[Fraction, ...]:
        if self.mode == "summand":
            return tuple(Fraction(k) for k in range(self.n_max + 1))
        return self.lambda_grid

    def tables(self):
        if self._tables is None:
            from .tables import SweepTables

            self._tables = SweepTables.build(self)
        return self._tables

    def with_minorant(
        self, p: Functional, name: Optional[str] = None, validate: bool = True
    ) -> "SandwichInstance":
        """A sibling instance sharing all geometry, with a different P.

        Only the P-dependent hypotheses are re-validated; the H-side checks
        were already enforced on this instance.
        """
        clone = SandwichInstance(
            carrier=self.carrier,
            relation=self.relation,
            p=p,
            h=self.h,
            order=self.order,
            lambda_grid=self.lambda_grid,
            mode=self.mode,
            n_max=self.n_max,
            feasibility_mode=self.feasibility_mode,
            tol=self.tol,
            max_sweeps=self.max_sweeps,
            name=name or self.name,
        )
        clone._tables = self.tables().with_minorant(p)
        if validate:
            validate_instance(clone, minorant_only=True)
        return clone


def related_point_pairs(
    carrier: Carrier, relation: RelationSpec
) -> list[tuple[Point, Point]]:
    pts = carrier.points()
    return [(x, y) for x in pts for y in pts if relation.relates(x, y)]


def make_instance(
    carrier: Carrier,
    relation: RelationSpec,
    p: Functional,
    h: Functional,
    order: Optional[OrderSpec] = None,
    lambda_grid: Sequence[RationalLike] = (0, 1),
    mode: str = "conic",
    n_max: Optional[int] = None,
    feasibility_mode: str = "certified",
    tol: RationalLike = 0,
    max_sweeps: int = 32,
    name: str = "instance",
    validate: bool = True,
) -> SandwichInstance:
    """Close the carrier, validate the hypotheses, and build the instance."""
    if mode not in MODES:
        raise ValidationError(f"unknown mode {mode!r}")
    if feasibility_mode not in FEASIBILITY_MODES:
        raise ValidationError(f"unknown feasibility mode {feasibility_mode!r}")
    if mode == "summand":
        if n_max is None or n_max < 1:
            raise ValidationError("summand mode needs n_max >= 1")
    order = order or OrderSpec(carrier.dimension)
    if order.dimension != carrier.dimension:
        raise ValidationError("order dimension differs from carrier dimension")
    grid = tuple(sorted({as_fraction(v) for v in lambda_grid}))
    if any(v < 0 for v in grid):
        raise ValidationError("lambda grid entries must be nonnegative")
    if Fraction(0) not in grid:
        raise ValidationError("lambda grid must contain 0")
    tol = as_fraction(tol)
    if tol < 0:
        raise ValidationError("tol must be nonnegative")
    if max_sweeps < 1:
        raise ValidationError("max_sweeps must be >= 1")

    closed = close_carrier(carrier, relation)
    inst = SandwichInstance(
        carrier=closed,
        relation=relation,
        p=p,
        h=h,
        order=order,
        lambda_grid=grid,
        mode=mode,
        n_max=n_max,
        feasibility_mode=feasibility_mode,
        tol=tol,
        max_sweeps=max_sweeps,
        name=name,
    )
    if validate:
        validate_instance(inst)
    return inst


def validate_instance(inst: SandwichInstance, minorant_only: bool = False) -> None:
    """Enforce the hypotheses; raises ValidationError with a witness.

    Uses the instance's precomputed tables so repeated validation (envelope
    members differing only in P) stays cheap; ``minorant_only`` skips the
    H-side checks, which do not depend on P.
    """
    if inst.p.dimension != inst.carrier.dimension:
        raise ValidationError("P dimension differs from carrier")
    if inst.h.dimension != inst.carrier.dimension:
        raise ValidationError("H dimension differs from carrier")
    tables = inst.tables()
    pts = tables.points
    npoints = tables.npoints
    ppt = [
        ext_scale(tables.labels[i][1], tables.pray[tables.labels[i][0]])
        for i in range(npoints)
    ]

    for i in range(npoints):
        if not ext_le(ppt[i], tables.hpt[i]):
            raise ValidationError(
                f"P > H at carrier point {pts[i]}: P={ppt[i]}, H={tables.hpt[i]}"
            )

    if not minorant_only:
        for i in range(npoints):
            for j in range(npoints):
                if i == j or not leq_order(pts[i], pts[j], inst.order):
                    continue
                if not ext_le(tables.hpt[i], tables.hpt[j]):
                    raise ValidationError(
                        f"H is not monotone: witness ({pts[i]}, {pts[j]})"
                    )
        for i in range(npoints):
            for j in range(npoints):
                if not tables.rel[i][j]:
                    continue
                lhs = tables.hsum[i][j]
                rhs = ext_add(tables.hpt[i], tables.hpt[j])
                if not ext_le(lhs, rhs):
                    raise ValidationError(
                        f"H is not subadditive on related pairs: "
                        f"witness ({pts[i]}, {pts[j]})"
                    )

    # superadditivity with a bottom side holds by absorption; only pairs
    # with both P values finite need the evaluation at the sum
    for i in range(npoints):
        if is_neg_inf(ppt[i]):
            continue
        for j in range(npoints):
            if not tables.rel[i][j] or is_neg_inf(ppt[j]):
                continue
            lhs = inst.p.evaluate(pts[i] + pts[j])
            if not ext_le(ppt[i] + ppt[j], lhs):
                raise ValidationError(
                    f"P is not superadditive on related pairs: "
                    f"witness ({pts[i]}, {pts[j]})"
                )
