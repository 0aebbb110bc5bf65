"""Exact arithmetic core: extended reals, rational points, orders, carriers.

Everything here is exact. Values are `fractions.Fraction` or the adjoined
bottom element ``NEG_INF``; there is deliberately no positive infinity
(empty infima elsewhere use an engine-local sentinel instead). All types
are immutable and safe to share across threads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union


class DimensionMismatch(ValueError):
    """Two points (or a point and a structure) disagree on dimension."""


class RayBudgetExceeded(RuntimeError):
    """Carrier closure tried to grow past the configured ray cap."""


class ValidationError(ValueError):
    """An instance or functional failed a declared precondition."""


class _NegInf:
    """The adjoined bottom element, below every rational."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "-inf"

    def __reduce__(self):
        return (_neg_inf_instance, ())


NEG_INF = _NegInf()


def _neg_inf_instance() -> _NegInf:
    return NEG_INF


#: An extended real is an exact rational or NEG_INF.
ExtReal = Union[Fraction, _NegInf]

RationalLike = Union[int, str, Fraction]


def as_fraction(value: RationalLike) -> Fraction:
    """Coerce ints, Fractions, and "p/q" strings to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational value")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


def is_neg_inf(a: ExtReal) -> bool:
    return a is NEG_INF


def ext_add(a: ExtReal, b: ExtReal) -> ExtReal:
    """Total addition: NEG_INF absorbs, finite values add exactly."""
    if a is NEG_INF or b is NEG_INF:
        return NEG_INF
    return a + b


def ext_sub_finite(a: ExtReal, b: Fraction) -> ExtReal:
    """a - b for finite b (the only subtraction the engine needs)."""
    if isinstance(b, _NegInf):
        raise ValueError("subtrahend must be finite")
    if a is NEG_INF:
        return NEG_INF
    return a - b


def ext_scale(lam: RationalLike, a: ExtReal) -> ExtReal:
    """Scale by a nonnegative rational; 0 * NEG_INF = 0 by convention."""
    lam = as_fraction(lam)
    if lam < 0:
        raise ValueError(f"negative scale {lam} not allowed")
    if lam == 0:
        return Fraction(0)
    if a is NEG_INF:
        return NEG_INF
    return lam * a


def ext_le(a: ExtReal, b: ExtReal) -> bool:
    if a is NEG_INF:
        return True
    if b is NEG_INF:
        return False
    return a <= b


def ext_lt(a: ExtReal, b: ExtReal) -> bool:
    return ext_le(a, b) and not ext_eq(a, b)


def ext_eq(a: ExtReal, b: ExtReal) -> bool:
    if a is NEG_INF or b is NEG_INF:
        return a is b
    return a == b


def ext_min(a: ExtReal, b: ExtReal) -> ExtReal:
    return a if ext_le(a, b) else b


def ext_max(a: ExtReal, b: ExtReal) -> ExtReal:
    return b if ext_le(a, b) else a


def ext_to_str(a: ExtReal) -> str:
    """Serialize as "p/q" (or "p"), with "-inf" for the bottom element."""
    if a is NEG_INF:
        return "-inf"
    return str(a)


def ext_from_str(text: str) -> ExtReal:
    if text.strip() == "-inf":
        return NEG_INF
    return Fraction(text)


@dataclass(frozen=True)
class Point:
    """A point of the ambient rational vector space."""

    coords: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.coords) < 1:
            raise ValueError("points need dimension >= 1")
        object.__setattr__(self, "coords", tuple(as_fraction(c) for c in self.coords))

    @property
    def dimension(self) -> int:
        return len(self.coords)

    def __add__(self, other: "Point") -> "Point":
        self._check_dim(other)
        return Point(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Point":
        return Point(tuple(-a for a in self.coords))

    def __sub__(self, other: "Point") -> "Point":
        return self + (-other)

    def scale(self, lam: RationalLike) -> "Point":
        lam = as_fraction(lam)
        return Point(tuple(lam * a for a in self.coords))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def dot(self, other: "Point") -> Fraction:
        self._check_dim(other)
        return sum((a * b for a, b in zip(self.coords, other.coords)), Fraction(0))

    def _check_dim(self, other: "Point") -> None:
        if self.dimension != other.dimension:
            raise DimensionMismatch(
                f"dimension mismatch: {self.dimension} vs {other.dimension}"
            )

    def sort_key(self) -> tuple[Fraction, ...]:
        return self.coords

    def __repr__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


def point(*coords: RationalLike) -> Point:
    """Convenience constructor: point(1, "1/2") -> Point((1, 1/2))."""
    return Point(tuple(as_fraction(c) for c in coords))


def zero_point(dimension: int) -> Point:
    return Point((Fraction(0),) * dimension)


@dataclass(frozen=True)
class OrderSpec:
    """The partial order on the ambient space; componentwise is the only kind."""

    dimension: int
    kind: str = "componentwise"

    def __post_init__(self) -> None:
        if self.kind != "componentwise":
            raise ValidationError(f"unknown order kind {self.kind!r}")


def leq_order(x: Point, y: Point, order: OrderSpec) -> bool:
    """x <= y in the componentwise order."""
    x._check_dim(y)
    if x.dimension != order.dimension:
        raise DimensionMismatch(
            f"order is on dimension {order.dimension}, points have {x.dimension}"
        )
    return all(a <= b for a, b in zip(x.coords, y.coords))


def normalize_ray(p: Point) -> tuple[Point, Fraction]:
    """Canonical representative of the ray through p.

    Divides by the sum of absolute coordinate values, which is exact in Q.
    Returns (unit, scale) with p = unit.scale(scale) and scale > 0.
    """
    if p.is_zero():
        raise ValueError("the zero vector spans no ray")
    scale = sum((abs(c) for c in p.coords), Fraction(0))
    return p.scale(Fraction(1) / scale), scale


@dataclass(frozen=True)
class Carrier:
    """A finite discretization of the cone: unit rays times a scale grid.

    Rays are stored normalized (sum of |coords| equal to 1), pairwise
    non-proportional, sorted lexicographically. ``rounds_applied`` records
    how many closure rounds have already been run, so closing a carrier is
    idempotent at its fixed depth.
    """

    dimension: int
    rays: tuple[Point, ...]
    scales: tuple[Fraction, ...]
    closure_depth: int = 2
    ray_cap: int = 4096
    rounds_applied: int = 0

    @classmethod
    def build(
        cls,
        rays: Iterable[Point],
        scales: Sequence[RationalLike] = (1,),
        closure_depth: int = 2,
        ray_cap: int = 4096,
    ) -> "Carrier":
        ray_list = list(rays)
        if not ray_list:
            raise ValidationError("carrier needs at least one ray")
        dim = ray_list[0].dimension
        units: list[Point] = []
        seen: set[tuple[Fraction, ...]] = set()
        for r in ray_list:
            if r.dimension != dim:
                raise DimensionMismatch("carrier rays must share a dimension")
            unit, _ = normalize_ray(r)
            if unit.coords not in seen:
                seen.add(unit.coords)
                units.append(unit)
        units.sort(key=Point.sort_key)
        scale_vals = sorted({as_fraction(s) for s in scales})
        if any(s <= 0 for s in scale_vals):
            raise ValidationError("carrier scales must be positive")
        if Fraction(1) not in scale_vals:
            raise ValidationError("carrier scale grid must contain 1")
        if closure_depth < 0:
            raise ValidationError("closure_depth must be >= 0")
        if len(units) > ray_cap:
            raise RayBudgetExceeded(
                f"{len(units)} rays exceed the ray cap of {ray_cap}"
            )
        return cls(
            dimension=dim,
            rays=tuple(units),
            scales=tuple(scale_vals),
            closure_depth=closure_depth,
            ray_cap=ray_cap,
        )

    def ray_index(self) -> dict[tuple[Fraction, ...], int]:
        cached = getattr(self, "_ray_idx", None)
        if cached is None:
            cached = {r.coords: i for i, r in enumerate(self.rays)}
            object.__setattr__(self, "_ray_idx", cached)
        return cached

    def points(self) -> tuple[Point, ...]:
        """All carrier points, ray-major, scales ascending."""
        return tuple(
            r.scale(s) for r in self.rays for s in self.scales
        )

    def point_labels(self) -> tuple[tuple[int, Fraction], ...]:
        """(ray index, scale) for each entry of points(), same order."""
        return tuple(
            (i, s) for i in range(len(self.rays)) for s in self.scales
        )

    def locate(self, p: Point) -> tuple[int, Fraction] | None:
        """(ray index, scale) if p lies on a stored ray, else None."""
        if p.dimension != self.dimension:
            raise DimensionMismatch("point dimension differs from carrier")
        if p.is_zero():
            return None
        unit, scale = normalize_ray(p)
        idx = self.ray_index().get(unit.coords)
        if idx is None:
            return None
        return idx, scale

    def same_rays(self, other: "Carrier") -> bool:
        return set(r.coords for r in self.rays) == set(r.coords for r in other.rays)


def close_carrier(carrier: Carrier, relation) -> Carrier:
    """Add normalized sum-rays for related ray pairs, one round per depth unit.

    ``relation`` is anything with a ``relates(x, y) -> bool`` method. A second
    call on the result is a no-op: the remaining round budget is
    ``closure_depth - rounds_applied``. Zero sums (antipodal related rays) are
    skipped since they span no ray. Raises RayBudgetExceeded past the cap.
    """
    rounds = carrier.closure_depth - carrier.rounds_applied
    rays = list(carrier.rays)
    seen = set(r.coords for r in rays)
    for _ in range(max(rounds, 0)):
        snapshot = list(rays)
        added = False
        for a, b in itertools.combinations_with_replacement(snapshot, 2):
            if not (relation.relates(a, b) or relation.relates(b, a)):
                continue
            s = a + b
            if s.is_zero():
                continue
            unit, _ = normalize_ray(s)
            if unit.coords in seen:
                continue
            if len(rays) + 1 > carrier.ray_cap:
                raise RayBudgetExceeded(
                    f"carrier closure exceeded the ray cap of {carrier.ray_cap}"
                )
            seen.add(unit.coords)
            rays.append(unit)
            added = True
        if not added:
            break
    rays.sort(key=Point.sort_key)
    return Carrier(
        dimension=carrier.dimension,
        rays=tuple(rays),
        scales=carrier.scales,
        closure_depth=carrier.closure_depth,
        ray_cap=carrier.ray_cap,
        rounds_applied=carrier.closure_depth,
    )
