"""Positively homogeneous extended-real functionals and their property checks.

Every built-in form evaluates exactly over rational points and is positively
homogeneous by construction; ray tables extend homogeneously along each
stored ray, and the minus-infinity extension is the standard device that
turns a partial map on a subcone into a superadditive total one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .capacities import Capacity, choquet_value
from .core import (
    Carrier,
    DimensionMismatch,
    ExtReal,
    NEG_INF,
    OrderSpec,
    Point,
    RationalLike,
    ValidationError,
    as_fraction,
    ext_add,
    ext_eq,
    ext_le,
    ext_scale,
    is_neg_inf,
    leq_order,
)
from .relations import RelationSpec, on_same_ray


class RayLookupError(KeyError):
    """A ray table was queried off its stored rays."""


class Functional:
    """Base class; subclasses implement exact evaluation."""

    form: str = "abstract"

    def __init__(self, dimension: int):
        self.dimension = dimension

    def evaluate(self, x: Point) -> ExtReal:
        raise NotImplementedError

    def __call__(self, x: Point) -> ExtReal:
        return self.evaluate(x)

    def _check(self, x: Point) -> None:
        if x.dimension != self.dimension:
            raise DimensionMismatch(
                f"functional on dimension {self.dimension}, point has {x.dimension}"
            )

    def describe(self) -> str:
        return f"{self.form}(dim={self.dimension})"

    def __repr__(self) -> str:
        return self.describe()


def evaluate(f: Functional, x: Point) -> ExtReal:
    return f.evaluate(x)


class Linear(Functional):
    form = "linear"

    def __init__(self, weights: Sequence[RationalLike]):
        super().__init__(len(weights))
        self.weights = tuple(as_fraction(w) for w in weights)

    def evaluate(self, x: Point) -> ExtReal:
        self._check(x)
        return sum(
            (w * c for w, c in zip(self.weights, x.coords)), Fraction(0)
        )


class MaxOf(Functional):
    """Pointwise maximum of finitely many functionals (rows usually linear)."""

    form = "max"

    def __init__(self, members: Sequence[Functional]):
        if not members:
            raise ValidationError("max needs at least one member")
        super().__init__(members[0].dimension)
        if any(m.dimension != self.dimension for m in members):
            raise DimensionMismatch("max members must share a dimension")
        self.members = tuple(members)

    def evaluate(self, x: Point) -> ExtReal:
        self._check(x)
        best: ExtReal = NEG_INF
        for m in self.members:
            v = m.evaluate(x)
            if ext_le(best, v):
                best = v
        return best


class MinOf(Functional):
    """Pointwise minimum of finitely many functionals."""

    form = "min"

    def __init__(self, members: Sequence[Functional]):
        if not members:
            raise ValidationError("min needs at least one member")
        super().__init__(members[0].dimension)
        if any(m.dimension != self.dimension for m in members):
            raise DimensionMismatch("min members must share a dimension")
        self.members = tuple(members)

    def evaluate(self, x: Point) -> ExtReal:
        self._check(x)
        values = [m.evaluate(x) for m in self.members]
        best = values[0]
        for v in values[1:]:
            if ext_le(v, best):
                best = v
        return best


class Choquet(Functional):
    form = "choquet"

    def __init__(self, capacity: Capacity):
        super().__init__(capacity.ground)
        self.capacity = capacity

    def evaluate(self, x: Point) -> ExtReal:
        self._check(x)
        return choquet_value(x, self.capacity)


class ScaleOf(Functional):
    form = "scale"

    def __init__(self, c: RationalLike, inner: Functional):
        super().__init__(inner.dimension)
        self.c = as_fraction(c)
        if self.c <= 0:
            raise ValidationError("scale factor must be positive")
        self.inner = inner

    def evaluate(self, x: Point) -> ExtReal:
        return ext_scale(self.c, self.inner.evaluate(x))


class RayTable(Functional):
    """Values pinned at stored rays, extended homogeneously along each ray.

    Lookup prefers an exact coordinate match, then the first stored entry
    proportional to the query (scaled accordingly); the zero vector always
    evaluates to 0. Deliberately inconsistent tables (two proportional
    entries with incompatible values) are representable, which is what lets
    the homogeneity checker exhibit a violation witness.
    """

    form = "ray_table"

    def __init__(self, entries: Sequence[tuple[Point, ExtReal]], dimension: int):
        super().__init__(dimension)
        for p, _ in entries:
            if p.dimension != dimension:
                raise DimensionMismatch("ray table entry dimension differs")
            if p.is_zero():
                raise ValidationError("the zero vector cannot key a ray table")
        self.entries = tuple(entries)
        self._exact: dict[tuple[Fraction, ...], ExtReal] = {}
        for p, v in entries:
            self._exact.setdefault(p.coords, v)

    @classmethod
    def from_carrier(cls, carrier: Carrier, values: Sequence[ExtReal]) -> "RayTable":
        if len(values) != len(carrier.rays):
            raise ValidationError("one value per carrier ray required")
        return cls(tuple(zip(carrier.rays, values)), carrier.dimension)

    def evaluate(self, x: Point) -> ExtReal:
        self._check(x)
        if x.is_zero():
            return Fraction(0)
        hit = self._exact.get(x.coords)
        if hit is not None:
            return hit
        for p, v in self.entries:
            if on_same_ray(x, p):
                t = next(
                    a / b for a, b in zip(x.coords, p.coords) if b != 0
                )
                return ext_scale(t, v)
        raise RayLookupError(f"ray not in carrier: {x}")


class ConeDomain:
    """Membership test for a subcone, serializable by kind.

    Kinds: "all" (the whole space), "ray" (positive multiples of a fixed
    point), "predicate" (opaque callable, not serializable).
    """

    def __init__(
        self,
        kind: str,
        ray: Optional[Point] = None,
        predicate: Optional[Callable[[Point], bool]] = None,
    ):
        if kind not in ("all", "ray", "predicate"):
            raise ValidationError(f"unknown cone domain kind {kind!r}")
        if kind == "ray" and ray is None:
            raise ValidationError("ray domain needs a generating point")
        if kind == "predicate" and predicate is None:
            raise ValidationError("predicate domain needs a callable")
        self.kind = kind
        self.ray = ray
        self.predicate = predicate

    @classmethod
    def whole_space(cls) -> "ConeDomain":
        return cls("all")

    @classmethod
    def of_ray(cls, generator: Point) -> "ConeDomain":
        if generator.is_zero():
            raise ValidationError("ray domain generator must be nonzero")
        return cls("ray", ray=generator)

    def __call__(self, x: Point) -> bool:
        if self.kind == "all":
            return True
        if self.kind == "ray":
            return on_same_ray(x, self.ray)
        return bool(self.predicate(x))


class MinusInfExtension(Functional):
    """Equal to the inner functional on its domain, bottom elsewhere."""

    form = "minus_inf_extension"

    def __init__(self, inner: Functional, domain: ConeDomain):
        super().__init__(inner.dimension)
        self.inner = inner
        self.domain = domain

    def evaluate(self, x: Point) -> ExtReal:
        self._check(x)
        if self.domain(x):
            return self.inner.evaluate(x)
        return NEG_INF


class RayFunctional(Functional):
    """The linear-on-one-ray functional ell(t*x) = t*H(x), defined on C_x."""

    form = "ray_functional"

    def __init__(self, base: Point, base_value: Fraction):
        super().__init__(base.dimension)
        if base.is_zero():
            raise ValidationError("ray functional needs a nonzero base point")
        self.base = base
        self.base_value = base_value

    def evaluate(self, x: Point) -> ExtReal:
        self._check(x)
        if not on_same_ray(x, self.base):
            raise RayLookupError(f"{x} is outside the generating ray of {self.base}")
        t = next(
            a / b for a, b in zip(x.coords, self.base.coords) if b != 0
        )
        return t * self.base_value


def ray_functional(x: Point, h: Functional) -> RayFunctional:
    """ell on C_x with ell(t*x) = t*H(x); undefined when H(x) is bottom."""
    hx = h.evaluate(x)
    if is_neg_inf(hx):
        raise ValidationError(f"H({x}) is -inf, the ray functional is undefined")
    return RayFunctional(x, hx)


def extend_minus_infinity(ell: Functional, domain: ConeDomain) -> MinusInfExtension:
    """Extend ell by -inf off its domain (the superadditive anchor P)."""
    return MinusInfExtension(ell, domain)


@dataclass(frozen=True)
class Violation:
    points: tuple[Point, ...]
    residual: Optional[Fraction]
    note: str = ""


@dataclass(frozen=True)
class FunctionalReport:
    functional: str
    property_name: str
    passed: bool
    violations: tuple[Violation, ...] = ()

    @property
    def witness(self) -> Optional[Violation]:
        return self.violations[0] if self.violations else None


_MAX_VIOLATIONS = 8


def check_pos_homogeneous(
    f: Functional, carrier: Carrier, scales: Optional[Sequence[Fraction]] = None
) -> FunctionalReport:
    """Assert evaluate(s*r) == s*evaluate(r) exactly for rays r, grid scales s."""
    scales = carrier.scales if scales is None else tuple(scales)
    violations: list[Violation] = []
    for r in carrier.rays:
        base = f.evaluate(r)
        for s in scales:
            got = f.evaluate(r.scale(s))
            want = ext_scale(s, base)
            if not ext_eq(got, want):
                residual = None
                if not (is_neg_inf(got) or is_neg_inf(want)):
                    residual = abs(got - want)
                violations.append(
                    Violation((r.scale(s), r), residual, note=f"scale {s}")
                )
                if len(violations) >= _MAX_VIOLATIONS:
                    break
        if len(violations) >= _MAX_VIOLATIONS:
            break
    return FunctionalReport(
        f.describe(), "positively_homogeneous", not violations, tuple(violations)
    )


def check_relation_additivity(
    f: Functional,
    r: RelationSpec,
    pairs: Iterable[tuple[Point, Point]],
    mode: str,
) -> FunctionalReport:
    """Check sub/super/exact additivity of f over the given related pairs.

    Pairs not in the relation are skipped. The bottom element absorbs: a
    bottom right-hand side only admits a bottom left-hand side in sub mode,
    and dominates everything in super mode. Exact mode compares with
    tolerance zero.
    """
    if mode not in ("sub", "super", "exact"):
        raise ValidationError(f"unknown additivity mode {mode!r}")
    violations: list[Violation] = []
    for x, y in pairs:
        if not r.relates(x, y):
            continue
        lhs = f.evaluate(x + y)
        rhs = ext_add(f.evaluate(x), f.evaluate(y))
        if mode == "sub":
            ok = ext_le(lhs, rhs)
        elif mode == "super":
            ok = ext_le(rhs, lhs)
        else:
            ok = ext_eq(lhs, rhs)
        if not ok:
            residual = None
            if not (is_neg_inf(lhs) or is_neg_inf(rhs)):
                residual = abs(lhs - rhs)
            violations.append(Violation((x, y), residual, note=mode))
            if len(violations) >= _MAX_VIOLATIONS:
                break
    return FunctionalReport(
        f.describe(), f"{mode}_additive_on_relation", not violations, tuple(violations)
    )


def check_monotone(
    f: Functional, carrier: Carrier, order: OrderSpec
) -> FunctionalReport:
    """Check x <= y implies f(x) <= f(y) over all ordered carrier point pairs."""
    points = carrier.points()
    violations: list[Violation] = []
    for x in points:
        fx = f.evaluate(x)
        for y in points:
            if x is y or not leq_order(x, y, order):
                continue
            fy = f.evaluate(y)
            if not ext_le(fx, fy):
                residual = None
                if not (is_neg_inf(fx) or is_neg_inf(fy)):
                    residual = fx - fy
                violations.append(Violation((x, y), residual))
                if len(violations) >= _MAX_VIOLATIONS:
                    break
        if len(violations) >= _MAX_VIOLATIONS:
            break
    return FunctionalReport(
        f.describe(), "monotone", not violations, tuple(violations)
    )
