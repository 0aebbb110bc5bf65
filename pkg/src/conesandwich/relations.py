"""Binary relations on cone points and the symmetric-preorder axiom checkers.

Built-in kinds cover the worked relation examples (full, single-ray,
equivalent measures, strict comonotonicity, affinity) and the two standard
non-examples (grid correlation, which breaks transitivity, and the zero-set
relation phi, which breaks additive closure). Extensional relations are
class-based; overlapping classes are accepted so that defective inputs can
be expressed and then flagged by the checkers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .core import (
    DimensionMismatch,
    Point,
    ValidationError,
    as_fraction,
    zero_point,
)

DEFAULT_SCALES = (Fraction(1, 2), Fraction(1), Fraction(2))


class RelationSpec:
    """Base for all relation kinds; subclasses decide membership."""

    kind: str = "abstract"

    def __init__(self, dimension: int):
        self.dimension = dimension

    def relates(self, x: Point, y: Point) -> bool:
        raise NotImplementedError

    def _check(self, x: Point, y: Point) -> None:
        if x.dimension != self.dimension or y.dimension != self.dimension:
            raise DimensionMismatch(
                f"relation is on dimension {self.dimension}, "
                f"got {x.dimension} and {y.dimension}"
            )

    def describe(self) -> str:
        return f"{self.kind}(dim={self.dimension})"

    def __repr__(self) -> str:
        return self.describe()


class Full(RelationSpec):
    """Everything relates to everything: the classical sandwich setting."""

    kind = "full"

    def relates(self, x: Point, y: Point) -> bool:
        self._check(x, y)
        return True


def _positive_ratio(x: Point, y: Point) -> Optional[Fraction]:
    """t > 0 with x = t*y, or None. Both points must be nonzero."""
    t: Optional[Fraction] = None
    for a, b in zip(x.coords, y.coords):
        if b == 0:
            if a != 0:
                return None
            continue
        r = a / b
        if t is None:
            t = r
        elif r != t:
            return None
    if t is None or t <= 0:
        return None
    # coords of y that were zero must be matched by zeros in x; checked above
    return t


def on_same_ray(x: Point, y: Point) -> bool:
    """x = t*y for some t > 0 (both nonzero)."""
    if x.is_zero() or y.is_zero():
        return False
    return _positive_ratio(x, y) is not None


class RayD(RelationSpec):
    """Points relate iff they lie on one common ray (positive multiples)."""

    kind = "ray_d"

    def relates(self, x: Point, y: Point) -> bool:
        self._check(x, y)
        if x.is_zero() and y.is_zero():
            return True
        if x.is_zero() or y.is_zero():
            return False
        return on_same_ray(x, y)


class StrictComonotone(RelationSpec):
    """Strict comonotonicity: proportional, or all increments strictly co-signed.

    The zero vector relates only to itself, which keeps the relation clear
    of the zero-row collapse trigger.
    """

    kind = "strict_comonotone"

    def relates(self, x: Point, y: Point) -> bool:
        self._check(x, y)
        if x.is_zero() and y.is_zero():
            return True
        if x.is_zero() or y.is_zero():
            return False
        if on_same_ray(x, y):
            return True
        n = x.dimension
        for i in range(n):
            for j in range(i + 1, n):
                if (x.coords[i] - x.coords[j]) * (y.coords[i] - y.coords[j]) <= 0:
                    return False
        return True


class EquivalentMeasures(RelationSpec):
    """Vectors of atom masses relate iff their zero-coordinate sets agree.

    Intended for nonnegative vectors (finite measures on n atoms); the
    predicate itself only inspects which coordinates vanish.
    """

    kind = "equivalent_measures"

    def relates(self, x: Point, y: Point) -> bool:
        self._check(x, y)
        return all((a == 0) == (b == 0) for a, b in zip(x.coords, y.coords))


class Affinity(RelationSpec):
    """x relates y iff x = a*y + b*e with a != 0, for the fixed direction e."""

    kind = "affinity"

    def __init__(self, e: Point):
        super().__init__(e.dimension)
        self.e = e

    def relates(self, x: Point, y: Point) -> bool:
        self._check(x, y)
        return _affinely_related(x, y, self.e)

    def describe(self) -> str:
        return f"{self.kind}(dim={self.dimension}, e={self.e})"


def _affinely_related(x: Point, y: Point, e: Point) -> bool:
    """Decide solvability of a*y + b*e = x with a != 0, exactly over Q."""
    n = x.dimension
    # Gaussian elimination on the n x 3 system [y e | x].
    rows = [[y.coords[i], e.coords[i], x.coords[i]] for i in range(n)]
    pivots: list[int] = []
    r = 0
    for col in range(2):
        pivot_row = next((i for i in range(r, n) if rows[i][col] != 0), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = Fraction(1) / rows[r][col]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(n):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    # inconsistent iff a zero row of [y e] has nonzero target
    for i in range(r, n):
        if rows[i][2] != 0:
            return False
    if pivots == [0, 1]:
        alpha = rows[0][2]
        return alpha != 0
    if pivots == [0]:
        # beta free; null space may or may not move alpha
        if rows[0][1] != 0:
            # alpha is tied to beta: alpha = x-part - coeff*beta, adjustable
            return True
        return rows[0][2] != 0
    if pivots == [1]:
        # y is a multiple of e (or zero); alpha is completely free
        return True
    # y = e = 0: solvable iff x = 0, and then alpha is free
    return x.is_zero()


class Corr(RelationSpec):
    """Grid functions relate iff their uniform-weight inner product is >= 0.

    Coordinates are cell values of step functions on [0,1]; the cell weight
    is 1/n, so the sign agrees with the exact integral of the product.
    """

    kind = "corr"

    def weighted_inner(self, x: Point, y: Point) -> Fraction:
        self._check(x, y)
        return x.dot(y) / self.dimension

    def relates(self, x: Point, y: Point) -> bool:
        self._check(x, y)
        return x.dot(y) >= 0


class PhiRelation(RelationSpec):
    """Relates iff both points are zero or both are nonzero.

    A symmetric preorder that fails additive closure: 1 and -1 relate,
    but their sum 0 does not relate to 1.
    """

    kind = "phi"

    def relates(self, x: Point, y: Point) -> bool:
        self._check(x, y)
        return x.is_zero() == y.is_zero()


class Extensional(RelationSpec):
    """Membership by declared classes: x relates y iff some class holds both.

    Disjoint classes encode an equivalence (the intended, axiom-satisfying
    case); overlapping classes are accepted and flagged via ``is_partition``
    so the checkers can exhibit the resulting axiom failures. Points outside
    every class relate only to themselves.
    """

    kind = "extensional"

    def __init__(self, classes: Sequence[Sequence[Point]], dimension: int):
        super().__init__(dimension)
        self.classes: tuple[frozenset[tuple[Fraction, ...]], ...] = tuple(
            frozenset(p.coords for p in cls) for cls in classes
        )
        for cls in classes:
            for p in cls:
                if p.dimension != dimension:
                    raise DimensionMismatch("class point dimension differs")
        counts: dict[tuple[Fraction, ...], int] = {}
        for cls in self.classes:
            for key in cls:
                counts[key] = counts.get(key, 0) + 1
        self.is_partition = all(c == 1 for c in counts.values())

    def relates(self, x: Point, y: Point) -> bool:
        self._check(x, y)
        if x.coords == y.coords:
            return True
        return any(x.coords in cls and y.coords in cls for cls in self.classes)

    def describe(self) -> str:
        tag = "partition" if self.is_partition else "overlapping"
        return f"{self.kind}(dim={self.dimension}, {len(self.classes)} classes, {tag})"


#: kind name -> constructor taking (dimension, params dict); used by the file format
def relates(r: RelationSpec, x: Point, y: Point) -> bool:
    """Membership of (x, y) in the relation."""
    return r.relates(x, y)


@dataclass(frozen=True)
class AxiomCheck:
    name: str
    passed: bool
    witness: tuple[Point, ...] | None = None
    note: str | None = None


@dataclass(frozen=True)
class AxiomReport:
    relation: str
    sample_size: int
    checks: tuple[AxiomCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> AxiomCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self) -> tuple[AxiomCheck, ...]:
        return tuple(c for c in self.checks if not c.passed)


def witness_violates(r: RelationSpec, axiom: str, witness: tuple[Point, ...]) -> bool:
    """Re-evaluate a reported witness; True means it still violates the axiom."""
    if axiom == "reflexive":
        (x,) = witness
        return not r.relates(x, x)
    if axiom == "symmetric":
        x, y = witness
        return r.relates(x, y) and not r.relates(y, x)
    if axiom == "transitive":
        x, y, z = witness
        return r.relates(x, y) and r.relates(y, z) and not r.relates(x, z)
    if axiom == "scale_closure":
        lx, x = witness
        return not r.relates(lx, x)
    if axiom == "additive_closure":
        x, y, z = witness
        return r.relates(x, y) and r.relates(y, z) and not r.relates(x + y, z)
    if axiom == "fraction_closure":
        xn, y = witness
        return not r.relates(xn, y)
    raise KeyError(f"unknown axiom {axiom!r}")


def _enforce_cap(sample: Sequence[Point], sample_cap: int) -> None:
    if len(sample) > sample_cap:
        raise ValidationError(
            f"sample of {len(sample)} points exceeds the cap of {sample_cap}; "
            "pass sample_cap explicitly to override"
        )


def _shared_checks(
    r: RelationSpec, sample: Sequence[Point]
) -> list[AxiomCheck]:
    checks: list[AxiomCheck] = []

    witness = next(((x,) for x in sample if not r.relates(x, x)), None)
    checks.append(AxiomCheck("reflexive", witness is None, witness))

    witness = next(
        (
            (x, y)
            for x, y in itertools.product(sample, repeat=2)
            if r.relates(x, y) and not r.relates(y, x)
        ),
        None,
    )
    checks.append(AxiomCheck("symmetric", witness is None, witness))

    witness = next(
        (
            (x, y, z)
            for x, y, z in itertools.product(sample, repeat=3)
            if r.relates(x, y) and r.relates(y, z) and not r.relates(x, z)
        ),
        None,
    )
    checks.append(AxiomCheck("transitive", witness is None, witness))
    return checks


def _additive_check(r: RelationSpec, sample: Sequence[Point]) -> AxiomCheck:
    for x, y, z in itertools.product(sample, repeat=3):
        if r.relates(x, y) and r.relates(y, z) and not r.relates(x + y, z):
            return AxiomCheck(
                "additive_closure",
                False,
                (x, y, z),
                note="(x+y) fails to relate to z",
            )
    return AxiomCheck("additive_closure", True)


def check_ccsp_axioms(
    r: RelationSpec,
    sample: Sequence[Point],
    scales: Sequence[Fraction] = DEFAULT_SCALES,
    sample_cap: int = 64,
) -> AxiomReport:
    """Check the five convex-conic symmetric preorder axioms exhaustively.

    Reflexivity, symmetry and transitivity run over all sample tuples;
    scale closure tests (s*x) relates x for every positive s in the grid;
    additive closure tests (x+y) relates z over all chains x r y r z.
    The first violation in sample order becomes the witness.
    """
    if not sample:
        raise ValidationError("sample must be nonempty")
    _enforce_cap(sample, sample_cap)
    checks = _shared_checks(r, sample)

    witness = None
    note = None
    for x in sample:
        for s in scales:
            s = as_fraction(s)
            if s <= 0:
                raise ValidationError("scale grid entries must be positive")
            if not r.relates(x.scale(s), x):
                witness = (x.scale(s), x)
                note = f"scale {s}"
                break
        if witness:
            break
    checks.append(AxiomCheck("scale_closure", witness is None, witness, note))

    checks.append(_additive_check(r, sample))
    return AxiomReport(r.describe(), len(sample), tuple(checks))


def check_summand_axioms(
    r: RelationSpec,
    sample: Sequence[Point],
    n_max: int = 4,
    sample_cap: int = 64,
) -> AxiomReport:
    """Check the summand symmetric preorder axioms (no scale axiom).

    Also checks the derived consequence that x r y forces (x/n) r y for
    n up to n_max, which any summand symmetric preorder must satisfy.
    """
    if not sample:
        raise ValidationError("sample must be nonempty")
    if n_max < 2:
        raise ValidationError("n_max must be >= 2")
    _enforce_cap(sample, sample_cap)
    checks = _shared_checks(r, sample)
    checks.append(_additive_check(r, sample))

    witness = None
    note = None
    for x, y in itertools.product(sample, repeat=2):
        if not r.relates(x, y):
            continue
        for n in range(2, n_max + 1):
            xn = x.scale(Fraction(1, n))
            if not r.relates(xn, y):
                witness = (xn, y)
                note = f"x/{n} fails to relate to y for x={x}"
                break
        if witness:
            break
    checks.append(AxiomCheck("fraction_closure", witness is None, witness, note))
    return AxiomReport(r.describe(), len(sample), tuple(checks))


@dataclass(frozen=True)
class CollapseReport:
    """Outcome of probing the zero-row / antipodal collapse triggers."""

    relation: str
    zero_trigger: bool
    antipodal_trigger: bool
    full_on_sample: Optional[bool]
    discrepancies: tuple[tuple[Point, Point], ...] = ()

    @property
    def triggered(self) -> bool:
        return self.zero_trigger or self.antipodal_trigger

    @property
    def consistent(self) -> bool:
        """True when untriggered, or triggered with the sample fully related."""
        return not self.triggered or not self.discrepancies


def check_collapse(
    r: RelationSpec,
    sample: Sequence[Point],
    max_discrepancies: int = 16,
) -> CollapseReport:
    """Detect the collapse triggers and verify their consequence on the sample.

    Trigger one: the zero vector relates to every sampled point. Trigger two:
    at least one sampled antipodal pair exists and (-x) relates x for all of
    them. Either trigger forces the relation to be everything, so when one
    fires the sample is swept for unrelated pairs; any found discrepancy
    marks the input as failing the preorder axioms somewhere.
    """
    if not sample:
        raise ValidationError("sample must be nonempty")
    zero = zero_point(r.dimension)
    zero_trigger = all(r.relates(zero, x) for x in sample)

    coords_seen = {p.coords for p in sample}
    antipodal = [
        x for x in sample if not x.is_zero() and (-x).coords in coords_seen
    ]
    antipodal_trigger = bool(antipodal) and all(
        r.relates(-x, x) for x in antipodal
    )

    if not (zero_trigger or antipodal_trigger):
        return CollapseReport(r.describe(), zero_trigger, antipodal_trigger, None)

    discrepancies: list[tuple[Point, Point]] = []
    for x, y in itertools.product(sample, repeat=2):
        if not r.relates(x, y):
            discrepancies.append((x, y))
            if len(discrepancies) >= max_discrepancies:
                break
    return CollapseReport(
        r.describe(),
        zero_trigger,
        antipodal_trigger,
        full_on_sample=not discrepancies,
        discrepancies=tuple(discrepancies),
    )
