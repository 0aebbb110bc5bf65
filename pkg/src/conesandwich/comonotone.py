"""Comonotonicity at finite resolution: predicates, the monotone-map
decomposition, Choquet integrals, and the grid approximation pipeline.

The approximation routines realize the constructive arguments for
[0,1]-grid functions: step functions are tilted into injective ones,
increasing 1-Lipschitz maps get strictly increasing 1-Lipschitz
approximations, and comonotone pairs are deformed into strictly comonotone
ones with explicit sup-norm error ladders. Arithmetic stays rational
wherever the inputs are rational; callers supplying floats should convert
first (exactness is the point of these checks; a 1e-12 absolute tolerance
is the documented expectation when floats are coerced).
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .capacities import Capacity, choquet_value
from .core import (
    DimensionMismatch,
    ExtReal,
    Point,
    RationalLike,
    ValidationError,
    as_fraction,
    ext_add,
    ext_le,
    is_neg_inf,
)
from .functionals import Choquet, Functional, MaxOf
from .relations import StrictComonotone, on_same_ray


def is_comonotonic(x: Point, y: Point) -> bool:
    """All coordinate increments co-signed (products >= 0)."""
    if x.dimension != y.dimension:
        raise DimensionMismatch("comonotonicity needs equal dimensions")
    n = x.dimension
    for i in range(n):
        for j in range(i + 1, n):
            if (x.coords[i] - x.coords[j]) * (y.coords[i] - y.coords[j]) < 0:
                return False
    return True


def is_strictly_comonotonic(x: Point, y: Point) -> bool:
    """Positively proportional, or all increments strictly co-signed."""
    if x.dimension != y.dimension:
        raise DimensionMismatch("comonotonicity needs equal dimensions")
    return StrictComonotone(x.dimension).relates(x, y)


def choquet_integral(x: Point, nu: Capacity) -> Fraction:
    """Descending layer-cake sum of x against the capacity, exactly."""
    return choquet_value(x, nu)


@dataclass(frozen=True)
class PiecewiseLinear:
    """Increasing piecewise-linear map given by nodes; clamped outside."""

    xs: tuple[Fraction, ...]
    ys: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.xs) != len(self.ys) or not self.xs:
            raise ValidationError("piecewise-linear map needs matched nodes")
        if any(a >= b for a, b in zip(self.xs, self.xs[1:])):
            raise ValidationError("node abscissae must strictly increase")

    def __call__(self, t: RationalLike) -> Fraction:
        t = as_fraction(t)
        xs, ys = self.xs, self.ys
        if t <= xs[0]:
            return ys[0]
        if t >= xs[-1]:
            return ys[-1]
        k = bisect.bisect_right(xs, t) - 1
        x0, x1 = xs[k], xs[k + 1]
        y0, y1 = ys[k], ys[k + 1]
        return y0 + (y1 - y0) * (t - x0) / (x1 - x0)

    def is_strictly_increasing(self) -> bool:
        return all(a < b for a, b in zip(self.ys, self.ys[1:]))

    def max_slope(self) -> Fraction:
        best = Fraction(0)
        for (x0, y0), (x1, y1) in zip(
            zip(self.xs, self.ys), zip(self.xs[1:], self.ys[1:])
        ):
            s = (y1 - y0) / (x1 - x0)
            if s > best:
                best = s
        return best


@dataclass(frozen=True)
class GridFunction:
    """Values at N+1 equispaced nodes of [0,1]."""

    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.values) < 2:
            raise ValidationError("grid functions need at least two nodes")
        object.__setattr__(
            self, "values", tuple(as_fraction(v) for v in self.values)
        )

    @property
    def n_cells(self) -> int:
        return len(self.values) - 1

    def nodes(self) -> tuple[Fraction, ...]:
        n = self.n_cells
        return tuple(Fraction(k, n) for k in range(n + 1))

    def as_point(self) -> Point:
        return Point(self.values)

    def interpolant(self) -> PiecewiseLinear:
        return PiecewiseLinear(self.nodes(), self.values)

    def resample(self, n_cells: int) -> "GridFunction":
        pl = self.interpolant()
        return GridFunction(
            tuple(pl(Fraction(k, n_cells)) for k in range(n_cells + 1))
        )

    def is_increasing(self) -> Optional[tuple[int, int]]:
        """None if nondecreasing along nodes, else the offending index pair."""
        for k in range(self.n_cells):
            if self.values[k] > self.values[k + 1]:
                return (k, k + 1)
        return None

    def lipschitz_witness(self) -> Optional[tuple[int, int]]:
        """None if 1-Lipschitz between consecutive nodes, else a witness."""
        gap = Fraction(1, self.n_cells)
        for k in range(self.n_cells):
            if abs(self.values[k + 1] - self.values[k]) > gap:
                return (k, k + 1)
        return None


def sup_distance(a: GridFunction, b: GridFunction) -> Fraction:
    if a.n_cells != b.n_cells:
        raise ValidationError("sup distance needs a common grid")
    return max(abs(p - q) for p, q in zip(a.values, b.values))


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant function on a partition of [0,1].

    ``breakpoints`` has k+1 entries 0 = b0 < ... < bk = 1; piece i is
    [b_{i-1}, b_i) except the last, which is closed.
    """

    breakpoints: tuple[Fraction, ...]
    piece_values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        bps = tuple(as_fraction(b) for b in self.breakpoints)
        vals = tuple(as_fraction(v) for v in self.piece_values)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "piece_values", vals)
        if len(bps) != len(vals) + 1 or len(vals) < 1:
            raise ValidationError("breakpoint/value counts disagree")
        if bps[0] != 0 or bps[-1] != 1:
            raise ValidationError("step functions live on [0,1]")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise ValidationError("pieces must be nondegenerate")

    @property
    def n_pieces(self) -> int:
        return len(self.piece_values)

    def piece_of(self, t: Fraction) -> int:
        if t < 0 or t > 1:
            raise ValidationError("argument outside [0,1]")
        k = bisect.bisect_right(self.breakpoints, t) - 1
        return min(k, self.n_pieces - 1)

    def __call__(self, t: RationalLike) -> Fraction:
        return self.piece_values[self.piece_of(as_fraction(t))]

    def merged_equal_neighbors(self) -> "StepFunction":
        bps = [self.breakpoints[0]]
        vals: list[Fraction] = []
        for i, v in enumerate(self.piece_values):
            if vals and vals[-1] == v:
                bps[-1] = self.breakpoints[i + 1]
            else:
                vals.append(v)
                bps.append(self.breakpoints[i + 1])
        return StepFunction(tuple(bps), tuple(vals))


@dataclass(frozen=True)
class Decomposition:
    z: Point
    h: PiecewiseLinear
    g: PiecewiseLinear


def comonotone_decompose(x: Point, y: Point) -> Decomposition:
    """Write a comonotone pair as x = h(z), y = g(z) with z = x + y.

    h and g interpolate linearly between the distinct values of z; they are
    increasing, 1-Lipschitz on consecutive z values, and add up to the
    identity on z's range. Ties in z force ties in x and y (comonotonicity),
    so the node values are well defined.
    """
    if not is_comonotonic(x, y):
        raise ValidationError("inputs are not comonotonic")
    z = x + y
    by_z: dict[Fraction, tuple[Fraction, Fraction]] = {}
    for zi, xi, yi in zip(z.coords, x.coords, y.coords):
        if zi in by_z and by_z[zi] != (xi, yi):
            raise ValidationError("tied sums with differing parts")
        by_z[zi] = (xi, yi)
    zs = sorted(by_z)
    hx = tuple(by_z[v][0] for v in zs)
    gy = tuple(by_z[v][1] for v in zs)
    if len(zs) == 1:
        # constant z: single-node maps, clamped everywhere
        eps = Fraction(1)
        h = PiecewiseLinear((zs[0], zs[0] + eps), (hx[0], hx[0]))
        g = PiecewiseLinear((zs[0], zs[0] + eps), (gy[0], gy[0]))
        return Decomposition(z, h, g)
    return Decomposition(z, PiecewiseLinear(tuple(zs), hx), PiecewiseLinear(tuple(zs), gy))


@dataclass(frozen=True)
class CharacterizationReport:
    """Strict-comonotonicity predicate versus the monotone-functions form."""

    strict: bool
    proportional: bool
    comonotone: bool
    z_injective: Optional[bool]
    h_injective: Optional[bool]
    g_injective: Optional[bool]
    characterization: bool
    lemma_applicable: bool

    @property
    def agree(self) -> bool:
        if self.lemma_applicable:
            return (self.strict and not self.proportional) == self.characterization
        return self.strict == self.characterization


def check_strict_characterization(x: Point, y: Point) -> CharacterizationReport:
    """Compare the predicate against the injective-decomposition form.

    The function form asks for an injective z with x = h(z), y = g(z) and
    h, g injective on z's values; it is probed with the canonical z = x+y
    decomposition. For pairs outside one common ray the two sides must
    agree; for proportional pairs the equivalence is not claimed (a
    proportional non-injective pair satisfies the predicate but admits no
    injective z), which ``lemma_applicable`` records.
    """
    strict = is_strictly_comonotonic(x, y)
    proportional = on_same_ray(x, y) or (x.is_zero() and y.is_zero())
    comono = is_comonotonic(x, y)
    if not comono:
        return CharacterizationReport(
            strict, proportional, False, None, None, None, False,
            lemma_applicable=not proportional,
        )
    z = x + y
    z_inj = len(set(z.coords)) == z.dimension
    dec = comonotone_decompose(x, y)
    # injectivity of the value maps over z's distinct values
    h_inj = len(set(dec.h.ys)) == len(dec.h.ys)
    g_inj = len(set(dec.g.ys)) == len(dec.g.ys)
    if len(set(z.coords)) == 1:
        h_inj = True
        g_inj = True
    char = z_inj and h_inj and g_inj
    return CharacterizationReport(
        strict, proportional, True, z_inj, h_inj, g_inj, char,
        lemma_applicable=not proportional,
    )


def injective_step_perturbation(
    s: StepFunction,
    eps: RationalLike,
    grid_size: int = 64,
    merge_equal: bool = True,
    max_grid_bumps: int = 16,
) -> GridFunction:
    """Tilt each constant piece into a strict ramp: 2e(w-lo)/(hi-lo)+a-e.

    Adjacent equal-valued pieces are merged first (unless disabled), and the
    tilt e shrinks below half the minimum gap between distinct piece values
    so images of distinct-valued pieces stay disjoint. Injectivity on the
    output grid is then asserted; equal-valued pieces that are not adjacent
    can still collide at rationally aligned nodes, in which case the grid is
    bumped a bounded number of times before giving up.
    """
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValidationError("eps must be positive")
    if grid_size < 1:
        raise ValidationError("grid_size must be >= 1")
    work = s.merged_equal_neighbors() if merge_equal else s
    if not merge_equal and any(
        a == b for a, b in zip(work.piece_values, work.piece_values[1:])
    ):
        raise ValidationError(
            "eps cannot be shrunk to satisfy injectivity: adjacent pieces "
            "share a value and merging is disabled"
        )
    distinct = sorted(set(work.piece_values))
    eff = eps
    if len(distinct) > 1:
        min_gap = min(b - a for a, b in zip(distinct, distinct[1:]))
        if 2 * eff >= min_gap:
            eff = min_gap / 4

    def values_on(n_cells: int) -> list[Fraction]:
        out = []
        for k in range(n_cells + 1):
            w = Fraction(k, n_cells)
            i = work.piece_of(w)
            lo = work.breakpoints[i]
            hi = work.breakpoints[i + 1]
            out.append(2 * eff * (w - lo) / (hi - lo) + work.piece_values[i] - eff)
        return out

    n_cells = grid_size
    for _ in range(max_grid_bumps + 1):
        vals = values_on(n_cells)
        if len(set(vals)) == len(vals):
            result = GridFunction(tuple(vals))
            # postconditions: injective (just checked) and eps-close
            worst = max(
                abs(v - work(Fraction(k, n_cells)))
                for k, v in enumerate(vals)
            )
            if worst > eps:
                raise ValidationError("perturbation left the eps tube")
            return result
        n_cells += 1
    raise ValidationError(
        "eps cannot be shrunk to satisfy injectivity: equal-valued "
        "non-adjacent pieces collide on every attempted grid"
    )


def _approx_core(
    f: PiecewiseLinear,
    a: Fraction,
    b: Fraction,
    eps: Fraction,
    snap_nodes: Sequence[Fraction] = (),
) -> PiecewiseLinear:
    """Strictly increasing 1-Lipschitz approximation of increasing f on [a,b].

    Mesh of gap < eps/2; constant runs collapse: a run touching the left end
    keeps only its first point, any other run keeps its last point and gains
    a replacement point just below the run value (strictly above the
    previous kept value, within eps/2 of the run value), placed at the exact
    f-preimage of the midpoint value and snapped to an admissible grid node
    when one exists. Kept values are exact f values, so every interpolant
    slope inherits f's Lipschitz bound.
    """
    if b <= a:
        raise ValidationError("need a nondegenerate interval")
    m_cells = int(2 * (b - a) / eps) + 1
    mesh = [a + (b - a) * Fraction(i, m_cells) for i in range(m_cells + 1)]
    vals = [f(t) for t in mesh]

    if vals[0] == vals[-1]:
        # globally constant: tilted line through the constant
        delta = min(eps / 4, (b - a) / 2)
        return PiecewiseLinear((a, b), (vals[0] - delta, vals[0] + delta))

    kept_x: list[Fraction] = []
    kept_v: list[Fraction] = []
    i = 0
    while i <= m_cells:
        j = i
        while j + 1 <= m_cells and vals[j + 1] == vals[i]:
            j += 1
        v = vals[i]
        if i == 0:
            kept_x.append(mesh[0])
            kept_v.append(v)
        elif j == i:
            kept_x.append(mesh[i])
            kept_v.append(v)
        else:
            # replacement below the run, then the run's last mesh point
            prev_v = kept_v[-1]
            lo_f = max(prev_v, v - eps / 2)
            target = (lo_f + v) / 2
            x_star = _preimage_mid(f, kept_x[-1], mesh[i], target)
            x_star = _snap(
                f, x_star, kept_x[-1], mesh[i], lo_f, v, snap_nodes
            )
            kept_x.append(x_star)
            kept_v.append(f(x_star))
            kept_x.append(mesh[j])
            kept_v.append(v)
        i = j + 1

    out = PiecewiseLinear(tuple(kept_x), tuple(kept_v))
    if not out.is_strictly_increasing():
        raise ValidationError("approximation failed to become strict")
    if out.max_slope() > 1:
        raise ValidationError("approximation broke the Lipschitz bound")
    return out


def _preimage_mid(
    f: PiecewiseLinear, lo_x: Fraction, hi_x: Fraction, target: Fraction
) -> Fraction:
    """Midpoint of {x in [lo_x, hi_x]: f(x) = target}, exactly."""
    left = None
    right = None
    xs = [lo_x] + [t for t in f.xs if lo_x < t < hi_x] + [hi_x]
    for x0, x1 in zip(xs, xs[1:]):
        y0, y1 = f(x0), f(x1)
        if not (min(y0, y1) <= target <= max(y0, y1)):
            continue
        if y1 == y0:
            seg_l, seg_r = x0, x1
        else:
            t = x0 + (target - y0) * (x1 - x0) / (y1 - y0)
            seg_l = seg_r = t
        if left is None:
            left = seg_l
        right = seg_r
    if left is None:
        raise ValidationError("target value not attained on the interval")
    return (left + right) / 2


def _snap(
    f: PiecewiseLinear,
    x_star: Fraction,
    lo_x: Fraction,
    hi_x: Fraction,
    lo_f: Fraction,
    v: Fraction,
    snap_nodes: Sequence[Fraction],
) -> Fraction:
    """Deterministically prefer an admissible grid node near x_star."""
    best = None
    for node in snap_nodes:
        if not (lo_x < node < hi_x):
            continue
        fv = f(node)
        if not (lo_f < fv < v):
            continue
        if best is None or abs(node - x_star) < abs(best - x_star) or (
            abs(node - x_star) == abs(best - x_star) and node < best
        ):
            best = node
    return best if best is not None else x_star


def strictly_increasing_approx(
    f: GridFunction, eps: RationalLike
) -> GridFunction:
    """Strictly increasing, 1-Lipschitz, within eps of an increasing input.

    The input must be nondecreasing with consecutive node increments at most
    the node spacing (the grid reading of 1-Lipschitz); violations are
    rejected with the offending node pair.
    """
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValidationError("eps must be positive")
    bad = f.is_increasing()
    if bad is not None:
        raise ValidationError(f"input decreases between nodes {bad[0]} and {bad[1]}")
    bad = f.lipschitz_witness()
    if bad is not None:
        raise ValidationError(
            f"input breaks the Lipschitz bound between nodes {bad[0]} and {bad[1]}"
        )
    core = _approx_core(
        f.interpolant(), Fraction(0), Fraction(1), eps, snap_nodes=f.nodes()
    )
    m_cells = int(2 / eps) + 1
    n_out = max(f.n_cells, m_cells)
    out = GridFunction(tuple(core(Fraction(k, n_out)) for k in range(n_out + 1)))
    # postcondition: inside the eps tube at shared comparison nodes
    fine = f.resample(n_out)
    if sup_distance(fine, out) >= eps:
        raise ValidationError("approximation left the eps tube")
    return out


@dataclass(frozen=True)
class StrictPairReport:
    eps: Fraction
    grid_cells: int
    short_circuit: bool
    strictly_comonotonic: bool
    delta_x: Fraction
    delta_y: Fraction
    z_perturbation: Fraction

    @property
    def delta(self) -> Fraction:
        return max(self.delta_x, self.delta_y)


def approximate_strict_pair(
    x: GridFunction, y: GridFunction, eps: RationalLike
) -> tuple[GridFunction, GridFunction, StrictPairReport]:
    """Deform a comonotone grid pair into a strictly comonotone one.

    Pipeline: decompose (z, h, g); represent z as a step function on
    node-centered cells; tilt it injective; approximate h and g by strictly
    increasing 1-Lipschitz maps on the perturbed range; compose. Outputs are
    strictly comonotonic on the grid, with sup-norm deviations reported
    (nonincreasing along eps ladders on the bundled fixtures). Pairs that
    are already strictly comonotonic return unchanged.
    """
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValidationError("eps must be positive")
    if x.n_cells != y.n_cells:
        raise ValidationError("inputs must share a grid")
    xv, yv = x.as_point(), y.as_point()
    if not is_comonotonic(xv, yv):
        raise ValidationError("inputs are not comonotonic on the grid")
    if is_strictly_comonotonic(xv, yv):
        report = StrictPairReport(
            eps, x.n_cells, True, True, Fraction(0), Fraction(0), Fraction(0)
        )
        return x, y, report

    dec = comonotone_decompose(xv, yv)
    n = x.n_cells
    # node-centered cells so the step function matches z at every node
    bps = [Fraction(0)]
    bps += [Fraction(2 * k + 1, 2 * n) for k in range(n)]
    bps.append(Fraction(1))
    step = StepFunction(tuple(bps), dec.z.coords)
    z_eps = injective_step_perturbation(step, eps, grid_size=n)

    lo = min(min(dec.z.coords), min(z_eps.values))
    hi = max(max(dec.z.coords), max(z_eps.values))
    hn = _approx_core(dec.h, lo, hi, eps)
    gn = _approx_core(dec.g, lo, hi, eps)

    cells = z_eps.n_cells
    xn = GridFunction(tuple(hn(v) for v in z_eps.values))
    yn = GridFunction(tuple(gn(v) for v in z_eps.values))
    x_cmp = x if cells == n else x.resample(cells)
    y_cmp = y if cells == n else y.resample(cells)
    z_base = GridFunction(dec.z.coords) if cells == n else GridFunction(
        dec.z.coords
    ).resample(cells)

    strict = is_strictly_comonotonic(xn.as_point(), yn.as_point())
    if not strict:
        raise ValidationError("pipeline failed to produce a strict pair")
    report = StrictPairReport(
        eps=eps,
        grid_cells=cells,
        short_circuit=False,
        strictly_comonotonic=strict,
        delta_x=sup_distance(x_cmp, xn),
        delta_y=sup_distance(y_cmp, yn),
        z_perturbation=sup_distance(z_base, z_eps),
    )
    return xn, yn, report


@dataclass(frozen=True)
class SubadditivityReport:
    checked: int
    passed: bool
    violations: tuple[tuple[Point, Point, ExtReal, ExtReal], ...]


def check_comono_subadditive(
    h: Functional, pairs: Sequence[tuple[Point, Point]]
) -> SubadditivityReport:
    """H(x+y) <= H(x) + H(y) on the strictly comonotone pairs of the sample."""
    violations = []
    checked = 0
    for x, y in pairs:
        if not is_strictly_comonotonic(x, y):
            continue
        checked += 1
        lhs = h.evaluate(x + y)
        rhs = ext_add(h.evaluate(x), h.evaluate(y))
        if not ext_le(lhs, rhs):
            violations.append((x, y, lhs, rhs))
    return SubadditivityReport(checked, not violations, tuple(violations))


@dataclass(frozen=True)
class ComonoEnvelopeReport:
    members: int
    attained_everywhere: bool
    members_below: bool
    members_additive: bool
    never_attaining: tuple[int, ...]
    additivity_violations: tuple[tuple[int, Point, Point], ...]

    @property
    def passed(self) -> bool:
        return self.attained_everywhere and self.members_below and self.members_additive


def comono_envelope_check(h: Functional, carrier) -> ComonoEnvelopeReport:
    """Verify a max-of-Choquet majorant is the envelope of its members.

    Each member must stay below the max (structural, still verified), some
    member must attain the max at every carrier point, and every member must
    be exactly additive on comonotone carrier pairs. Members that never
    attain anywhere are flagged as dominated.
    """
    if isinstance(h, Choquet):
        members: tuple[Functional, ...] = (h,)
    elif isinstance(h, MaxOf) and all(
        isinstance(m, Choquet) for m in h.members
    ):
        members = h.members
    else:
        raise ValidationError("expected a Choquet integral or a max of them")

    pts = carrier.points()
    attained_everywhere = True
    members_below = True
    attains = [False] * len(members)
    for p in pts:
        hv = h.evaluate(p)
        hit = False
        for k, m in enumerate(members):
            mv = m.evaluate(p)
            if not ext_le(mv, hv):
                members_below = False
            if mv == hv:
                attains[k] = True
                hit = True
        if not hit:
            attained_everywhere = False

    viol = []
    for k, m in enumerate(members):
        for i, p in enumerate(pts):
            for q in pts[i:]:
                if not is_comonotonic(p, q):
                    continue
                if m.evaluate(p + q) != m.evaluate(p) + m.evaluate(q):
                    viol.append((k, p, q))
    never = tuple(k for k, a in enumerate(attains) if not a)
    return ComonoEnvelopeReport(
        members=len(members),
        attained_everywhere=attained_everywhere,
        members_below=members_below,
        members_additive=not viol,
        never_attaining=never,
        additivity_violations=tuple(viol),
    )
