"""Precomputed sweep geometry shared by the pure and compiled backends.

Everything that depends only on carrier, relation, order, grids and H is
computed once here; envelope runs that differ only in the minorant P reuse
the same tables via ``with_minorant``.
"""

from __future__ import annotations

import bisect
from fractions import Fraction
from typing import Optional

from ..core import (
    ExtReal,
    NEG_INF,
    Point,
    ValidationError,
    ext_le,
    is_neg_inf,
    zero_point,
)

_INT64_BOUND = 1 << 62


class SweepTables:
    """Flat views of one instance's geometry, plus lazy feasibility intervals."""

    def __init__(self, inst) -> None:
        carrier = inst.carrier
        self.carrier = carrier
        self.relation = inst.relation
        self.order = inst.order
        self.certified = inst.certified
        self.nrays = len(carrier.rays)
        self.nscales = len(carrier.scales)
        self.npoints = self.nrays * self.nscales
        self.points = carrier.points()
        self.labels = carrier.point_labels()
        self.lams = inst.effective_lambda_grid()
        self.scales = carrier.scales

        one = Fraction(1)
        scale_pos = {s: i for i, s in enumerate(self.scales)}
        self.px = [
            r * self.nscales + scale_pos[one] for r in range(self.nrays)
        ]

        zero = zero_point(carrier.dimension)
        self.zero = zero
        rel = inst.relation
        pts = self.points
        self.rel = [
            [rel.relates(pts[i], pts[j]) for j in range(self.npoints)]
            for i in range(self.npoints)
        ]
        self.rel0 = [rel.relates(zero, pts[j]) for j in range(self.npoints)]

        self.hpt: list[ExtReal] = [inst.h.evaluate(p) for p in pts]
        self.hray: list[ExtReal] = [self.hpt[self.px[r]] for r in range(self.nrays)]
        self.hsum: list[list[Optional[ExtReal]]] = [
            [None] * self.npoints for _ in range(self.npoints)
        ]
        for i in range(self.npoints):
            for j in range(i, self.npoints):
                if self.rel[i][j] or self.rel[j][i]:
                    v = inst.h.evaluate(pts[i] + pts[j])
                    self.hsum[i][j] = v
                    self.hsum[j][i] = v

        self.h0 = inst.h.evaluate(zero)
        self.p0 = inst.p.evaluate(zero)
        self.pray: list[ExtReal] = [inst.p.evaluate(r) for r in carrier.rays]

        # scale/lambda ratio eligibility for the certified certificate:
        # ratio_idx[s][l] = index of scales[s]/lams[l] in the scale grid, or -1
        self.ratio_idx = [
            [
                (scale_pos.get(s / lam, -1) if lam > 0 else -1)
                for lam in self.lams
            ]
            for s in self.scales
        ]

        # h lists per target ray (h relates to the scale-1 point of the ray)
        self.hlists = [
            [hp for hp in range(self.npoints) if self.rel[hp][self.px[xr]]]
            for xr in range(self.nrays)
        ]

        # geometry caches shared across minorant-swapped clones
        self._cache: dict = {}

    @property
    def zero_admissible(self) -> bool:
        """Whether the zero vector may act as a candidate with Q(0) = 0."""
        zero = Fraction(0)
        return ext_le(self.p0, zero) and ext_le(zero, self.h0)

    def with_minorant(self, p) -> "SweepTables":
        """Share all geometry, swap the minorant data (pray, p0)."""
        import copy

        clone = copy.copy(self)
        clone.p0 = p.evaluate(self.zero)
        clone.pray = [p.evaluate(r) for r in self.carrier.rays]
        return clone

    def lambda_interval(
        self, g: Point, x: Point, h: Point
    ) -> Optional[tuple[int, int]]:
        """Grid-index interval of feasible lambdas for h + lam*g <= x, or None.

        The feasible lambda set is an intersection of half-lines, hence an
        interval; grid entries are sorted ascending so feasible indices are
        contiguous.
        """
        lo = Fraction(0)
        hi: Optional[Fraction] = None
        for gi, xi, hi_c in zip(g.coords, x.coords, h.coords):
            d = xi - hi_c
            if gi > 0:
                bound = d / gi
                if hi is None or bound < hi:
                    hi = bound
            elif gi < 0:
                bound = d / gi
                if bound > lo:
                    lo = bound
            elif d < 0:
                return None
        if hi is not None and hi < lo:
            return None
        lo_i = bisect.bisect_left(self.lams, lo)
        if lo_i >= len(self.lams):
            return None
        hi_i = (
            len(self.lams) - 1
            if hi is None
            else bisect.bisect_right(self.lams, hi) - 1
        )
        if hi_i < lo_i:
            return None
        return lo_i, hi_i

    def _build_feasibility(self) -> None:
        pts = self.points
        rays = self.carrier.rays
        feas = []
        feas0 = []
        for gp in range(self.npoints):
            g = pts[gp]
            by_x = []
            by_x0 = []
            for xr in range(self.nrays):
                x = rays[xr]
                row = {}
                for hp in self.hlists[xr]:
                    iv = self.lambda_interval(g, x, pts[hp])
                    if iv is not None:
                        row[hp] = iv
                by_x.append(row)
                by_x0.append(self.lambda_interval(g, x, self.zero))
            feas.append(by_x)
            feas0.append(by_x0)
        self._cache["feas"] = feas
        self._cache["feas0"] = feas0

    def feasibility(self):
        if "feas" not in self._cache:
            self._build_feasibility()
        return self._cache["feas"], self._cache["feas0"]

    def sum_locations(self):
        """(i <= j) pair index -> (ray, scale) of the sum, 'zero', or None."""
        if "sumloc" not in self._cache:
            pts = self.points
            loc: dict[tuple[int, int], object] = {}
            for i in range(self.npoints):
                for j in range(i, self.npoints):
                    if not self.rel[i][j]:
                        continue
                    s = pts[i] + pts[j]
                    loc[(i, j)] = "zero" if s.is_zero() else self.carrier.locate(s)
            self._cache["sumloc"] = loc
        return self._cache["sumloc"]

    def kernel_payload(self) -> dict:
        """Flattened int64 arrays for the compiled kernel (geometry only).

        Cached and shared across minorant-swapped clones. Raises
        OverflowError when any numerator or denominator falls outside the
        kernel's safe range; the caller then falls back to pure Python.
        """
        cached = self._cache.get("payload")
        if cached is not None:
            if isinstance(cached, Exception):
                raise cached
            return cached
        try:
            payload = self._build_payload()
        except OverflowError as exc:
            self._cache["payload"] = exc
            raise
        self._cache["payload"] = payload
        return payload

    def _build_payload(self) -> dict:
        def enc(v: ExtReal) -> tuple[int, int]:
            if is_neg_inf(v):
                return (-1, 0)
            num, den = v.numerator, v.denominator
            if abs(num) >= _INT64_BOUND or den >= _INT64_BOUND:
                raise OverflowError("value outside kernel range")
            return (num, den)

        def enc_frac(v: Fraction) -> tuple[int, int]:
            if abs(v.numerator) >= _INT64_BOUND or v.denominator >= _INT64_BOUND:
                raise OverflowError("value outside kernel range")
            return (v.numerator, v.denominator)

        n = self.carrier.dimension
        coords_num: list[int] = []
        coords_den: list[int] = []
        for p in self.points:
            for c in p.coords:
                a, b = enc_frac(c)
                coords_num.append(a)
                coords_den.append(b)
        hsum_num: list[int] = []
        hsum_den: list[int] = []
        for i in range(self.npoints):
            for j in range(self.npoints):
                v = self.hsum[i][j]
                a, b = (0, 1) if v is None else enc(v)
                hsum_num.append(a)
                hsum_den.append(b)

        def enc_list(vals):
            nums, dens = [], []
            for v in vals:
                a, b = enc(v) if not isinstance(v, Fraction) else enc_frac(v)
                nums.append(a)
                dens.append(b)
            return nums, dens

        scale_num, scale_den = enc_list(list(self.scales))
        lam_num, lam_den = enc_list(list(self.lams))
        hpt_num, hpt_den = enc_list(self.hpt)
        rel_flat = [
            1 if self.rel[i][j] else 0
            for i in range(self.npoints)
            for j in range(self.npoints)
        ]
        ratio_flat = [
            self.ratio_idx[s][l]
            for s in range(self.nscales)
            for l in range(len(self.lams))
        ]
        return {
            "nrays": self.nrays,
            "nscales": self.nscales,
            "nlams": len(self.lams),
            "dim": n,
            "coords_num": coords_num,
            "coords_den": coords_den,
            "scale_num": scale_num,
            "scale_den": scale_den,
            "lam_num": lam_num,
            "lam_den": lam_den,
            "rel": rel_flat,
            "rel0": [1 if v else 0 for v in self.rel0],
            "ratio_idx": ratio_flat,
            "hsum_num": hsum_num,
            "hsum_den": hsum_den,
            "hpt_num": hpt_num,
            "hpt_den": hpt_den,
            "px": list(self.px),
            "certified": 1 if self.certified else 0,
            "zero_admissible": 1 if self.zero_admissible else 0,
        }

    @classmethod
    def build(cls, inst) -> "SweepTables":
        if Fraction(1) not in inst.carrier.scales:
            raise ValidationError("carrier scale grid must contain 1")
        return cls(inst)
