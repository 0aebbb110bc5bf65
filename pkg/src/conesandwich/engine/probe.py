"""Randomized search for counterexample candidates to the finite-valued
extension and envelope questions.

Each trial builds a validated instance with a finite-valued majorant, then
asks, ray by ray, whether some finite additive-on-related-pairs ray table
sits below H and attains it at that ray (envelope kind) or dominates a
scaled one-ray functional (extension kind). A failed exact feasibility
search is recorded as a *candidate* only: the carrier discretization means
no failure here refutes anything.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..core import Carrier, Point, ValidationError
from ..feasibility import check_feasibility
from ..functionals import Linear, MaxOf
from ..relations import Full, RayD, RelationSpec, StrictComonotone
from .instance import make_instance

_RELATIONS = {
    "full": Full,
    "ray_d": RayD,
    "strict_comonotone": StrictComonotone,
}


@dataclass(frozen=True)
class ProbeConfig:
    dimension: int = 2
    relation_kind: str = "full"
    n_rays: int = 3
    max_coord: int = 5
    h_rows: int = 2
    closure_depth: int = 1
    probe_kind: str = "envelope"  # or "extension"

    def describe(self) -> dict:
        return {
            "dimension": self.dimension,
            "relation_kind": self.relation_kind,
            "n_rays": self.n_rays,
            "max_coord": self.max_coord,
            "h_rows": self.h_rows,
            "closure_depth": self.closure_depth,
            "probe_kind": self.probe_kind,
        }


@dataclass(frozen=True)
class ProbeCandidate:
    trial: int
    rays: tuple[str, ...]
    target_ray: str
    note: str


@dataclass(frozen=True)
class ProbeReport:
    config: dict
    trials: int
    seed: int
    instances_checked: int
    rays_checked: int
    candidates: tuple[ProbeCandidate, ...]
    budget_exceeded: int

    @property
    def candidate_count(self) -> int:
        return len(self.candidates)


def _random_rays(cfg: ProbeConfig, rng: random.Random) -> list[Point]:
    rays: list[Point] = []
    seen: set = set()
    guard = 0
    while len(rays) < cfg.n_rays and guard < 200:
        guard += 1
        if cfg.relation_kind == "strict_comonotone":
            vals = rng.sample(range(1, cfg.max_coord + cfg.dimension + 1), cfg.dimension)
            vals.sort()
            coords = tuple(Fraction(v) for v in vals)
        else:
            coords = tuple(
                Fraction(rng.randint(0, cfg.max_coord)) for _ in range(cfg.dimension)
            )
            if all(c == 0 for c in coords):
                continue
        p = Point(coords)
        total = sum(abs(c) for c in coords)
        unit = tuple(c / total for c in coords)
        if unit in seen:
            continue
        seen.add(unit)
        rays.append(p)
    return rays


def _random_majorant(cfg: ProbeConfig, rng: random.Random) -> MaxOf:
    rows = []
    for _ in range(cfg.h_rows):
        w = [Fraction(rng.randint(0, 4)) for _ in range(cfg.dimension)]
        if all(v == 0 for v in w):
            w[rng.randrange(cfg.dimension)] = Fraction(1)
        rows.append(Linear(w))
    return MaxOf(rows)


def _additivity_equalities(carrier: Carrier, relation: RelationSpec):
    """One equality per related point pair whose sum lands on a carrier ray."""
    pts = carrier.points()
    labels = carrier.point_labels()
    nrays = len(carrier.rays)
    eqs = []
    seen = set()
    for i, x in enumerate(pts):
        for j in range(i, len(pts)):
            y = pts[j]
            if not relation.relates(x, y):
                continue
            s = x + y
            coeffs = [Fraction(0)] * nrays
            ri, si = labels[i]
            rj, sj = labels[j]
            coeffs[ri] -= si
            coeffs[rj] -= sj
            if not s.is_zero():
                loc = carrier.locate(s)
                if loc is None:
                    continue
                coeffs[loc[0]] += loc[1]
            key = tuple(coeffs)
            if key in seen or all(c == 0 for c in coeffs):
                continue
            seen.add(key)
            eqs.append((coeffs, Fraction(0)))
    return eqs


def conjecture_probe(
    config: ProbeConfig, trials: int, seed: int
) -> ProbeReport:
    """Deterministic randomized probe; identical seeds give identical reports."""
    if config.relation_kind not in _RELATIONS:
        raise ValidationError(f"unknown probe relation {config.relation_kind!r}")
    if config.probe_kind not in ("envelope", "extension"):
        raise ValidationError(f"unknown probe kind {config.probe_kind!r}")
    rng = random.Random(seed)
    candidates: list[ProbeCandidate] = []
    exceeded = 0
    instances = 0
    rays_checked = 0
    for trial in range(trials):
        rays = _random_rays(config, rng)
        scale_c = Fraction(rng.randint(1, 4), rng.randint(1, 4))
        if len(rays) < 2:
            continue
        relation = _RELATIONS[config.relation_kind](config.dimension)
        h = _random_majorant(config, rng)
        try:
            carrier = Carrier.build(rays, (1,), config.closure_depth)
            inst = make_instance(
                carrier,
                relation,
                p=Linear([0] * config.dimension),
                h=h,
                lambda_grid=(0, 1),
                validate=False,
                name=f"probe-{trial}",
            )
        except ValidationError:
            continue
        instances += 1
        closed = inst.carrier
        nrays = len(closed.rays)
        eqs = _additivity_equalities(closed, relation)
        bound_ineqs = []
        h_at = [h.evaluate(r) for r in closed.rays]
        for ridx in range(nrays):
            coeffs = [Fraction(0)] * nrays
            coeffs[ridx] = Fraction(1)
            bound_ineqs.append((coeffs, h_at[ridx]))
        ray_names = tuple(str(r) for r in closed.rays)
        for ridx in range(nrays):
            rays_checked += 1
            if config.probe_kind == "envelope":
                anchor_eqs = eqs + [
                    (
                        [
                            Fraction(1) if k == ridx else Fraction(0)
                            for k in range(nrays)
                        ],
                        h_at[ridx],
                    )
                ]
                res = check_feasibility(nrays, anchor_eqs, bound_ineqs)
            else:
                target = scale_c if scale_c <= 1 else Fraction(1, 2)
                floor_ineq = (
                    [
                        Fraction(-1) if k == ridx else Fraction(0)
                        for k in range(nrays)
                    ],
                    -target * h_at[ridx],
                )
                res = check_feasibility(
                    nrays, eqs, bound_ineqs + [floor_ineq]
                )
            if res.budget_exceeded:
                exceeded += 1
            elif res.feasible is False:
                candidates.append(
                    ProbeCandidate(
                        trial=trial,
                        rays=ray_names,
                        target_ray=ray_names[ridx],
                        note=(
                            "no finite additive ray table found; carrier "
                            "discretization caveats apply"
                        ),
                    )
                )
    return ProbeReport(
        config=config.describe(),
        trials=trials,
        seed=seed,
        instances_checked=instances,
        rays_checked=rays_checked,
        candidates=tuple(candidates),
        budget_exceeded=exceeded,
    )
