#!/usr/bin/env python3
"""Regenerate the bundled instance fixtures under src/conesandwich/fixtures.

Every worked relation example and non-example ships as an instance file, as
do the engine demos (sandwich, extension, envelope, summand) and a toolkit
bundle spanning dimensions 2-4 and the three main relation kinds.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIXDIR = ROOT / "src" / "conesandwich" / "fixtures"


def S(v) -> str:
    return str(Fraction(v))


def lin(*w):
    return {"form": "linear", "weights": [S(v) for v in w]}


def maxof(*members):
    return {"form": "max", "members": list(members)}


def minof(*members):
    return {"form": "min", "members": list(members)}


def axes(dim):
    return [lin(*[1 if i == j else 0 for j in range(dim)]) for i in range(dim)]


def write(relpath: str, obj: dict) -> None:
    path = FIXDIR / relpath
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", "utf-8")
    print(f"wrote {path.relative_to(ROOT)}")


def base(name, dim, **extra):
    obj = {"version": 1, "name": name, "dimension": dim, "seed": 0}
    obj.update(extra)
    return obj


def relation_fixture(name, dim, relation, sample, **extra):
    return base(
        name,
        dim,
        relation=relation,
        sample=[[S(c) for c in p] for p in sample],
        **extra,
    )


def main() -> int:
    # ---- relation examples -------------------------------------------------
    write(
        "relations/full_r2.json",
        relation_fixture(
            "full_r2",
            2,
            {"kind": "full"},
            [(0, 0), (1, 0), (0, 1), (1, 1), (-1, 2), (2, 1)],
        ),
    )
    write(
        "relations/ray_d_r2.json",
        relation_fixture(
            "ray_d_r2",
            2,
            {"kind": "ray_d"},
            [(1, 0), (2, 0), (0, 1), (0, 3), (1, 1), (Fraction(5), 0)],
        ),
    )
    write(
        "relations/strict_comono_r3.json",
        relation_fixture(
            "strict_comono_r3",
            3,
            {"kind": "strict_comonotone"},
            [(1, 2, 3), (0, 1, 5), (2, 4, 6), (1, 3, 4), (5, 6, 9)],
        ),
    )
    write(
        "relations/equivalent_measures_r3.json",
        relation_fixture(
            "equivalent_measures_r3",
            3,
            {"kind": "equivalent_measures"},
            [(1, 2, 0), (3, 1, 0), (0, 1, 1), (2, 2, 2), (1, 0, 0)],
        ),
    )
    # affinity: includes x = -y + e style triples that break additive closure
    write(
        "relations/affinity_r2.json",
        relation_fixture(
            "affinity_r2",
            2,
            {"kind": "affinity", "e": ["1", "1"]},
            [(1, 2), (-1, 0), (2, 3), (0, 1), (3, 1)],
        ),
    )
    # corr non-example on a 2-cell grid of [0,1]:
    # f = 1 on [0,1], g = 1 on [0,1/2], h = -1 on [1/2,1]
    write(
        "relations/corr_grid2.json",
        relation_fixture(
            "corr_grid2",
            2,
            {"kind": "corr"},
            [(1, 1), (1, 0), (0, -1)],
        ),
    )
    write(
        "relations/phi_r1.json",
        relation_fixture("phi_r1", 1, {"kind": "phi"}, [(1,), (-1,), (0,)]),
    )
    # overlapping extensional classes: zero trigger fires, fullness fails
    write(
        "relations/collapse_overlap.json",
        relation_fixture(
            "collapse_overlap",
            2,
            {
                "kind": "extensional",
                "classes": [
                    [["0", "0"], ["1", "0"]],
                    [["0", "0"], ["0", "1"]],
                ],
            },
            [(0, 0), (1, 0), (0, 1)],
        ),
    )

    # ---- engine demos ------------------------------------------------------
    minmax = base(
        "minmax_full_r2",
        2,
        carrier={
            "rays": [["1", "0"], ["0", "1"]],
            "scales": ["1/2", "1", "2"],
            "closure_depth": 1,
        },
        relation={"kind": "full"},
        functionals={
            "P": minof(*axes(2)),
            "H": maxof(*axes(2)),
        },
        minorant="P",
        majorant="H",
        lambda_grid=["0", "1/2", "1", "2"],
        mode="conic",
        feasibility_mode="certified",
        tol="0",
        max_sweeps=16,
    )
    write("engine/minmax_full_r2.json", minmax)

    exploratory = dict(minmax)
    exploratory["name"] = "minmax_exploratory_r2"
    exploratory["feasibility_mode"] = "exploratory"
    write("engine/minmax_exploratory_r2.json", exploratory)

    write(
        "engine/linear_tight_r2.json",
        base(
            "linear_tight_r2",
            2,
            carrier={
                "rays": [["1", "0"], ["0", "1"], ["1", "1"]],
                "scales": ["1", "2"],
                "closure_depth": 1,
            },
            relation={"kind": "full"},
            functionals={"W": lin("1/3", "2/3")},
            minorant="W",
            majorant="W",
            lambda_grid=["0", "1"],
            tol="0",
            max_sweeps=8,
        ),
    )

    extension = dict(minmax)
    extension["name"] = "extension_ray_r2"
    extension["carrier"] = {
        "rays": [["1", "0"], ["0", "1"], ["1", "1"]],
        "scales": ["1/2", "1", "2"],
        "closure_depth": 1,
    }
    extension["functionals"] = {
        "P": minof(*axes(2)),
        "H": maxof(*axes(2)),
        "ell": {"form": "ray", "base": ["1", "1"], "value": "1"},
    }
    extension["extension"] = {
        "ell": "ell",
        "domain": {"cone": "ray", "ray": ["1", "1"]},
    }
    write("engine/extension_ray_r2.json", extension)

    # 32-ray fan in the positive quadrant for the envelope demo
    fan = [[S(k), S(33 - k)] for k in range(1, 33)]
    write(
        "engine/envelope_max_r2_32.json",
        base(
            "envelope_max_r2_32",
            2,
            carrier={"rays": fan, "scales": ["1"], "closure_depth": 0},
            relation={"kind": "full"},
            functionals={
                "P": minof(*axes(2)),
                "H": maxof(*axes(2)),
            },
            minorant="P",
            majorant="H",
            lambda_grid=["0", "1/2", "1"],
            tol="0",
            max_sweeps=8,
        ),
    )

    # strictly comonotone rays (increasing coordinates) with Choquet majorant
    nu1 = {"1": "1/4", "2": "1/2", "3": "1"}
    nu2 = {"1": "3/5", "2": "1/5", "3": "1"}
    comono_rays = [["1", "2"], ["1", "3"], ["2", "3"], ["1", "4"], ["3", "4"], ["2", "5"]]
    write(
        "engine/envelope_choquet_r2.json",
        base(
            "envelope_choquet_r2",
            2,
            capacities={
                "nu1": {"ground": 2, "values": nu1},
                "nu2": {"ground": 2, "values": nu2},
            },
            carrier={"rays": comono_rays, "scales": ["1/2", "1"], "closure_depth": 1},
            relation={"kind": "strict_comonotone"},
            functionals={
                "Z": lin(0, 0),
                "H": {
                    "form": "max",
                    "members": [
                        {"form": "choquet", "capacity": "nu1"},
                        {"form": "choquet", "capacity": "nu2"},
                    ],
                },
            },
            minorant="Z",
            majorant="H",
            lambda_grid=["0", "1/2", "1"],
            tol="0",
            max_sweeps=8,
        ),
    )

    summand = dict(minmax)
    summand["name"] = "summand_minmax_r2"
    summand["mode"] = "summand"
    summand["n_max"] = 3
    summand.pop("lambda_grid")
    summand["lambda_grid"] = ["0", "1"]
    summand["tol"] = "1/1024"
    write("engine/summand_minmax_r2.json", summand)

    # ---- toolkit bundle (>= 20 instances, dims 2-4, three relations) ------
    def unit_rays(dim):
        rays = [[S(1 if i == j else 0) for j in range(dim)] for i in range(dim)]
        rays.append([S(1)] * dim)
        return rays

    def increasing_rays(dim, count):
        rays = []
        start = 1
        for k in range(count):
            coords = [start + k + 2 * j for j in range(dim)]
            rays.append([S(c) for c in coords])
        return rays

    def capacity_for(dim):
        values = {}
        for mask in range(1, 1 << dim):
            size = bin(mask).count("1")
            values[str(mask)] = S(Fraction(size * size, dim * dim))
        return {"ground": dim, "values": values}

    idx = 0
    for dim in (2, 3, 4):
        for rel_kind in ("full", "ray_d", "strict_comonotone"):
            for variant in ("min", "second"):
                if rel_kind == "strict_comonotone":
                    rays = increasing_rays(dim, 3)
                else:
                    rays = unit_rays(dim)
                caps = {}
                if variant == "min":
                    p_spec = minof(*axes(dim))
                    p_name = "P_min"
                else:
                    if rel_kind == "strict_comonotone":
                        caps["nu"] = capacity_for(dim)
                        p_spec = {"form": "choquet", "capacity": "nu"}
                        p_name = "P_choquet"
                    else:
                        p_spec = lin(*[S(Fraction(1, 2 * dim))] * dim)
                        p_name = "P_linear"
                obj = base(
                    f"toolkit_{idx:02d}_{rel_kind}_d{dim}_{p_name}",
                    dim,
                    carrier={
                        "rays": rays,
                        "scales": ["1/2", "1", "2"],
                        "closure_depth": 1,
                    },
                    relation={"kind": rel_kind},
                    functionals={p_name: p_spec, "H": maxof(*axes(dim))},
                    minorant=p_name,
                    majorant="H",
                    lambda_grid=["0", "1/2", "1", "2"],
                    tol="1/1024",
                    max_sweeps=12,
                )
                if caps:
                    obj["capacities"] = caps
                write(f"toolkit/tk_{idx:02d}.json", obj)
                idx += 1
    # three grid variants to round the bundle past twenty
    for extra, (dim, grid) in enumerate(
        [(2, ["0", "1"]), (3, ["0", "1", "3"]), (2, ["0", "1/4", "1/2", "1", "4"])]
    ):
        obj = base(
            f"toolkit_{idx:02d}_full_d{dim}_grid{extra}",
            dim,
            carrier={
                "rays": unit_rays(dim),
                "scales": ["1/2", "1", "2"],
                "closure_depth": 1,
            },
            relation={"kind": "full"},
            functionals={"P": minof(*axes(dim)), "H": maxof(*axes(dim))},
            minorant="P",
            majorant="H",
            lambda_grid=grid,
            tol="1/1024",
            max_sweeps=12,
        )
        write(f"toolkit/tk_{idx:02d}.json", obj)
        idx += 1

    # ---- comonotone fixtures ----------------------------------------------
    n = 8
    ind_half = [S(1 if Fraction(k, n) >= Fraction(1, 2) else 0) for k in range(n + 1)]
    ind_quarter = [S(1 if Fraction(k, n) >= Fraction(3, 4) else 0) for k in range(n + 1)]
    write(
        "comono/indicator_pair.json",
        base(
            "indicator_pair",
            2,
            comono={
                "x_grid": ind_half,
                "y_grid": ind_quarter,
                "eps_ladder": ["1/4", "1/8", "1/16"],
            },
        ),
    )
    ramp = [S(Fraction(k, n)) for k in range(n + 1)]
    half_ramp = [S(Fraction(k, 2 * n)) for k in range(n + 1)]
    write(
        "comono/proportional_pair.json",
        base(
            "proportional_pair",
            2,
            comono={
                "x_grid": half_ramp,
                "y_grid": ramp,
                "eps_ladder": ["1/4", "1/8", "1/16"],
            },
        ),
    )
    write(
        "comono/constant_pair.json",
        base(
            "constant_pair",
            2,
            comono={
                "x_grid": [S(1)] * (n + 1),
                "y_grid": ramp,
                "eps_ladder": ["1/4", "1/8", "1/16"],
            },
        ),
    )
    write(
        "comono/decompose_pair.json",
        base("decompose_pair", 2, comono={"x": ["1", "3"], "y": ["2", "4"]}),
    )
    write(
        "comono/choquet_example.json",
        base(
            "choquet_example",
            2,
            capacities={
                "nu": {"ground": 2, "values": {"1": "3/10", "2": "1/2", "3": "1"}}
            },
            comono={"x": ["4", "1"], "capacity": "nu"},
        ),
    )
    write(
        "comono/comono_envelope.json",
        base(
            "comono_envelope",
            2,
            capacities={
                "nu1": {"ground": 2, "values": nu1},
                "nu2": {"ground": 2, "values": nu2},
            },
            carrier={"rays": comono_rays, "scales": ["1"], "closure_depth": 0},
            functionals={
                "H": {
                    "form": "max",
                    "members": [
                        {"form": "choquet", "capacity": "nu1"},
                        {"form": "choquet", "capacity": "nu2"},
                    ],
                }
            },
            majorant="H",
        ),
    )

    # ---- probe config ------------------------------------------------------
    write(
        "probe/probe_full.json",
        base(
            "probe_full",
            2,
            probe={
                "dimension": 2,
                "relation_kind": "full",
                "n_rays": 3,
                "max_coord": 5,
                "h_rows": 2,
                "closure_depth": 1,
                "probe_kind": "envelope",
            },
        ),
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
