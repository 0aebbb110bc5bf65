"""Command line driver: load instance files, run checks, emit reports.

Exit codes: 0 success, 1 mathematical or validation failure (with witness),
2 I/O or schema error. Reports are canonical JSON (sorted keys) written to
stdout or --out; wall-clock timing goes to stderr only, so reports are
byte-identical across runs with the same file and seed.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .comonotone import (
    GridFunction,
    approximate_strict_pair,
    choquet_integral,
    comono_envelope_check,
    comonotone_decompose,
)
from .core import Point, ValidationError
from .engine import (
    conjecture_probe,
    envelope,
    extend_functional,
    iterate_sandwich,
    verify_toolkit,
)
from .engine.backend import active_backend
from .fileio import (
    InstanceFile,
    SchemaError,
    canonical_json,
    jsonable,
    load_instance_file,
    point_to_json,
)
from .relations import check_ccsp_axioms, check_collapse, check_summand_axioms

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_SCHEMA = 2

_FIXTURE_ENV = "CONESANDWICH_FIXTURES"


def fixtures_dir() -> Path:
    """Bundled fixture directory, overridable via CONESANDWICH_FIXTURES."""
    override = os.environ.get(_FIXTURE_ENV)
    if override:
        return Path(override)
    return Path(__file__).parent / "fixtures"


def _emit(report: dict, out: Optional[str]) -> None:
    text = canonical_json(jsonable(report))
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _sample_for(f: InstanceFile, sample_size: Optional[int], seed: int) -> list[Point]:
    sample = list(f.sample)
    if not sample:
        rng = random.Random(seed)
        if f.carrier is not None:
            sample.extend(f.carrier.rays)
        want = sample_size or 12
        while len(sample) < want:
            coords = tuple(
                Fraction(rng.randint(-3, 3)) for _ in range(f.dimension)
            )
            sample.append(Point(coords))
    if sample_size is not None:
        sample = sample[:sample_size]
    return sample


def cmd_check_preorder(args) -> int:
    f = load_instance_file(args.file)
    if f.relation is None:
        raise SchemaError("check-preorder needs a relation section")
    sample = _sample_for(f, args.sample_size, args.seed)
    scales = f.carrier.scales if f.carrier is not None else (
        Fraction(1, 2),
        Fraction(1),
        Fraction(2),
    )
    cap = max(len(sample), 64)
    report = check_ccsp_axioms(f.relation, sample, scales=scales, sample_cap=cap)
    collapse = check_collapse(f.relation, sample)
    summand = None
    if args.summand:
        summand = check_summand_axioms(
            f.relation, sample, n_max=args.n_max, sample_cap=cap
        )
    ok = report.all_passed and collapse.consistent
    if summand is not None:
        ok = ok and summand.all_passed
    out = {
        "command": "check-preorder",
        "instance": f.digest,
        "name": f.name,
        "relation": f.relation.describe(),
        "sample_size": len(sample),
        "axioms": report,
        "collapse": collapse,
        "summand": summand,
        "exit_status": EXIT_OK if ok else EXIT_FAIL,
    }
    _emit(out, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def _trace_summary(trace) -> dict:
    return {
        "backend": trace.backend,
        "converged": trace.converged,
        "sweeps": trace.sweep_count,
        "additivity_residual": trace.additivity_residual,
        "residual_pairs": trace.residual_pairs,
        "per_sweep": [
            {
                "index": r.index,
                "max_increase": r.max_increase,
                "promotions": r.promotions,
                "updated": r.updated,
                "sandwich_ok": r.sandwich_ok,
                "majorant_violations": r.majorant_violations,
            }
            for r in trace.records
        ],
    }


def cmd_sandwich(args) -> int:
    f = load_instance_file(args.file)
    try:
        inst = f.instance(tol=args.tol, mode=args.mode, feasibility=args.feasibility)
    except ValidationError as exc:
        _emit(
            {
                "command": "sandwich",
                "instance": f.digest,
                "name": f.name,
                "validation_error": str(exc),
                "exit_status": EXIT_FAIL,
            },
            args.out,
        )
        return EXIT_FAIL
    q, trace = iterate_sandwich(inst)
    toolkit = verify_toolkit(inst, q)
    report = {
        "command": "sandwich",
        "instance": f.digest,
        "name": f.name,
        "q_rays": [
            {"ray": point_to_json(r), "value": q.evaluate(r)}
            for r in inst.carrier.rays
        ],
        "trace": _trace_summary(trace),
        "toolkit": toolkit,
        "exit_status": EXIT_OK,
    }
    _emit(report, args.out)
    return EXIT_OK


def cmd_extend(args) -> int:
    f = load_instance_file(args.file)
    try:
        inst = f.instance(tol=args.tol, mode=args.mode, feasibility=args.feasibility)
        ell, domain = f.extension_parts()
        q, rep = extend_functional(inst, ell, domain)
    except ValidationError as exc:
        _emit(
            {
                "command": "extend",
                "instance": f.digest,
                "name": f.name,
                "validation_error": str(exc),
                "exit_status": EXIT_FAIL,
            },
            args.out,
        )
        return EXIT_FAIL
    status = EXIT_OK if rep.passed else EXIT_FAIL
    report = {
        "command": "extend",
        "instance": f.digest,
        "name": f.name,
        "q_rays": [
            {"ray": point_to_json(r), "value": q.evaluate(r)}
            for r in inst.carrier.rays
        ],
        "restriction_ok": rep.restriction_ok,
        "bound_ok": rep.bound_ok,
        "restriction_violations": rep.restriction_violations,
        "bound_violations": rep.bound_violations,
        "trace": _trace_summary(rep.trace),
        "exit_status": status,
    }
    _emit(report, args.out)
    return status


def cmd_envelope(args) -> int:
    f = load_instance_file(args.file)
    try:
        inst = f.instance(tol=args.tol, mode=args.mode, feasibility=args.feasibility)
        members, rep = envelope(inst)
    except ValidationError as exc:
        _emit(
            {
                "command": "envelope",
                "instance": f.digest,
                "name": f.name,
                "validation_error": str(exc),
                "exit_status": EXIT_FAIL,
            },
            args.out,
        )
        return EXIT_FAIL
    status = EXIT_OK if rep.passed else EXIT_FAIL
    report = {
        "command": "envelope",
        "instance": f.digest,
        "name": f.name,
        "rays": [
            {
                "ray": point_to_json(r.ray),
                "h": r.h_value,
                "q": r.q_value,
                "attained": r.attained,
                "bound_ok": r.bound_ok,
                "converged": r.converged,
                "error": r.error,
            }
            for r in rep.per_ray
        ],
        "family_attains_h": rep.family_attains_h,
        "skipped_bottom_rays": rep.skipped_bottom_rays,
        "exit_status": status,
    }
    _emit(report, args.out)
    return status


def cmd_comono(args) -> int:
    f = load_instance_file(args.file)
    sec = f.comono_section()
    sub = args.subcommand
    if sub == "decompose":
        x = Point(tuple(Fraction(v) for v in sec["x"]))
        y = Point(tuple(Fraction(v) for v in sec["y"]))
        try:
            dec = comonotone_decompose(x, y)
        except ValidationError as exc:
            _emit(
                {
                    "command": "comono decompose",
                    "instance": f.digest,
                    "error": str(exc),
                    "exit_status": EXIT_FAIL,
                },
                args.out,
            )
            return EXIT_FAIL
        exact = all(
            dec.h(z) == xv and dec.g(z) == yv
            for z, xv, yv in zip(dec.z.coords, x.coords, y.coords)
        )
        report = {
            "command": "comono decompose",
            "instance": f.digest,
            "z": point_to_json(dec.z),
            "h_nodes": [[v for v in dec.h.xs], [v for v in dec.h.ys]],
            "g_nodes": [[v for v in dec.g.xs], [v for v in dec.g.ys]],
            "reconstruction_exact": exact,
            "h_max_slope": dec.h.max_slope(),
            "g_max_slope": dec.g.max_slope(),
            "exit_status": EXIT_OK if exact else EXIT_FAIL,
        }
        _emit(report, args.out)
        return EXIT_OK if exact else EXIT_FAIL
    if sub == "approx":
        x = f.grid_function("x_grid")
        y = f.grid_function("y_grid")
        ladder = [Fraction(v) for v in sec.get("eps_ladder", ["1/4", "1/8", "1/16"])]
        rungs = []
        ok = True
        prev_delta = None
        for eps in ladder:
            try:
                xn, yn, rep = approximate_strict_pair(x, y, eps)
            except ValidationError as exc:
                rungs.append({"eps": eps, "error": str(exc)})
                ok = False
                continue
            mono = prev_delta is None or rep.delta <= prev_delta
            prev_delta = rep.delta
            ok = ok and rep.strictly_comonotonic and mono
            rungs.append(
                {
                    "eps": eps,
                    "strictly_comonotonic": rep.strictly_comonotonic,
                    "delta": rep.delta,
                    "delta_x": rep.delta_x,
                    "delta_y": rep.delta_y,
                    "z_perturbation": rep.z_perturbation,
                    "grid_cells": rep.grid_cells,
                    "short_circuit": rep.short_circuit,
                    "nonincreasing": mono,
                }
            )
        report = {
            "command": "comono approx",
            "instance": f.digest,
            "ladder": rungs,
            "exit_status": EXIT_OK if ok else EXIT_FAIL,
        }
        _emit(report, args.out)
        return EXIT_OK if ok else EXIT_FAIL
    if sub == "choquet":
        cap_name = sec.get("capacity")
        if cap_name not in f.capacities:
            raise SchemaError(f"comono.capacity: unknown capacity {cap_name!r}")
        x = Point(tuple(Fraction(v) for v in sec["x"]))
        value = choquet_integral(x, f.capacities[cap_name])
        report = {
            "command": "comono choquet",
            "instance": f.digest,
            "x": point_to_json(x),
            "capacity": cap_name,
            "value": value,
            "exit_status": EXIT_OK,
        }
        _emit(report, args.out)
        return EXIT_OK
    if sub == "envelope":
        if f.carrier is None:
            raise SchemaError("comono envelope needs a carrier")
        h = f.functionals.get(f.raw.get("majorant", ""))
        if h is None:
            raise SchemaError("comono envelope needs a named majorant")
        try:
            rep = comono_envelope_check(h, f.carrier)
        except ValidationError as exc:
            _emit(
                {
                    "command": "comono envelope",
                    "instance": f.digest,
                    "error": str(exc),
                    "exit_status": EXIT_FAIL,
                },
                args.out,
            )
            return EXIT_FAIL
        status = EXIT_OK if rep.passed else EXIT_FAIL
        report = {
            "command": "comono envelope",
            "instance": f.digest,
            "members": rep.members,
            "attained_everywhere": rep.attained_everywhere,
            "members_below": rep.members_below,
            "members_additive": rep.members_additive,
            "never_attaining": list(rep.never_attaining),
            "exit_status": status,
        }
        _emit(report, args.out)
        return status
    raise SchemaError(f"unknown comono subcommand {sub!r}")


def cmd_probe(args) -> int:
    f = load_instance_file(args.file)
    cfg = f.probe_config()
    rep = conjecture_probe(cfg, trials=args.trials, seed=args.seed)
    report = {
        "command": "probe",
        "instance": f.digest,
        "report": rep,
        "exit_status": EXIT_OK,
    }
    _emit(report, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conesandwich",
        description=(
            "Sandwich constructions for relation-restricted sublinear "
            "functionals on finite rational cone carriers."
        ),
        epilog=(
            f"Fixture directory override: ${_FIXTURE_ENV}. "
            f"Active engine backend: {active_backend()} "
            "(set CONESANDWICH_PURE=1 to force pure Python)."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", help="instance file (JSON)")
        p.add_argument("--out", help="write the report here instead of stdout")

    def engine_flags(p):
        p.add_argument("--tol", help="override the stopping tolerance (rational)")
        p.add_argument(
            "--mode", choices=["conic", "summand"], help="override the mode"
        )
        p.add_argument(
            "--feasibility",
            choices=["certified", "exploratory"],
            help="override the feasibility mode",
        )

    p = sub.add_parser("check-preorder", help="run the relation axiom checks")
    common(p)
    p.add_argument("--sample-size", type=int, help="cap or target sample size")
    p.add_argument("--seed", type=int, default=0, help="sample generator seed")
    p.add_argument(
        "--summand",
        action="store_true",
        help="also run the summand-preorder checks",
    )
    p.add_argument("--n-max", type=int, default=4, help="summand divisor bound")
    p.set_defaults(func=cmd_check_preorder)

    p = sub.add_parser("sandwich", help="run the improvement iteration")
    common(p)
    engine_flags(p)
    p.set_defaults(func=cmd_sandwich)

    p = sub.add_parser("extend", help="extend a partial additive functional")
    common(p)
    engine_flags(p)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("envelope", help="per-ray envelope construction")
    common(p)
    engine_flags(p)
    p.set_defaults(func=cmd_envelope)

    p = sub.add_parser("comono", help="comonotonicity tools")
    p.add_argument(
        "subcommand", choices=["decompose", "approx", "choquet", "envelope"]
    )
    common(p)
    p.set_defaults(func=cmd_comono)

    p = sub.add_parser("probe", help="randomized counterexample-candidate search")
    common(p)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_probe)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.monotonic()
    try:
        status = args.func(args)
    except SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except ValidationError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    finally:
        elapsed = time.monotonic() - start
        print(f"elapsed: {elapsed:.3f}s", file=sys.stderr)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
