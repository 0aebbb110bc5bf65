"""The versioned JSON instance format and canonical report serialization.

Rationals travel as "p/q" strings (with "-inf" for the bottom element), so
parse -> serialize -> parse round-trips exactly. Reports serialize with
sorted keys and fixed separators, which is what makes repeated runs with
the same file and seed byte-identical.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any, Optional

from .capacities import Capacity
from .comonotone import GridFunction, StepFunction
from .core import (
    Carrier,
    ExtReal,
    OrderSpec,
    Point,
    ValidationError,
    as_fraction,
    ext_from_str,
    ext_to_str,
)
from .engine import ProbeConfig, SandwichInstance, make_instance
from .functionals import (
    Choquet,
    ConeDomain,
    Functional,
    Linear,
    MaxOf,
    MinOf,
    MinusInfExtension,
    RayFunctional,
    RayTable,
    ScaleOf,
)
from .relations import (
    Affinity,
    Corr,
    EquivalentMeasures,
    Extensional,
    Full,
    PhiRelation,
    RayD,
    RelationSpec,
    StrictComonotone,
)

FORMAT_VERSION = 1


class SchemaError(ValueError):
    """The instance file is malformed (maps to exit code 2)."""


def _frac(v: Any, where: str) -> Fraction:
    try:
        return as_fraction(v)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: not a rational: {v!r}") from exc


def _point(v: Any, where: str) -> Point:
    if not isinstance(v, list) or not v:
        raise SchemaError(f"{where}: expected a coordinate list")
    return Point(tuple(_frac(c, where) for c in v))


def point_to_json(p: Point) -> list[str]:
    return [str(c) for c in p.coords]


def parse_relation(obj: Any, dimension: int) -> RelationSpec:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SchemaError("relation: expected an object with a 'kind'")
    kind = obj["kind"]
    if kind == "full":
        return Full(dimension)
    if kind == "ray_d":
        return RayD(dimension)
    if kind == "strict_comonotone":
        return StrictComonotone(dimension)
    if kind == "equivalent_measures":
        return EquivalentMeasures(dimension)
    if kind == "corr":
        return Corr(dimension)
    if kind == "phi":
        return PhiRelation(dimension)
    if kind == "affinity":
        if "e" not in obj:
            raise SchemaError("relation: affinity needs its direction 'e'")
        return Affinity(_point(obj["e"], "relation.e"))
    if kind == "extensional":
        classes = obj.get("classes")
        if not isinstance(classes, list):
            raise SchemaError("relation: extensional needs 'classes'")
        parsed = [
            [_point(p, "relation.classes") for p in cls] for cls in classes
        ]
        return Extensional(parsed, dimension)
    raise SchemaError(f"relation: unknown kind {kind!r}")


def relation_to_json(r: RelationSpec) -> dict:
    out: dict[str, Any] = {"kind": r.kind}
    if isinstance(r, Affinity):
        out["e"] = point_to_json(r.e)
    if isinstance(r, Extensional):
        out["classes"] = [
            [list(map(str, coords)) for coords in sorted(cls)]
            for cls in r.classes
        ]
    return out


def parse_domain(obj: Any) -> ConeDomain:
    if not isinstance(obj, dict) or "cone" not in obj:
        raise SchemaError("domain: expected an object with a 'cone'")
    if obj["cone"] == "all":
        return ConeDomain.whole_space()
    if obj["cone"] == "ray":
        return ConeDomain.of_ray(_point(obj["ray"], "domain.ray"))
    raise SchemaError(f"domain: unknown cone kind {obj['cone']!r}")


def parse_functional(
    obj: Any, dimension: int, capacities: dict[str, Capacity]
) -> Functional:
    if not isinstance(obj, dict) or "form" not in obj:
        raise SchemaError("functional: expected an object with a 'form'")
    form = obj["form"]
    if form == "linear":
        weights = [_frac(w, "linear.weights") for w in obj["weights"]]
        if len(weights) != dimension:
            raise SchemaError("linear: weight count differs from dimension")
        return Linear(weights)
    if form in ("max", "min"):
        members = [
            parse_functional(m, dimension, capacities) for m in obj["members"]
        ]
        return MaxOf(members) if form == "max" else MinOf(members)
    if form == "choquet":
        name = obj.get("capacity")
        if name not in capacities:
            raise SchemaError(f"choquet: unknown capacity {name!r}")
        return Choquet(capacities[name])
    if form == "scale":
        return ScaleOf(
            _frac(obj["c"], "scale.c"),
            parse_functional(obj["inner"], dimension, capacities),
        )
    if form == "ray_table":
        entries = []
        for e in obj.get("entries", []):
            entries.append(
                (_point(e["ray"], "ray_table.ray"), ext_from_str(e["value"]))
            )
        return RayTable(entries, dimension)
    if form == "minus_inf":
        return MinusInfExtension(
            parse_functional(obj["inner"], dimension, capacities),
            parse_domain(obj["domain"]),
        )
    if form == "ray":
        return RayFunctional(
            _point(obj["base"], "ray.base"), _frac(obj["value"], "ray.value")
        )
    raise SchemaError(f"functional: unknown form {form!r}")


def parse_capacities(obj: Any) -> dict[str, Capacity]:
    caps: dict[str, Capacity] = {}
    if obj is None:
        return caps
    if not isinstance(obj, dict):
        raise SchemaError("capacities: expected an object")
    for name, spec in obj.items():
        try:
            ground = int(spec["ground"])
            values = {
                int(mask): _frac(v, f"capacity {name}")
                for mask, v in spec.get("values", {}).items()
            }
            caps[name] = Capacity.from_mask_table(ground, values)
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"capacities.{name}: {exc}") from exc
    return caps


class InstanceFile:
    """Parsed instance file: carrier, relation, named functionals, grids."""

    def __init__(self, raw: dict, text: str):
        self.raw = raw
        self.digest = hashlib.sha256(
            canonical_json(raw).encode("utf-8")
        ).hexdigest()
        if raw.get("version") != FORMAT_VERSION:
            raise SchemaError(
                f"unsupported format version {raw.get('version')!r}"
            )
        try:
            self.name = str(raw.get("name", "instance"))
            self.dimension = int(raw["dimension"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"missing or bad header field: {exc}") from exc
        self.capacities = parse_capacities(raw.get("capacities"))
        self.relation: Optional[RelationSpec] = None
        if "relation" in raw:
            self.relation = parse_relation(raw["relation"], self.dimension)
        self.carrier: Optional[Carrier] = None
        if "carrier" in raw:
            c = raw["carrier"]
            try:
                rays = [_point(r, "carrier.rays") for r in c["rays"]]
                scales = [_frac(s, "carrier.scales") for s in c.get("scales", [1])]
                self.carrier = Carrier.build(
                    rays,
                    scales,
                    closure_depth=int(c.get("closure_depth", 2)),
                    ray_cap=int(c.get("ray_cap", 4096)),
                )
            except (KeyError, TypeError, ValidationError) as exc:
                raise SchemaError(f"carrier: {exc}") from exc
        self.functionals: dict[str, Functional] = {}
        for fname, spec in (raw.get("functionals") or {}).items():
            self.functionals[fname] = parse_functional(
                spec, self.dimension, self.capacities
            )
        self.sample: list[Point] = [
            _point(p, "sample") for p in raw.get("sample", [])
        ]
        self.seed = int(raw.get("seed", 0))

    def _named(self, role: str) -> Functional:
        name = self.raw.get(role)
        if not isinstance(name, str) or name not in self.functionals:
            raise SchemaError(f"{role}: expected the name of a functional")
        return self.functionals[name]

    def instance(
        self,
        tol: Optional[str] = None,
        mode: Optional[str] = None,
        feasibility: Optional[str] = None,
    ) -> SandwichInstance:
        if self.carrier is None or self.relation is None:
            raise SchemaError("instance needs both a carrier and a relation")
        raw = self.raw
        try:
            return make_instance(
                carrier=self.carrier,
                relation=self.relation,
                p=self._named("minorant"),
                h=self._named("majorant"),
                order=OrderSpec(self.dimension),
                lambda_grid=[
                    _frac(v, "lambda_grid") for v in raw.get("lambda_grid", [0, 1])
                ],
                mode=mode or raw.get("mode", "conic"),
                n_max=(int(raw["n_max"]) if "n_max" in raw else None),
                feasibility_mode=feasibility
                or raw.get("feasibility_mode", "certified"),
                tol=_frac(tol if tol is not None else raw.get("tol", 0), "tol"),
                max_sweeps=int(raw.get("max_sweeps", 32)),
                name=self.name,
            )
        except ValidationError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"instance: {exc}") from exc

    def extension_parts(self) -> tuple[Functional, ConeDomain]:
        ext = self.raw.get("extension")
        if not isinstance(ext, dict):
            raise SchemaError("extension: missing section")
        name = ext.get("ell")
        if name not in self.functionals:
            raise SchemaError(f"extension.ell: unknown functional {name!r}")
        return self.functionals[name], parse_domain(ext.get("domain"))

    def probe_config(self) -> ProbeConfig:
        p = self.raw.get("probe") or {}
        try:
            return ProbeConfig(
                dimension=int(p.get("dimension", self.dimension)),
                relation_kind=p.get("relation_kind", "full"),
                n_rays=int(p.get("n_rays", 3)),
                max_coord=int(p.get("max_coord", 5)),
                h_rows=int(p.get("h_rows", 2)),
                closure_depth=int(p.get("closure_depth", 1)),
                probe_kind=p.get("probe_kind", "envelope"),
            )
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"probe: {exc}") from exc

    def grid_function(self, key: str) -> GridFunction:
        sec = self.raw.get("comono") or {}
        vals = sec.get(key)
        if not isinstance(vals, list):
            raise SchemaError(f"comono.{key}: expected node values")
        return GridFunction(tuple(_frac(v, f"comono.{key}") for v in vals))

    def comono_section(self) -> dict:
        sec = self.raw.get("comono")
        if not isinstance(sec, dict):
            raise SchemaError("comono: missing section")
        return sec


def load_instance_file(path: str) -> InstanceFile:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise SchemaError(f"{path}: top level must be an object")
    return InstanceFile(raw, text)


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def jsonable(value: Any) -> Any:
    """Recursively convert report values into canonical JSON scalars."""
    from .engine.transforms import _Unconstrained

    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Point):
        return point_to_json(value)
    if isinstance(value, _Unconstrained):
        return "unconstrained"
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if hasattr(value, "__dataclass_fields__"):
        return {
            k: jsonable(getattr(value, k))
            for k in value.__dataclass_fields__
        }
    return ext_to_str(value) if _looks_extreal(value) else str(value)


def _looks_extreal(value: Any) -> bool:
    from .core import _NegInf

    return isinstance(value, _NegInf)
