"""Sandwich constructions for relation-restricted sublinear functionals.

Exact-rational tooling for convex-conic and summand symmetric preorders:
axiom checking with witnesses, the improvement iteration that builds
sandwiched additive-on-related-pairs functionals on finite carriers,
extension and envelope constructions, comonotonicity predicates, Choquet
integrals, and the grid approximation algorithms.
"""

from .core import (
    Carrier,
    DimensionMismatch,
    ExtReal,
    NEG_INF,
    OrderSpec,
    Point,
    RayBudgetExceeded,
    ValidationError,
    as_fraction,
    close_carrier,
    ext_add,
    ext_scale,
    leq_order,
    normalize_ray,
    point,
    zero_point,
)
from .capacities import Capacity, choquet_value
from .relations import (
    Affinity,
    AxiomReport,
    CollapseReport,
    Corr,
    EquivalentMeasures,
    Extensional,
    Full,
    PhiRelation,
    RayD,
    RelationSpec,
    StrictComonotone,
    check_ccsp_axioms,
    check_collapse,
    check_summand_axioms,
    relates,
)
from .functionals import (
    Choquet,
    ConeDomain,
    Functional,
    FunctionalReport,
    Linear,
    MaxOf,
    MinOf,
    MinusInfExtension,
    RayLookupError,
    RayTable,
    ScaleOf,
    check_monotone,
    check_pos_homogeneous,
    check_relation_additivity,
    evaluate,
    extend_minus_infinity,
    ray_functional,
)
from .engine import (
    IterationTrace,
    ProbeConfig,
    ProbeReport,
    SandwichInstance,
    ToolkitReport,
    UNCONSTRAINED,
    a_transform,
    active_backend,
    additivity_residual,
    conjecture_probe,
    envelope,
    extend_functional,
    iterate_sandwich,
    make_instance,
    t_transform,
    verify_toolkit,
)

__version__ = "0.1.0"
