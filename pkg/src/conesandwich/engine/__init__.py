"""Sandwich construction engine: improvement sweeps, toolkit checks, corollaries."""

from .instance import SandwichInstance, make_instance
from .transforms import UNCONSTRAINED, a_transform, t_transform
from .iterate import IterationTrace, SweepRecord, iterate_sandwich, additivity_residual
from .toolkit import ToolkitReport, verify_toolkit
from .extend import EnvelopeReport, ExtendReport, envelope, extend_functional
from .probe import ProbeConfig, ProbeReport, conjecture_probe
from .backend import active_backend

__all__ = [
    "SandwichInstance",
    "make_instance",
    "UNCONSTRAINED",
    "a_transform",
    "t_transform",
    "IterationTrace",
    "SweepRecord",
    "iterate_sandwich",
    "additivity_residual",
    "ToolkitReport",
    "verify_toolkit",
    "EnvelopeReport",
    "ExtendReport",
    "envelope",
    "extend_functional",
    "ProbeConfig",
    "ProbeReport",
    "conjecture_probe",
    "active_backend",
]
