"""Geodesic flows of metrics that change signature across a discriminant curve.

The public surface re-exports the pieces most scripts need; the submodules
hold the rest (``expr``, ``metric``, ``singular``, ``resonance``,
``integrator``, ``flow``, ``families``, ``plotting``, ``report``,
``scenario``, ``runner``, ``verify``, ``cli``).
"""
from .expr import ExprError, as_expr, diff, evaluate, parse
from .families import (
    FamilyParams,
    GeodesicTrace,
    causal_census,
    fit_exponent,
    fit_family_Z,
    fit_quadratic,
    launch_family,
    lemma_PL2_check,
    winding_number,
)
from .flow import el_integrate, integrate_blowup, integrate_lifted, trace_geodesic
from .integrator import IntegratorConfig
from .metric import ISOTROPIC, SPACELIKE, TIMELIKE, Direction, Metric, brioschi_K1, discriminant
from .resonance import resonance_scan
from .singular import admissible_directions, check_factorization, classify, epsilon_spectrum

__version__ = "0.1.0"

__all__ = [
    "ExprError", "as_expr", "diff", "evaluate", "parse",
    "FamilyParams", "GeodesicTrace", "causal_census", "fit_exponent", "fit_family_Z", "fit_quadratic",
    "launch_family", "lemma_PL2_check", "winding_number",
    "el_integrate", "integrate_blowup", "integrate_lifted", "trace_geodesic",
    "IntegratorConfig",
    "ISOTROPIC", "SPACELIKE", "TIMELIKE", "Direction", "Metric", "brioschi_K1", "discriminant",
    "resonance_scan",
    "admissible_directions", "check_factorization", "classify", "epsilon_spectrum",
]
