"""Minkowski symmetry sets of closed curves in the Lorentz-Minkowski plane."""

from .config import DEFAULT, Config, load_config
from .contact import caustic_point, contact_order, dist_sq, dist_sq_derivs
from .curves import (
    CurveFamily,
    curvature,
    curvature_arclength_derivative,
    evaluate,
    evolute,
    lightlike_points,
    load_curve,
    make_family,
)
from .minkowski import (
    Branch,
    CausalType,
    CircleKind,
    MinkVec,
    PseudoCircle,
    causal_type,
    perp,
    pseudo_dot,
)
from .mss import bitangency_residual, normal_center, trace_mss
from .transitions import EventKind, TransitionEvent, classify, scan_family, solve_event

__all__ = [
    "DEFAULT", "Config", "load_config",
    "caustic_point", "contact_order", "dist_sq", "dist_sq_derivs",
    "CurveFamily", "curvature", "curvature_arclength_derivative", "evaluate", "evolute",
    "lightlike_points", "load_curve", "make_family",
    "Branch", "CausalType", "CircleKind", "MinkVec", "PseudoCircle", "causal_type", "perp", "pseudo_dot",
    "bitangency_residual", "normal_center", "trace_mss",
    "EventKind", "TransitionEvent", "classify", "scan_family", "solve_event",
]
