"""Curvature and Ricci flow of left-invariant metrics given by structure constants."""

from .algebra import BasisChange, GlElement, InvalidInput, LieAlgebra, change_basis, pi_action
from .curvature import Metric, RicciReport, ricci
from .flow import FlowOptions, FlowTrajectory, integrate_flow
from .nice import NiceVerdict, is_nice_basis

__all__ = [
    "BasisChange",
    "FlowOptions",
    "FlowTrajectory",
    "GlElement",
    "InvalidInput",
    "LieAlgebra",
    "Metric",
    "NiceVerdict",
    "RicciReport",
    "change_basis",
    "integrate_flow",
    "is_nice_basis",
    "pi_action",
    "ricci",
]
