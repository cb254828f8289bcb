"""Delay-induced rotating and standing waves of a predator-prey taxis model
on a disk: linear analysis, equivariant normal form, and simulation."""

from .model import (
    ModelParams,
    SteadyState,
    FeasibilityReport,
    KineticDerivatives,
    steady_state,
    check_feasibility,
    kinetic_derivatives,
    prey_kinetics,
    predator_kinetics,
)
from .errors import DiskwaveError, ConfigError, NumericalError, ResonanceError

__version__ = "0.1.0"

__all__ = [
    "ModelParams",
    "SteadyState",
    "FeasibilityReport",
    "KineticDerivatives",
    "steady_state",
    "check_feasibility",
    "kinetic_derivatives",
    "prey_kinetics",
    "predator_kinetics",
    "DiskwaveError",
    "ConfigError",
    "NumericalError",
    "ResonanceError",
    "__version__",
]
