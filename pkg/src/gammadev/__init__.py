"""Numerics for the second-order Gamma-expansion of anisotropic phase-field energies
with degenerate double wells: optimal profile, radial constrained minimisers,
recovery sequences and convex rearrangement."""

from .anisotropy import AnisotropicNorm, euclidean, kappa, weighted_p_norm
from .config import RunConfig, load_config
from .errors import (
    ConfigurationError,
    ConstraintError,
    DegenerateStateError,
    DomainError,
    GammadevError,
    GeometryError,
    InsufficientDataError,
    NumericalError,
    UsageError,
)
from .potential import DoubleWell, c_w, tau_w
from .profile import OptimalProfile, build_profile
from .sweep import SweepReport, fit_rates, run_sweep

__version__ = "0.1.0"

__all__ = [
    "AnisotropicNorm",
    "ConfigurationError",
    "ConstraintError",
    "DegenerateStateError",
    "DomainError",
    "DoubleWell",
    "GammadevError",
    "GeometryError",
    "InsufficientDataError",
    "NumericalError",
    "OptimalProfile",
    "RunConfig",
    "SweepReport",
    "UsageError",
    "build_profile",
    "c_w",
    "euclidean",
    "fit_rates",
    "kappa",
    "load_config",
    "run_sweep",
    "tau_w",
    "weighted_p_norm",
]
