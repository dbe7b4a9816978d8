"""Numerics for parabolic motions and free time minimizers of three bodies."""
from .centralconfig import (CCKind, CentralConfiguration, HomotheticOrbit, all_central_configurations, by_kind,
                            euler, lagrange)
from .core import MassTriple, NormalizedConfiguration, mass_inner, mass_norm, normalize, potential
from .errors import *  # noqa: F401,F403
from .spectra import SpectralReport, is_spiraling, nu_parameter, restpoint_eigenvalues

__version__ = "0.1.0"

__all__ = [
    "CCKind", "CentralConfiguration", "HomotheticOrbit", "all_central_configurations", "by_kind", "euler",
    "lagrange", "MassTriple", "NormalizedConfiguration", "mass_inner", "mass_norm", "normalize", "potential",
    "SpectralReport", "is_spiraling", "nu_parameter", "restpoint_eigenvalues",
]
