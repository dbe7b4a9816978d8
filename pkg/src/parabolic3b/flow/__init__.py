"""Blown-up flow: charts, integration, stable manifolds and the symplectic form."""
from .blowup import BlownUpState, RestpointState, restpoint
from .integrator import IntegratorOptions, Trajectory, integrate, integrate_with_variation
from .manifolds import shoot_stable_manifold, stable_subspace

__all__ = ["BlownUpState", "RestpointState", "restpoint", "IntegratorOptions", "Trajectory", "integrate",
           "integrate_with_variation", "shoot_stable_manifold", "stable_subspace"]
