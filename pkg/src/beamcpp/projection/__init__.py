"""Closest point projections between curves, points and tube surfaces."""
from .newton import bilateral_cpp, bilateral_state, tube_surface_cpp, unilateral_cpp
from .oracle import brute_force_oracle
from .types import CppState, Multiplicity, MultiplicityReport, SolverSettings

__all__ = [
    "CppState",
    "Multiplicity",
    "MultiplicityReport",
    "SolverSettings",
    "bilateral_cpp",
    "bilateral_state",
    "brute_force_oracle",
    "tube_surface_cpp",
    "unilateral_cpp",
]
