"""Closest point projection and uniqueness criteria for beam-to-beam contact."""
from .criteria import (
    BeamSection,
    CriteriaReport,
    alpha_min,
    evaluate_criteria,
    evaluate_general_criteria,
    evaluate_simplified_criteria,
    helix_contact_angle,
    sufficiency_sample_check,
)
from .curves import CircleArc, Curve, Helix, HermiteSpline, Line, ParallelOffset, make_parallel_curve
from .diffgeo import ContactKinematics, contact_kinematics, frenet_frame
from .projection import (
    CppState,
    Multiplicity,
    MultiplicityReport,
    SolverSettings,
    bilateral_cpp,
    brute_force_oracle,
    tube_surface_cpp,
    unilateral_cpp,
)
from .scenarios import ScenarioConfig, run_scenario

__version__ = "0.1.0"

__all__ = [
    "BeamSection", "CriteriaReport", "alpha_min", "evaluate_criteria",
    "evaluate_general_criteria", "evaluate_simplified_criteria", "helix_contact_angle",
    "sufficiency_sample_check", "CircleArc", "Curve", "Helix", "HermiteSpline", "Line",
    "ParallelOffset", "make_parallel_curve", "ContactKinematics", "contact_kinematics",
    "frenet_frame", "CppState", "Multiplicity", "MultiplicityReport", "SolverSettings",
    "bilateral_cpp", "brute_force_oracle", "tube_surface_cpp", "unilateral_cpp",
    "ScenarioConfig", "run_scenario",
]
