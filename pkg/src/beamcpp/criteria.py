"""Existence and uniqueness criteria for closest point projections of beams.

All inequalities are strict: a comparison that lands within ``EQ_TOL`` of its
bound is reported as not satisfied and recorded as a near-boundary warning.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .diffgeo import ContactKinematics
from .errors import AssumptionViolatedError, DomainError, InvalidKinematicsError

EQ_TOL = 1e-12


@dataclass(frozen=True)
class BeamSection:
    R1: float = 1.0
    R2: float = 1.0
    k: float = 1.0

    def __post_init__(self):
        if not (self.R1 > 0 and self.R2 > 0):
            raise ValueError("radii must be positive")
        if not self.k >= 1:
            raise ValueError("safety factor k must be >= 1")
        ratio = self.R1 / self.R2
        if not 0.1 <= ratio <= 10:
            warnings.warn(f"radii R1={self.R1}, R2={self.R2} differ by more than an order "
                          "of magnitude", stacklevel=2)

    @property
    def R_max(self) -> float:
        return max(self.R1, self.R2)


@dataclass(frozen=True)
class GeneralCriteria:
    lhs_a: float
    ok_a: bool
    lhs_b: float
    rhs_b: float
    ok_b: bool

    @property
    def guaranteed(self) -> bool:
        return self.ok_a and self.ok_b


@dataclass(frozen=True)
class SimplifiedCriteria:
    mu_max: float
    # mu_max scaled by the safety factor; equals mu_max for k = 1
    mu_eff: float
    ok_2a: bool
    alpha_min: Optional[float]
    alpha: float
    ok_2b: bool


@dataclass(frozen=True)
class Assumptions:
    i_ok: bool
    ii_ok: bool


@dataclass(frozen=True)
class CriteriaReport:
    general: GeneralCriteria
    simplified: SimplifiedCriteria
    assumptions: Assumptions
    general_guaranteed: bool
    simplified_guaranteed: bool
    mu_source: str = "a-priori"
    warnings: list[str] = field(default_factory=list)


def _strict_less(lhs, rhs, label, notes):
    if abs(lhs - rhs) <= EQ_TOL:
        notes.append(f"{label}: {lhs!r} equals bound {rhs!r} within {EQ_TOL}")
        return False
    return lhs < rhs


def _curvature_term(kappa, d, beta):
    # beta undefined means kappa below tolerance; the term vanishes in the limit
    return 0.0 if beta is None else kappa * d * math.cos(beta)


def evaluate_general_criteria(kin: ContactKinematics, notes=None) -> GeneralCriteria:
    if not kin.d > 0:
        raise InvalidKinematicsError("distance must be positive")
    if kin.alpha is None:
        raise InvalidKinematicsError("contact angle undefined for a point projection")
    notes = [] if notes is None else notes
    term1 = _curvature_term(kin.kappa1, kin.d, kin.beta1)
    term2 = _curvature_term(kin.kappa2, kin.d, kin.beta2)
    lhs_b = (1.0 + term1) * (1.0 - term2)
    rhs_b = math.cos(kin.alpha) ** 2
    return GeneralCriteria(
        lhs_a=term2,
        ok_a=_strict_less(term2, 1.0, "general (a)", notes),
        lhs_b=lhs_b,
        rhs_b=rhs_b,
        ok_b=_strict_less(rhs_b, lhs_b, "general (b)", notes),
    )


def alpha_min(mu_max: float) -> float:
    """Conservative lower bound on the contact angle for a unique bilateral CPP."""
    if not 0 <= mu_max < 0.5:
        raise AssumptionViolatedError(f"alpha_min requires 0 <= mu_max < 0.5, got {mu_max}")
    return math.acos(1.0 - 2.0 * mu_max)


def evaluate_simplified_criteria(section: BeamSection, kappa_max: float, alpha: float,
                                 notes=None) -> SimplifiedCriteria:
    notes = [] if notes is None else notes
    mu = section.R_max * kappa_max
    mu_eff = section.k * mu
    ok_2a = _strict_less(2.0 * mu_eff, 1.0, "simplified (a)", notes)
    if mu_eff < 0.5:
        amin = alpha_min(mu_eff)
        ok_2b = _strict_less(amin, alpha, "simplified (b)", notes)
    else:
        amin, ok_2b = None, False
    return SimplifiedCriteria(mu, mu_eff, ok_2a, amin, alpha, ok_2b)


def check_assumptions(section: BeamSection, d: float, kappa_max: float, notes=None) -> Assumptions:
    notes = [] if notes is None else notes
    bound = section.k * (section.R1 + section.R2)
    i_ok = d <= bound * (1.0 + EQ_TOL)
    ii_ok = _strict_less(section.R_max * kappa_max, 0.5, "assumption ii", notes)
    return Assumptions(bool(i_ok), ii_ok)


def evaluate_criteria(kin: ContactKinematics, section: BeamSection, kappa_max: float,
                      mu_source: str = "a-priori") -> CriteriaReport:
    notes: list[str] = []
    general = evaluate_general_criteria(kin, notes)
    simplified = evaluate_simplified_criteria(section, kappa_max, kin.alpha, notes)
    assumptions = check_assumptions(section, kin.d, kappa_max, notes)
    simple_ok = (simplified.ok_2a and simplified.ok_2b
                 and assumptions.i_ok and assumptions.ii_ok)
    return CriteriaReport(general, simplified, assumptions, general.guaranteed, simple_ok,
                          mu_source, notes)


def unilateral_curvature_bound(d: float) -> float:
    """Largest master curvature (exclusive) with a unique unilateral CPP for any beta2."""
    if not d > 0:
        raise DomainError("distance must be positive")
    return 1.0 / d


def helix_contact_angle(mu: float) -> float:
    """Contact angle of a straight beam inside a helix of radius 2R at curvature ratio mu."""
    if not 0 <= mu < 0.5:
        raise DomainError(f"helix contact angle requires 0 <= mu < 0.5, got {mu}")
    return math.acos(1.0 / math.sqrt(1.0 + 2.0 * mu / (1.0 - 2.0 * mu)))


def parallel_curve_orthogonality_residual(kappa_a: float, d0: float, beta_a: float) -> float:
    """``1 + kappa_a d0 cos(beta_a)``; zero iff a parallel-curve pair meets at 90 degrees."""
    if not d0 > 0:
        raise DomainError("d0 must be positive")
    return 1.0 + kappa_a * d0 * math.cos(beta_a)


def sufficiency_sample_check(section: BeamSection, trials: int, seed: int,
                             d_scale: float = 1.0) -> int:
    """Count sampled states where the simplified criteria hold but the general ones fail.

    States are drawn uniformly per coordinate with d up to ``d_scale * k (R1+R2)``;
    ``d_scale > 1`` deliberately breaks assumption i).
    """
    if trials <= 0:
        return 0
    rng = np.random.default_rng(seed)
    mu = rng.uniform(0.0, 0.5 / section.k, trials)
    mu = np.where(mu == 0.0, 0.25 / section.k, mu)
    kappa_max = mu / section.R_max
    d_max = d_scale * section.k * (section.R1 + section.R2)
    d = (1.0 - rng.random(trials)) * d_max
    kappa1 = rng.random(trials) * kappa_max
    kappa2 = rng.random(trials) * kappa_max
    beta1 = rng.uniform(0.0, math.pi, trials)
    beta2 = rng.uniform(0.0, math.pi, trials)
    amin = np.arccos(1.0 - 2.0 * section.k * mu)
    alpha = 0.5 * math.pi - rng.random(trials) * (0.5 * math.pi - amin)

    violations = 0
    for i in range(trials):
        kin = ContactKinematics(float(d[i]), None, (0.0, 0.0, 1.0), float(alpha[i]),
                                float(beta1[i]), float(beta2[i]), float(kappa1[i]),
                                float(kappa2[i]))
        simple = evaluate_simplified_criteria(section, float(kappa_max[i]), kin.alpha)
        assume = check_assumptions(section, kin.d, float(kappa_max[i]))
        if simple.ok_2a and simple.ok_2b and assume.ii_ok:
            if not evaluate_general_criteria(kin).guaranteed:
                violations += 1
    return violations
