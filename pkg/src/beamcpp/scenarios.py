"""Named contact geometries and the end-to-end analysis pipeline.

Families with a constant distance function: two parallel lines, a straight
beam on the axis of a circle, a straight beam on the axis of a helix, and
general parallel-offset curves. ``custom`` takes arbitrary curves.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
from pydantic import TypeAdapter

from .criteria import BeamSection, CriteriaReport, evaluate_criteria, helix_contact_angle
from .curves import CircleArc, Curve, Helix, Line, make_parallel_curve
from .errors import ConfigError
from .projection import (
    CppState,
    Multiplicity,
    MultiplicityReport,
    SolverSettings,
    bilateral_cpp,
    brute_force_oracle,
)
from .schema import curve_to_dict, dumps

NAMES = ("parallel", "circle", "helix", "parallel-curve", "custom")


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    section: BeamSection = field(default_factory=BeamSection)
    d0: Optional[float] = None
    rbar: Optional[float] = None
    r: Optional[float] = None
    h: Optional[float] = None
    mu: Optional[float] = None
    # a-priori curvature ratio bound; sampled from the curves when None
    mu_max: Optional[float] = None
    turns: float = 1.0
    solver: SolverSettings = field(default_factory=SolverSettings)
    slave: Optional[Curve] = None
    master: Optional[Curve] = None

    def __post_init__(self):
        if self.name not in NAMES:
            raise ConfigError(f"unknown scenario {self.name!r}; expected one of {NAMES}")
        for key in ("d0", "rbar", "r", "h", "turns"):
            v = getattr(self, key)
            if v is not None and not (math.isfinite(v) and v > 0):
                raise ConfigError(f"{key} must be positive and finite")
        if self.mu is not None and not 0 < self.mu < 0.5:
            raise ConfigError("helix-by-mu requires 0 < mu < 0.5")
        if self.name == "custom" and (self.slave is None or self.master is None):
            raise ConfigError("custom scenario needs slave and master curves")

    def echo(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "name": self.name,
            "section": {"R1": self.section.R1, "R2": self.section.R2, "k": self.section.k},
        }
        for key in ("d0", "rbar", "r", "h", "mu", "mu_max", "turns"):
            out[key] = getattr(self, key)
        out["solver"] = {k: getattr(self.solver, k) for k in self.solver.__dataclass_fields__}
        if self.slave is not None:
            out["slave"] = curve_to_dict(self.slave)
            out["master"] = curve_to_dict(self.master)
        return out


@dataclass(frozen=True)
class ScenarioReport:
    config: dict[str, Any]
    solutions: list[CppState]
    multiplicity: MultiplicityReport
    oracle: MultiplicityReport
    criteria: CriteriaReport
    consistent: bool
    status: str
    derived: dict[str, Optional[float]]


_report_adapter = TypeAdapter(ScenarioReport)


def report_to_json(report: ScenarioReport) -> str:
    return dumps(report, _report_adapter)


def report_from_json(text: str) -> ScenarioReport:
    return _report_adapter.validate_json(text)


def helix_slope_from_mu(mu: float, r: float, R_max: float) -> float:
    """Slope h with curvature r / (r^2 + h^2) equal to mu / R_max."""
    h2 = r * R_max / mu - r * r
    if not h2 > 0:
        raise ConfigError(f"no helix of radius {r} reaches curvature ratio mu={mu}")
    return math.sqrt(h2)


def build_scenario(config: ScenarioConfig) -> tuple[Curve, Curve]:
    sec = config.section
    contact = sec.R1 + sec.R2
    z = np.array([0.0, 0.0, 1.0])
    origin = np.zeros(3)
    if config.name == "custom":
        return config.slave, config.master
    if config.name == "parallel":
        d0 = config.d0 if config.d0 is not None else contact
        length = 10.0 * contact
        return (Line(origin, [1.0, 0.0, 0.0], 0.0, length),
                Line([0.0, 0.0, d0], [1.0, 0.0, 0.0], 0.0, length))
    if config.name == "circle":
        rbar = config.rbar if config.rbar is not None else contact
        return Line(origin, z, -2.0 * rbar, 2.0 * rbar), CircleArc(origin, rbar)
    if config.name == "helix":
        r = config.r if config.r is not None else contact
        if config.mu is not None:
            h = helix_slope_from_mu(config.mu, r, sec.R_max)
        else:
            h = config.h if config.h is not None else helix_slope_from_mu(0.01, r, sec.R_max)
        sweep = 2.0 * math.pi * config.turns
        pad = math.pi * h + r
        return Line(origin, z, -pad, sweep * h + pad), Helix(origin, z, r, h, 0.0, 0.0, sweep)
    if config.name == "parallel-curve":
        rbar = config.rbar if config.rbar is not None else 5.0 * contact
        d0 = config.d0 if config.d0 is not None else contact
        base = CircleArc(origin, rbar)
        return base, make_parallel_curve(base, d0, "frenet")
    raise ConfigError(f"unknown scenario {config.name!r}")


def estimate_kappa_max(*curves: Curve, samples_per_segment: int = 256) -> float:
    best = 0.0
    for c in curves:
        ts = np.linspace(c.t_lo, c.t_hi, samples_per_segment * c.n_segments + 1)
        D = c.derivatives(ts, 2)
        speed = np.linalg.norm(D[1], axis=1)
        kappa = np.linalg.norm(np.cross(D[1], D[2]), axis=1) / speed**3
        best = max(best, float(kappa.max()))
    return best


def run_scenario(config: ScenarioConfig) -> ScenarioReport:
    """Solve, cross-check against the oracle and evaluate both criteria layers."""
    slave, master = build_scenario(config)
    sec = config.section
    radii = (sec.R1, sec.R2)
    settings = config.solver
    newton = bilateral_cpp(slave, master, settings, radii)
    oracle = brute_force_oracle(slave, master, settings.oracle_samples, settings.spread_tol,
                                settings.continuum_span, radii)
    consistent = newton.kind == oracle.kind

    if config.mu_max is not None:
        kappa_max, source = config.mu_max / sec.R_max, "a-priori"
    else:
        kappa_max, source = estimate_kappa_max(slave, master), "sampled"
    best = newton.best
    criteria = evaluate_criteria(best.kinematics, sec, kappa_max, source)

    amin = criteria.simplified.alpha_min
    derived: dict[str, Optional[float]] = {
        "alpha_deg": math.degrees(best.kinematics.alpha),
        "alpha_min_deg": None if amin is None else math.degrees(amin),
        "d": best.kinematics.d,
        "gap": best.kinematics.gap,
        "mu_max": criteria.simplified.mu_max,
    }
    if config.name == "helix":
        mu = sec.R_max * estimate_kappa_max(master) if config.mu is None else config.mu
        derived["alpha_helix_closed_form_deg"] = math.degrees(helix_contact_angle(mu))
    if config.name == "parallel-curve":
        derived["kappa_a"] = best.kinematics.kappa1
        # 1 + kappa_a d0 cos(beta_a) equals t_a . t_b for unit-speed bases
        beta = best.kinematics.beta1
        derived["orthogonality_residual"] = (
            1.0 if beta is None else 1.0 + best.kinematics.kappa1 * master.d0 * math.cos(beta))

    return ScenarioReport(
        config=config.echo(),
        solutions=newton.solutions,
        multiplicity=newton,
        oracle=oracle,
        criteria=criteria,
        consistent=consistent,
        status="OK" if consistent else "INCONSISTENT",
        derived=derived,
    )


def verdict_line(report: ScenarioReport) -> str:
    kind = report.multiplicity.kind
    unique = {Multiplicity.UNIQUE: "yes", Multiplicity.BOUNDARY: "boundary"}.get(kind, "no")
    simple = "yes" if report.criteria.simplified_guaranteed else "no"
    return f"VERDICT unique={unique} simplified_guaranteed={simple}"
