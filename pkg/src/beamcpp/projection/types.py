from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from ..diffgeo import ContactKinematics


class Multiplicity(str, Enum):
    UNIQUE = "UNIQUE"
    MULTIPLE = "MULTIPLE"
    CONTINUUM = "CONTINUUM"
    # only clamped (interval-end) minima were found; outside the criteria's scope
    BOUNDARY = "BOUNDARY"


@dataclass(frozen=True)
class SolverSettings:
    n_start: int = 16
    newton_tol: float = 1e-12
    # stalled iterates below this scaled residual are accepted (rounding floor)
    accept_tol: float = 1e-9
    dedup_tol: float = 1e-8
    max_newton_iter: int = 50
    max_fallback_iter: int = 300
    continuum_span: float = 0.1
    spread_tol: float = 1e-9
    degeneracy_tol: float = 1e-6
    oracle_samples: int = 120
    workers: int = 1

    def __post_init__(self):
        if self.n_start < 2:
            raise ValueError("n_start must be at least 2")
        if self.oracle_samples < 100:
            raise ValueError("oracle_samples must be at least 100")
        if self.workers < 1:
            raise ValueError("workers must be positive")


@dataclass(frozen=True)
class CppState:
    kind: str  # unilateral | bilateral | tube-surface | oracle
    t1: Optional[float]
    t2: float
    theta: Optional[float]
    x1: tuple[float, float, float]
    x2: tuple[float, float, float]
    kinematics: ContactKinematics
    residual: float
    boundary: bool
    # smallest Hessian eigenvalue of the squared distance, relative to |r'|^2
    hessian_min: Optional[float] = None


@dataclass(frozen=True)
class MultiplicityReport:
    kind: Multiplicity
    solutions: list[CppState]
    samples: int
    spread: float
    boundary_solutions: list[CppState] = field(default_factory=list)
    rejected: list[CppState] = field(default_factory=list)

    @property
    def best(self) -> CppState:
        """Representative solution: smallest distance, ties broken by parameters."""
        pool = self.solutions or self.boundary_solutions
        return min(pool, key=lambda s: (s.kinematics.d, s.t1 or 0.0, s.t2))
