"""Frenet data, contact angle and beta angles at a pair of closest points."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .curves import Curve
from .errors import DegenerateParametrizationError

SPEED_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class FrenetData:
    tangent: np.ndarray
    curvature: float
    normal: Optional[np.ndarray]  # None when curvature < kappa_tol
    binormal: Optional[np.ndarray]


@dataclass(frozen=True)
class ContactKinematics:
    """Kinematic quantities entering the uniqueness criteria.

    ``beta1``/``beta2`` are None where the corresponding Frenet normal is
    undefined; ``alpha`` is None for a point projection without slave tangent.
    """

    d: float
    gap: Optional[float]
    normal: tuple[float, float, float]
    alpha: Optional[float]
    beta1: Optional[float]
    beta2: Optional[float]
    kappa1: float
    kappa2: float


def frenet_from_derivatives(d1, d2, kappa_tol: float) -> FrenetData:
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    speed = float(np.linalg.norm(d1))
    if speed < SPEED_TOL:
        raise DegenerateParametrizationError("vanishing curve derivative")
    tangent = d1 / speed
    kappa = float(np.linalg.norm(np.cross(d1, d2)) / speed**3)
    if kappa < kappa_tol:
        return FrenetData(tangent, kappa, None, None)
    u = d2 - (d2 @ tangent) * tangent
    normal = u / np.linalg.norm(u)
    return FrenetData(tangent, kappa, normal, np.cross(tangent, normal))


def frenet_frame(curve: Curve, t: float) -> FrenetData:
    d = curve.derivatives(float(t), 2)
    return frenet_from_derivatives(d[1], d[2], curve.kappa_tol)


def contact_angle(d1_slave, d1_master) -> float:
    """Angle in [0, pi/2] between two tangents; both inputs are normalized."""
    a = np.asarray(d1_slave, dtype=float)
    b = np.asarray(d1_master, dtype=float)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na < SPEED_TOL or nb < SPEED_TOL:
        raise DegenerateParametrizationError("zero tangent vector")
    a, b = a / na, b / nb
    # atan2 keeps full precision near 0 and 90 degrees, where arccos of the
    # clamped cosine loses about half the digits
    return math.atan2(float(np.linalg.norm(np.cross(a, b))), abs(float(a @ b)))


def beta_angle(frenet: FrenetData, contact_normal) -> Optional[float]:
    if frenet.normal is None:
        return None
    c = float(frenet.normal @ np.asarray(contact_normal, dtype=float))
    return math.acos(min(max(c, -1.0), 1.0))


def contact_kinematics(x1, x2, tangent1, frenet1: Optional[FrenetData],
                       frenet2: FrenetData, radii=None) -> ContactKinematics:
    """Assemble kinematics for closest points ``x1`` (slave) and ``x2`` (master).

    The contact normal points from master to slave.
    """
    diff = np.asarray(x1, dtype=float) - np.asarray(x2, dtype=float)
    d = float(np.linalg.norm(diff))
    if d == 0.0:
        raise DegenerateParametrizationError("coincident closest points")
    n = diff / d
    alpha = None if tangent1 is None else contact_angle(tangent1, frenet2.tangent)
    gap = None if radii is None else d - radii[0] - radii[1]
    return ContactKinematics(
        d=d,
        gap=gap,
        normal=tuple(float(v) for v in n),
        alpha=alpha,
        beta1=None if frenet1 is None else beta_angle(frenet1, n),
        beta2=beta_angle(frenet2, n),
        kappa1=0.0 if frenet1 is None else frenet1.curvature,
        kappa2=frenet2.curvature,
    )
