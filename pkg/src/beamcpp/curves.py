"""Parametric space curves with analytic derivatives of arbitrary order.

Every curve implements ``_derivs(t, order)`` returning an array of shape
``(order + 1, *t.shape, 3)`` holding position and derivatives with respect to
the curve parameter. Curves are immutable; all evaluation is pure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

import numpy as np
from scipy import integrate

from . import _taylor as tj
from .errors import ConfigError, DegenerateFrameError, DomainError

TWO_PI = 2.0 * math.pi
UNIT_TOL = 1e-12
# Relative curvature threshold; divided by the curve's arc length.
KAPPA_TOL_SCALE = 1e-10


def _vec(v, name):
    a = np.array(v, dtype=float).reshape(-1)
    if a.shape != (3,) or not np.all(np.isfinite(a)):
        raise ConfigError(f"{name} must be a finite 3-vector")
    a.setflags(write=False)
    return a


def _unit(v, name):
    a = np.array(v, dtype=float).reshape(-1)
    if a.shape != (3,) or not np.all(np.isfinite(a)):
        raise ConfigError(f"{name} must be a finite 3-vector")
    n = np.linalg.norm(a)
    if n < 1e-300:
        raise ConfigError(f"{name} must be nonzero")
    a = a / n
    a.setflags(write=False)
    return a


def _orthonormal_pair(w):
    """Canonical (u, v) completing the unit axis ``w`` to a right-handed basis."""
    ref = np.array([1.0, 0.0, 0.0]) if abs(w[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = ref - (ref @ w) * w
    u /= np.linalg.norm(u)
    v = np.cross(w, u)
    return u, v


# derivative k of (cos t, sin t) is (c_k cos t + s_k sin t, ...) with exact signs
_COS_CYCLE = [(1.0, 0.0), (0.0, -1.0), (-1.0, 0.0), (0.0, 1.0)]
_SIN_CYCLE = [(0.0, 1.0), (1.0, 0.0), (0.0, -1.0), (-1.0, 0.0)]


def _trig_derivs(t, order):
    c, s = np.cos(t), np.sin(t)
    cos_d = np.stack([a * c + b * s for a, b in (_COS_CYCLE[k % 4] for k in range(order + 1))])
    sin_d = np.stack([a * c + b * s for a, b in (_SIN_CYCLE[k % 4] for k in range(order + 1))])
    return cos_d, sin_d


@dataclass(frozen=True)
class ParamPoint:
    t: float
    position: np.ndarray
    d1: np.ndarray
    d2: np.ndarray


@dataclass(frozen=True, eq=False)
class Curve:
    """Common evaluation machinery; subclasses supply ``_derivs`` and the interval."""

    @property
    def t_lo(self) -> float:
        raise NotImplementedError

    @property
    def t_hi(self) -> float:
        raise NotImplementedError

    @property
    def periodic(self) -> bool:
        return False

    @property
    def n_segments(self) -> int:
        return 1

    @property
    def span(self) -> float:
        return self.t_hi - self.t_lo

    def _derivs(self, t, order):
        raise NotImplementedError

    def wrap(self, t):
        t = np.asarray(t, dtype=float)
        if not self.periodic:
            return t
        return self.t_lo + np.mod(t - self.t_lo, self.span)

    def check_domain(self, t):
        t = np.asarray(t, dtype=float)
        if self.periodic:
            return self.wrap(t)
        if not np.all(np.isfinite(t)) or np.any(t < self.t_lo) or np.any(t > self.t_hi):
            raise DomainError(f"parameter outside [{self.t_lo}, {self.t_hi}]")
        return t

    def derivatives(self, t, order=2):
        """Position and derivatives up to ``order``; shape ``(order+1, *t.shape, 3)``."""
        return self._derivs(self.check_domain(t), order)

    def points(self, t):
        return self.derivatives(t, 0)[0]

    @cached_property
    def length(self) -> float:
        return arc_length(self, self.t_lo, self.t_hi)

    @cached_property
    def kappa_tol(self) -> float:
        return KAPPA_TOL_SCALE / self.length


@dataclass(frozen=True, eq=False)
class Line(Curve):
    base: np.ndarray
    direction: np.ndarray
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "base", _vec(self.base, "base"))
        object.__setattr__(self, "direction", _unit(self.direction, "direction"))
        _check_interval(self.lo, self.hi)

    t_lo = property(lambda self: float(self.lo))
    t_hi = property(lambda self: float(self.hi))

    def _derivs(self, t, order):
        t = np.asarray(t, dtype=float)
        out = np.zeros((order + 1,) + t.shape + (3,))
        out[0] = self.base + t[..., None] * self.direction
        if order >= 1:
            out[1] = self.direction
        return out


@dataclass(frozen=True, eq=False)
class CircleArc(Curve):
    center: np.ndarray
    radius: float
    e1: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))
    e2: np.ndarray = field(default_factory=lambda: np.array([0.0, 1.0, 0.0]))
    lo: float = 0.0
    hi: float = TWO_PI

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center, "center"))
        e1, e2 = _unit(self.e1, "e1"), _unit(self.e2, "e2")
        if abs(e1 @ e2) > UNIT_TOL:
            raise ConfigError("circle basis vectors e1, e2 must be orthogonal")
        object.__setattr__(self, "e1", e1)
        object.__setattr__(self, "e2", e2)
        if not self.radius > 0:
            raise ConfigError("radius must be positive")
        _check_interval(self.lo, self.hi)
        if self.hi - self.lo > TWO_PI + 1e-12:
            raise ConfigError("circle arc interval must not exceed 2*pi")

    t_lo = property(lambda self: float(self.lo))
    t_hi = property(lambda self: float(self.hi))

    @property
    def periodic(self):
        return abs(self.hi - self.lo - TWO_PI) <= 1e-12

    def _derivs(self, t, order):
        t = np.asarray(t, dtype=float)
        cos_d, sin_d = _trig_derivs(t, order)
        out = self.radius * (cos_d[..., None] * self.e1 + sin_d[..., None] * self.e2)
        out[0] += self.center
        return out


@dataclass(frozen=True, eq=False)
class Helix(Curve):
    """``p + r cos(t+phase) u + r sin(t+phase) v + h t w`` with ``w`` the axis."""

    axis_point: np.ndarray
    axis: np.ndarray
    radius: float
    slope: float
    phase: float = 0.0
    lo: float = 0.0
    hi: float = TWO_PI

    def __post_init__(self):
        object.__setattr__(self, "axis_point", _vec(self.axis_point, "axis_point"))
        object.__setattr__(self, "axis", _unit(self.axis, "axis"))
        if not self.radius > 0:
            raise ConfigError("radius must be positive")
        if not self.slope >= 0:
            raise ConfigError("slope must be non-negative")
        _check_interval(self.lo, self.hi)

    t_lo = property(lambda self: float(self.lo))
    t_hi = property(lambda self: float(self.hi))

    @property
    def n_segments(self):
        return max(1, math.ceil((self.hi - self.lo) / TWO_PI - 1e-9))

    @cached_property
    def _basis(self):
        return _orthonormal_pair(self.axis)

    def _derivs(self, t, order):
        t = np.asarray(t, dtype=float)
        u, v = self._basis
        cos_d, sin_d = _trig_derivs(t + self.phase, order)
        out = self.radius * (cos_d[..., None] * u + sin_d[..., None] * v)
        out[0] += self.axis_point + self.slope * t[..., None] * self.axis
        if order >= 1:
            out[1] += self.slope * self.axis
        return out


@dataclass(frozen=True, eq=False)
class HermiteSpline(Curve):
    """Piecewise cubic Hermite curve; segment ``i`` covers ``t in [i, i+1]``."""

    positions: np.ndarray
    tangents: np.ndarray

    def __post_init__(self):
        p = np.array(self.positions, dtype=float)
        m = np.array(self.tangents, dtype=float)
        if p.ndim != 2 or p.shape[1] != 3 or p.shape != m.shape:
            raise ConfigError("positions and tangents must both have shape (n, 3)")
        if p.shape[0] < 2:
            raise ConfigError("a Hermite spline needs at least 2 nodes")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(m))):
            raise ConfigError("Hermite nodes must be finite")
        p.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "positions", p)
        object.__setattr__(self, "tangents", m)

    t_lo = property(lambda self: 0.0)
    t_hi = property(lambda self: float(len(self.positions) - 1))

    @property
    def n_segments(self):
        return len(self.positions) - 1

    @property
    def periodic(self):
        return bool(
            np.array_equal(self.positions[0], self.positions[-1])
            and np.array_equal(self.tangents[0], self.tangents[-1])
        )

    @cached_property
    def _coeffs(self):
        # power-basis coefficients a0 + a1 s + a2 s^2 + a3 s^3 per segment
        p0, p1 = self.positions[:-1], self.positions[1:]
        m0, m1 = self.tangents[:-1], self.tangents[1:]
        a0 = p0
        a1 = m0
        a2 = -3 * p0 + 3 * p1 - 2 * m0 - m1
        a3 = 2 * p0 - 2 * p1 + m0 + m1
        return np.stack([a0, a1, a2, a3], axis=1)  # (nseg, 4, 3)

    def _derivs(self, t, order):
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.floor(t).astype(int), 0, self.n_segments - 1)
        s = (t - idx)[..., None]
        a = self._coeffs[idx]  # (*shape, 4, 3)
        out = np.zeros((order + 1,) + t.shape + (3,))
        for k in range(min(order, 3) + 1):
            for j in range(k, 4):
                out[k] += math.perm(j, k) * s ** (j - k) * a[..., j, :]
        return out


@dataclass(frozen=True, eq=False)
class ParallelOffset(Curve):
    """``r_b(t) = r_a(t) + d0 e_a(t)`` for a unit normal field ``e_a`` of the base.

    ``direction=None`` selects the Frenet normal of the base; otherwise ``e_a`` is
    the constant ``direction`` projected orthogonal to the base tangent.
    """

    base: Curve
    d0: float
    direction: np.ndarray | None = None

    def __post_init__(self):
        if not self.d0 > 0:
            raise ConfigError("offset d0 must be positive")
        if self.direction is not None:
            object.__setattr__(self, "direction", _unit(self.direction, "direction"))

    t_lo = property(lambda self: self.base.t_lo)
    t_hi = property(lambda self: self.base.t_hi)
    periodic = property(lambda self: self.base.periodic)
    n_segments = property(lambda self: self.base.n_segments)

    @property
    def field_kind(self) -> str:
        return "frenet" if self.direction is None else "constant"

    def _derivs(self, t, order):
        t = np.asarray(t, dtype=float)
        e = normal_field_derivatives(self.base, t, order, self.direction)
        return self.base._derivs(t, order) + self.d0 * e


CurveSpec = Union[Line, CircleArc, Helix, HermiteSpline, ParallelOffset]


def _check_interval(lo, hi):
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise ConfigError("parameter interval requires t_lo < t_hi")


def normal_field_derivatives(curve, t, order, direction=None):
    """Derivatives ``0..order`` of the unit normal field along ``curve``.

    Frenet field when ``direction`` is None, else the constant direction made
    orthogonal to the tangent and renormalized.
    """
    t = np.asarray(t, dtype=float)
    if direction is None:
        d = curve._derivs(t, order + 2)
        r1 = tj.from_derivatives(d[1 : order + 2])
        r2 = tj.from_derivatives(d[2 : order + 3])
        tan, _ = tj.normalize(r1)
        u = r2 - tj.mul(tj.scal(tj.dot(r2, tan)), tan)
    else:
        d = curve._derivs(t, order + 1)
        r1 = tj.from_derivatives(d[1 : order + 2])
        tan, _ = tj.normalize(r1)
        c = np.zeros_like(tan)
        c[0] = direction
        u = c - tj.mul(tj.scal(tj.dot(c, tan)), tan)
    e, _ = tj.normalize(u)
    return tj.to_derivatives(e)


def frame_field_derivatives(curve, t, order, direction=None):
    """Derivatives of an orthonormal (normal, binormal) field orthogonal to the tangent."""
    t = np.asarray(t, dtype=float)
    n = tj.from_derivatives(normal_field_derivatives(curve, t, order, direction))
    d = curve._derivs(t, order + 1)
    tan, _ = tj.normalize(tj.from_derivatives(d[1 : order + 2]))
    b = tj.cross(tan, n)
    return tj.to_derivatives(n), tj.to_derivatives(b)


def evaluate_with_derivatives(curve: Curve, t: float) -> ParamPoint:
    d = curve.derivatives(float(t), 2)
    return ParamPoint(t=float(t), position=d[0], d1=d[1], d2=d[2])


def arc_length(curve: Curve, t0: float, t1: float) -> float:
    """Length of the curve between two parameters by adaptive quadrature."""
    for t in (t0, t1):
        if not curve.t_lo <= t <= curve.t_hi:
            raise DomainError(f"parameter {t} outside [{curve.t_lo}, {curve.t_hi}]")
    if t1 < t0:
        raise DomainError("arc_length requires t0 <= t1")
    if t1 == t0:
        return 0.0

    def speed(t):
        return float(np.linalg.norm(curve._derivs(np.asarray(t), 1)[1]))

    # split at segment joints where the integrand may have kinks
    nseg = curve.n_segments
    edges = np.linspace(curve.t_lo, curve.t_hi, nseg + 1)
    breaks = [t0] + [e for e in edges[1:-1] if t0 < e < t1] + [t1]
    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        val, _ = integrate.quad(speed, a, b, epsabs=0.0, epsrel=1e-12, limit=200)
        total += val
    return total


def _frenet_min_curvature(curve, samples_per_segment=64):
    ts = np.linspace(curve.t_lo, curve.t_hi, samples_per_segment * curve.n_segments + 1)
    d = curve._derivs(ts, 2)
    speed = np.linalg.norm(d[1], axis=-1)
    return float(np.min(np.linalg.norm(np.cross(d[1], d[2]), axis=-1) / speed**3))


def make_parallel_curve(base: Curve, d0: float, field="frenet") -> ParallelOffset:
    """Offset ``base`` by ``d0`` along a unit normal field.

    ``field`` is ``"frenet"`` or a 3-vector giving a constant direction. The
    Frenet field is rejected on bases whose curvature drops below tolerance.
    """
    if not d0 > 0:
        raise ConfigError("offset d0 must be positive")
    if isinstance(field, str):
        if field != "frenet":
            raise ConfigError(f"unknown normal field {field!r}")
        if _frenet_min_curvature(base) <= base.kappa_tol:
            raise DegenerateFrameError("Frenet normal undefined: base curvature below tolerance")
        return ParallelOffset(base, float(d0))
    direction = _unit(field, "field")
    ts = np.linspace(base.t_lo, base.t_hi, 64 * base.n_segments + 1)
    tan = base._derivs(ts, 1)[1]
    tan /= np.linalg.norm(tan, axis=-1, keepdims=True)
    if np.max(np.abs(tan @ direction)) > 1.0 - 1e-10:
        raise DegenerateFrameError("constant field direction is parallel to the base tangent")
    return ParallelOffset(base, float(d0), direction)
