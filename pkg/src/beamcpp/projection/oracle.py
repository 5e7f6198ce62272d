"""Brute-force ground truth for bilateral projections.

Grid sampling, grid-local minima and coordinate descent with bounded Brent
line minimizations. Shares no code with the Newton solvers so the two can
check each other.
"""
from __future__ import annotations

import numpy as np
from scipy import ndimage
from scipy.optimize import minimize_scalar

from ..curves import Curve
from ..diffgeo import contact_kinematics, frenet_from_derivatives
from .types import CppState, Multiplicity, MultiplicityReport

MAX_PER_COMPONENT = 6
MAX_SWEEPS = 400
MERGE_TOL = 1e-6
BOUND_TOL = 1e-9


def _grid(curve: Curve, n: int) -> np.ndarray:
    return np.linspace(curve.t_lo, curve.t_hi, n, endpoint=not curve.periodic)


def _local_minima(D, per1, per2):
    """Cells not larger than any of their 8 neighbours."""
    mode = ("wrap" if per1 else "nearest", "wrap" if per2 else "nearest")
    lowest = D.copy()
    for axis, m in enumerate(mode):
        lowest = ndimage.minimum_filter1d(lowest, 3, axis=axis, mode=m)
    return D <= lowest


def _pick_candidates(mask):
    labels, count = ndimage.label(mask, structure=np.ones((3, 3)))
    picks = []
    for lab in range(1, count + 1):
        cells = np.argwhere(labels == lab)  # lexicographic order
        take = np.unique(np.linspace(0, len(cells) - 1, min(len(cells), MAX_PER_COMPONENT))
                         .round().astype(int))
        picks.extend(tuple(cells[i]) for i in take)
    return sorted(set(picks))


class _Refiner:
    def __init__(self, slave: Curve, master: Curve, h1: float, h2: float):
        self.curves = (slave, master)
        self.h = (h1, h2)

    @staticmethod
    def _point(curve, t):
        # brackets stay inside the interval; skip the checked public path
        t = float(t)
        if curve.periodic:
            t = curve.t_lo + (t - curve.t_lo) % curve.span
        else:
            t = min(max(t, curve.t_lo), curve.t_hi)
        return curve._derivs(np.array(t), 0)[0]

    def dist2(self, t1, t2):
        diff = self._point(self.curves[0], t1) - self._point(self.curves[1], t2)
        return float(diff @ diff)

    def line_min(self, k, t):
        curve = self.curves[k]
        fixed = self._point(self.curves[1 - k], t[1 - k])

        def f(u):
            diff = self._point(curve, u) - fixed
            return float(diff @ diff)

        width = 2 * self.h[k]
        while True:
            a, b = t[k] - width, t[k] + width
            if not curve.periodic:
                a, b = max(a, curve.t_lo), min(b, curve.t_hi)
            r = minimize_scalar(lambda delta: f(t[k] + delta), bounds=(a - t[k], b - t[k]),
                                method="bounded",
                                options={"xatol": 1e-10 * curve.span, "maxiter": 500})
            u = t[k] + float(r.x)
            # widen when the minimizer hugs a bracket edge inside the interval
            edge = 1e-3 * (b - a)
            hug = (u - a < edge and (curve.periodic or a > curve.t_lo)) or \
                  (b - u < edge and (curve.periodic or b < curve.t_hi))
            if hug and width < curve.span:
                width *= 4
                continue
            if not curve.periodic:
                # the bounded method never evaluates the interval ends exactly
                for end in (curve.t_lo, curve.t_hi):
                    if abs(u - end) < 1e-7 * curve.span and f(end) <= f(u):
                        u = end
            # along a flat valley any point is a minimizer; stay put
            if not f(u) < f(t[k]):
                return t[k]
            return float(curve.wrap(u)) if curve.periodic else u

    def pattern_move(self, t, step):
        """Line search along the last sweep's displacement (skewed valleys)."""
        lo, hi = -np.inf, np.inf
        for c, u, s in zip(self.curves, t, step):
            if c.periodic or s == 0.0:
                continue
            a, b = (c.t_lo - u) / s, (c.t_hi - u) / s
            lo, hi = max(lo, min(a, b)), min(hi, max(a, b))
        lo, hi = max(lo, -4.0), min(hi, 4.0)
        if not hi > lo:
            return t

        def g(lam):
            return self.dist2(t[0] + lam * step[0], t[1] + lam * step[1])

        r = minimize_scalar(g, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
        if not g(r.x) < g(0.0):
            return t
        return [float(c.wrap(u + r.x * s)) if c.periodic else
                min(max(u + r.x * s, c.t_lo), c.t_hi)
                for c, u, s in zip(self.curves, t, step)]

    def refine(self, t1, t2):
        t = [t1, t2]
        spans = (self.curves[0].span, self.curves[1].span)
        calm = 0
        for _ in range(MAX_SWEEPS):
            start = list(t)
            move = 0.0
            for k in (0, 1):
                t[k] = self.line_min(k, t)
            step = []
            for k in (0, 1):
                delta = t[k] - start[k]
                if self.curves[k].periodic:
                    delta = (delta + 0.5 * spans[k]) % spans[k] - 0.5 * spans[k]
                step.append(delta)
                move = max(move, abs(delta) / spans[k])
            calm = calm + 1 if move < 1e-10 else 0
            if calm >= 2:
                break
            if step[0] != 0.0 and step[1] != 0.0:
                t = self.pattern_move(t, step)
        return t


def _merge(points, spans, periodic):
    out = []
    for p in sorted(points, key=lambda q: (q[0], q[1])):
        for q in out:
            diff = np.abs(np.subtract(p[:2], q[:2]))
            diff = np.where(periodic, np.minimum(diff, spans - diff), diff) / spans
            if np.all(diff <= MERGE_TOL):
                break
        else:
            out.append(p)
    return out


def _residual(slave, master, t1, t2):
    """Orthogonality residual scaled by speed and distance."""
    A = slave._derivs(np.asarray(float(t1)), 1)
    B = master._derivs(np.asarray(float(t2)), 1)
    diff = A[0] - B[0]
    d = np.linalg.norm(diff)
    if d == 0.0:
        return 0.0
    return float(max(abs(diff @ A[1]) / np.linalg.norm(A[1]),
                     abs(diff @ B[1]) / np.linalg.norm(B[1])) / d)


def _state(slave, master, t1, t2, boundary, radii):
    A = slave._derivs(np.asarray(t1), 2)
    B = master._derivs(np.asarray(t2), 2)
    fr1 = frenet_from_derivatives(A[1], A[2], slave.kappa_tol)
    fr2 = frenet_from_derivatives(B[1], B[2], master.kappa_tol)
    kin = contact_kinematics(A[0], B[0], A[1], fr1, fr2, radii)
    residual = _residual(slave, master, t1, t2)
    return CppState("oracle", float(t1), float(t2), None, tuple(map(float, A[0])),
                    tuple(map(float, B[0])), kin, float(residual), boundary, None)


def brute_force_oracle(slave: Curve, master: Curve, n: int = 120, spread_tol: float = 1e-9,
                       continuum_span: float = 0.1, radii=None) -> MultiplicityReport:
    """Classify the bilateral projection by exhaustive sampling.

    A continuum is declared when at least three distinct refined minima share
    the same distance (within ``spread_tol`` relative) and cover more than
    ``continuum_span`` of a parameter interval.
    """
    if n < 100:
        raise ValueError("oracle needs at least 100 samples per curve")
    g1, g2 = _grid(slave, n), _grid(master, n)
    P1, P2 = slave.points(g1), master.points(g2)
    D = np.sqrt(((P1[:, None, :] - P2[None, :, :]) ** 2).sum(axis=-1))
    mask = _local_minima(D, slave.periodic, master.periodic)
    cands = _pick_candidates(mask)

    h1 = slave.span / (n if slave.periodic else n - 1)
    h2 = master.span / (n if master.periodic else n - 1)
    refiner = _Refiner(slave, master, h1, h2)
    refined = []
    for i, j in cands:
        t1, t2 = refiner.refine(float(g1[i]), float(g2[j]))
        refined.append((t1, t2, np.sqrt(refiner.dist2(t1, t2))))

    spans = np.array([slave.span, master.span])
    periodic = np.array([slave.periodic, master.periodic])
    merged = _merge(refined, spans, periodic)

    interior, boundary = [], []
    for t1, t2, d in merged:
        on_edge = any(
            not c.periodic and min(t - c.t_lo, c.t_hi - t) <= BOUND_TOL * c.span
            for c, t in ((slave, t1), (master, t2))
        )
        if d == 0.0:
            continue
        (boundary if on_edge else interior).append((t1, t2, d))

    bstates = [_state(slave, master, t1, t2, True, radii) for t1, t2, _ in boundary]
    istates = [_state(slave, master, t1, t2, False, radii) for t1, t2, _ in interior]
    samples = n * n
    if not istates:
        kind = Multiplicity.BOUNDARY
        return MultiplicityReport(kind, [], samples, 0.0, bstates)
    d = np.array([s.kinematics.d for s in istates])
    spread = float(d.max() - d.min())
    if len(istates) >= 3 and spread < spread_tol * d.mean():
        cover = 0.0
        for k in range(2):
            col = np.sort([p[k] for p in interior])
            if periodic[k]:
                gaps = np.diff(np.concatenate([col, [col[0] + spans[k]]]))
                cover = max(cover, 1.0 - gaps.max() / spans[k])
            else:
                cover = max(cover, (col[-1] - col[0]) / spans[k])
        if cover > continuum_span:
            return MultiplicityReport(Multiplicity.CONTINUUM, istates, samples, spread, bstates)
    kind = Multiplicity.UNIQUE if len(istates) == 1 else Multiplicity.MULTIPLE
    return MultiplicityReport(kind, istates, samples, spread, bstates)
