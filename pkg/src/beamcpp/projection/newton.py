"""Multi-start Newton solvers for unilateral, bilateral and tube-surface projections."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from ..curves import Curve, frame_field_derivatives
from ..diffgeo import contact_kinematics, frenet_from_derivatives
from ..errors import (
    AmbiguousProjectionError,
    DegenerateFrameError,
    DegenerateParametrizationError,
    ProjectionError,
)
from ._minimize import minimize_batch
from .types import CppState, Multiplicity, MultiplicityReport, SolverSettings

TINY = 1e-300
# relative distance to an interval end below which a solution counts as boundary
BOUND_TOL = 1e-9


def _starts(curve: Curve, n_start: int) -> np.ndarray:
    edges = np.linspace(curve.t_lo, curve.t_hi, curve.n_segments + 1)
    frac = np.arange(n_start) / n_start
    if not curve.periodic:
        frac = frac + 0.5 / n_start
    return np.concatenate([a + frac * (b - a) for a, b in zip(edges[:-1], edges[1:])])


def _run(objective, x0, lo, hi, periodic, settings: SolverSettings):
    """Minimize from every start; chunks run on a thread pool but the result is
    independent of the chunking since starts never interact."""

    def solve(chunk):
        return minimize_batch(objective, chunk, lo, hi, periodic, settings.newton_tol,
                              settings.accept_tol, settings.max_newton_iter,
                              settings.max_fallback_iter)

    if settings.workers == 1 or len(x0) < 2 * settings.workers:
        return [solve(x0)]
    chunks = np.array_split(x0, settings.workers)
    with ThreadPoolExecutor(settings.workers) as pool:
        return list(pool.map(solve, chunks))


def _merge(results):
    keys = ("x", "residual", "converged", "at_bound", "hessian", "F")
    return {k: np.concatenate([getattr(r, k) for r in results]) for k in keys}


def _param_distance(a, b, spans, periodic):
    diff = np.abs(np.asarray(a) - np.asarray(b))
    diff = np.where(periodic, np.minimum(diff, spans - diff), diff)
    return diff / spans


def _dedup(items, spans, periodic, tol):
    """Cluster (params, residual, payload) items; representative has least residual."""
    items = sorted(items, key=lambda it: tuple(it[0]))
    clusters = []
    for it in items:
        for cl in clusters:
            if np.all(_param_distance(it[0], cl[0][0], spans, periodic) <= tol):
                cl.append(it)
                break
        else:
            clusters.append([it])
    reps = [min(cl, key=lambda it: (it[1], tuple(it[0]))) for cl in clusters]
    return sorted(reps, key=lambda it: tuple(it[0]))


def _coverage(params, spans, periodic):
    """Largest fraction of any parameter interval covered by a set of points."""
    params = np.atleast_2d(np.asarray(params, dtype=float))
    best = 0.0
    for k in range(params.shape[1]):
        col = np.sort(params[:, k])
        if periodic[k]:
            gaps = np.diff(np.concatenate([col, [col[0] + spans[k]]]))
            cov = 1.0 - gaps.max() / spans[k]
        else:
            cov = (col[-1] - col[0]) / spans[k]
        best = max(best, cov)
    return best


def classify(minima, degenerate, boundary, rejected, samples, spans, periodic,
             settings: SolverSettings) -> MultiplicityReport:
    """Shared classification of deduplicated interior minima.

    ``minima`` and ``degenerate`` are lists of (params, CppState); degenerate
    minima have a (numerically) singular Hessian.
    """
    states = [s for _, s in minima]
    deg_states = [s for _, s in degenerate]
    if len(deg_states) >= 2:
        d = np.array([s.kinematics.d for s in deg_states])
        spread = float(d.max() - d.min())
        cover = _coverage([p for p, _ in degenerate], spans, periodic)
        if spread < settings.spread_tol * d.mean() and cover > settings.continuum_span:
            sols = sorted(deg_states + states, key=_state_key)
            return MultiplicityReport(Multiplicity.CONTINUUM, sols, samples, spread,
                                      boundary, rejected)
    sols = sorted(states + deg_states, key=_state_key)
    if not sols:
        if boundary:
            return MultiplicityReport(Multiplicity.BOUNDARY, [], samples, 0.0, boundary, rejected)
        raise ProjectionError("no converged minimum of the distance function")
    d = np.array([s.kinematics.d for s in sols])
    kind = Multiplicity.UNIQUE if len(sols) == 1 else Multiplicity.MULTIPLE
    return MultiplicityReport(kind, sols, samples, float(d.max() - d.min()), boundary, rejected)


def _state_key(s: CppState):
    return (s.t1 if s.t1 is not None else 0.0, s.t2, s.theta if s.theta is not None else 0.0)


# --------------------------------------------------------------------------- unilateral


def _unilateral_objective(x, master: Curve):
    def objective(T, order):
        t = master.wrap(T[:, 0])
        D = master._derivs(t, order)
        diff = x - D[0]
        F = 0.5 * np.einsum("bi,bi->b", diff, diff)
        if order == 0:
            return F
        r1, r2 = D[1], D[2]
        g = -np.einsum("bi,bi->b", diff, r1)
        H = np.einsum("bi,bi->b", r1, r1) - np.einsum("bi,bi->b", diff, r2)
        speed = np.linalg.norm(r1, axis=1)
        scale = speed * np.maximum(np.sqrt(2 * F), TINY)
        return F, g[:, None], H[:, None, None], scale[:, None]

    return objective


def _unilateral_state(x, master: Curve, t, residual, boundary, slave_tangent, radii,
                      kind="unilateral"):
    D = master._derivs(np.asarray(t), 2)
    fr2 = frenet_from_derivatives(D[1], D[2], master.kappa_tol)
    kin = contact_kinematics(x, D[0], slave_tangent, None, fr2, radii)
    diff = x - D[0]
    hmin = float((D[1] @ D[1] - diff @ D[2]) / (D[1] @ D[1]))
    return CppState(kind, None, float(t), None, tuple(map(float, x)), tuple(map(float, D[0])),
                    kin, float(residual), bool(boundary), hmin)


def unilateral_cpp(x, master: Curve, settings: Optional[SolverSettings] = None,
                   slave_tangent=None, radii=None) -> MultiplicityReport:
    """All local minima of the distance from point ``x`` to ``master``.

    The residual ``(x - r(t)) . r'(t)`` is driven to zero by Newton iteration
    from equispaced starts; sign-change brackets missed by Newton are closed
    with Brent's method.
    """
    settings = settings or SolverSettings()
    x = np.asarray(x, dtype=float)
    if x.shape != (3,) or not np.all(np.isfinite(x)):
        raise ValueError("x must be a finite 3-vector")
    starts = _starts(master, settings.n_start)
    objective = _unilateral_objective(x, master)
    lo, hi = np.array([master.t_lo]), np.array([master.t_hi])
    per = np.array([master.periodic])
    res = _merge(_run(objective, starts[:, None], lo, hi, per, settings))

    found = []  # (t, residual, boundary)
    for k in range(len(starts)):
        if res["converged"][k]:
            t = float(master.wrap(res["x"][k, 0]))
            found.append((t, res["residual"][k],
                          bool(res["at_bound"][k, 0]) or _near_end(master, t)))

    # bisection-class fallback on brackets where f = (x - r).r' goes from + to -
    f = _residual_fn(x, master)
    grid = np.sort(starts)
    if master.periodic:
        grid = np.append(grid, grid[0] + master.span)
    fv = np.array([f(t) for t in grid])
    for a, b, fa, fb in zip(grid[:-1], grid[1:], fv[:-1], fv[1:]):
        if fa > 0 > fb and not any(a <= _unwrap_near(t, a, master) <= b
                                   for t, _, _ in found):
            t = brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
            found.append((float(master.wrap(t)), 0.0, False))

    spans = np.array([master.span])
    minima, degenerate, boundary, rejected = [], [], [], []
    for t, r, at_b in found:
        state = _unilateral_state(x, master, t, r, at_b, slave_tangent, radii)
        _bucket(state, (t,), at_b, settings, minima, degenerate, boundary, rejected)
    return _finish(minima, degenerate, boundary, rejected, len(starts), spans,
                   np.array([master.periodic]), settings)


def _unwrap_near(t, ref, curve):
    if not curve.periodic:
        return t
    return t + curve.span * round((ref - t) / curve.span)


def _residual_fn(x, master):
    def f(t):
        D = master._derivs(np.asarray(master.wrap(t)), 1)
        return float((x - D[0]) @ D[1])

    return f


def _near_end(curve: Curve, t) -> bool:
    """Converged onto an interval end without being clamped there."""
    if curve.periodic:
        return False
    return min(t - curve.t_lo, curve.t_hi - t) <= BOUND_TOL * curve.span


def _bucket(state, params, at_bound, settings, minima, degenerate, boundary, rejected):
    if at_bound:
        boundary.append((params, state))
    elif state.hessian_min < -settings.degeneracy_tol:
        rejected.append((params, state))
    elif state.hessian_min <= settings.degeneracy_tol:
        degenerate.append((params, state))
    else:
        minima.append((params, state))


def _finish(minima, degenerate, boundary, rejected, samples, spans, periodic, settings):
    tol = settings.dedup_tol

    def dd(items):
        return _dedup([(np.array(p), s.residual, s) for p, s in items], spans, periodic, tol)

    mins = [(p, s) for p, _, s in dd(minima)]
    degs = [(p, s) for p, _, s in dd(degenerate)]
    # a point counted both ways is kept as a strict minimum
    degs = [(p, s) for p, s in degs
            if not any(np.all(_param_distance(p, q, spans, periodic) <= tol) for q, _ in mins)]
    bnd = [s for _, _, s in dd(boundary)]
    rej = [s for _, _, s in dd(rejected)]
    return classify(mins, degs, bnd, rej, samples, spans, periodic, settings)


# --------------------------------------------------------------------------- bilateral


def _bilateral_objective(slave: Curve, master: Curve):
    def objective(X, order):
        t1 = slave.wrap(X[:, 0])
        t2 = master.wrap(X[:, 1])
        A = slave._derivs(t1, order)
        Bd = master._derivs(t2, order)
        diff = A[0] - Bd[0]
        F = 0.5 * np.einsum("bi,bi->b", diff, diff)
        if order == 0:
            return F
        a1, a2, b1, b2 = A[1], A[2], Bd[1], Bd[2]
        g = np.stack([np.einsum("bi,bi->b", diff, a1), -np.einsum("bi,bi->b", diff, b1)], axis=1)
        H = np.empty((len(X), 2, 2))
        H[:, 0, 0] = np.einsum("bi,bi->b", a1, a1) + np.einsum("bi,bi->b", diff, a2)
        H[:, 1, 1] = np.einsum("bi,bi->b", b1, b1) - np.einsum("bi,bi->b", diff, b2)
        H[:, 0, 1] = H[:, 1, 0] = -np.einsum("bi,bi->b", a1, b1)
        d = np.maximum(np.sqrt(2 * F), TINY)
        scale = np.stack([np.linalg.norm(a1, axis=1) * d, np.linalg.norm(b1, axis=1) * d], axis=1)
        return F, g, H, scale

    return objective


def bilateral_state(slave: Curve, master: Curve, t1, t2, residual, boundary, radii=None,
                    hessian=None, kind="bilateral") -> CppState:
    A = slave._derivs(np.asarray(t1), 2)
    Bd = master._derivs(np.asarray(t2), 2)
    fr1 = frenet_from_derivatives(A[1], A[2], slave.kappa_tol)
    fr2 = frenet_from_derivatives(Bd[1], Bd[2], master.kappa_tol)
    kin = contact_kinematics(A[0], Bd[0], A[1], fr1, fr2, radii)
    hmin = None
    if hessian is not None:
        ref = max(A[1] @ A[1], Bd[1] @ Bd[1])
        hmin = float(np.linalg.eigvalsh(hessian).min() / ref)
    return CppState(kind, float(t1), float(t2), None, tuple(map(float, A[0])),
                    tuple(map(float, Bd[0])), kin, float(residual), bool(boundary), hmin)


def bilateral_cpp(slave: Curve, master: Curve, settings: Optional[SolverSettings] = None,
                  radii=None) -> MultiplicityReport:
    """Pairs of mutually closest points between two curves.

    Damped Newton on the squared distance from an ``n_start x n_start`` grid of
    starts per segment pair; only interior local minima enter the
    classification.
    """
    settings = settings or SolverSettings()
    s1 = _starts(slave, settings.n_start)
    s2 = _starts(master, settings.n_start)
    X0 = np.array([(a, b) for a in s1 for b in s2])
    lo = np.array([slave.t_lo, master.t_lo])
    hi = np.array([slave.t_hi, master.t_hi])
    per = np.array([slave.periodic, master.periodic])
    spans = hi - lo
    res = _merge(_run(_bilateral_objective(slave, master), X0, lo, hi, per, settings))

    minima, degenerate, boundary, rejected = [], [], [], []
    for k in range(len(X0)):
        if not res["converged"][k]:
            continue
        t1 = float(slave.wrap(res["x"][k, 0]))
        t2 = float(master.wrap(res["x"][k, 1]))
        at_b = bool(res["at_bound"][k].any()) or _near_end(slave, t1) or _near_end(master, t2)
        try:
            state = bilateral_state(slave, master, t1, t2, res["residual"][k], at_b, radii,
                                    res["hessian"][k])
        except ValueError:
            continue  # intersecting curves: d = 0 is rejected as degenerate
        _bucket(state, (t1, t2), at_b, settings, minima, degenerate, boundary, rejected)
    return _finish(minima, degenerate, boundary, rejected, len(X0), spans, per, settings)


# --------------------------------------------------------------------------- tube surface


def _tube_direction(master: Curve):
    """Frame field choice: Frenet where defined on the whole curve, else a
    constant axis direction least aligned with the tangent."""
    ts = np.linspace(master.t_lo, master.t_hi, 64 * master.n_segments + 1)
    D = master._derivs(ts, 2)
    speed = np.linalg.norm(D[1], axis=1)
    kappa = np.linalg.norm(np.cross(D[1], D[2]), axis=1) / speed**3
    if kappa.min() > master.kappa_tol:
        return None
    tan = D[1] / speed[:, None]
    axes = np.eye(3)
    worst = np.abs(tan @ axes.T).max(axis=0)
    k = int(np.argmin(worst))
    if worst[k] > 1.0 - 1e-10:
        raise DegenerateFrameError("no frame field orthogonal to the master tangent")
    return axes[k]


def _tube_objective(x, master: Curve, R2, direction):
    def objective(X, order):
        t = master.wrap(X[:, 0])
        th = X[:, 1]
        m = min(order, 2)
        D = master._derivs(t, m)
        N, Bn = frame_field_derivatives(master, t, m, direction)
        c, s = np.cos(th)[:, None], np.sin(th)[:, None]
        p = D[0] + R2 * (c * N[0] + s * Bn[0])
        diff = x - p
        F = 0.5 * np.einsum("bi,bi->b", diff, diff)
        if order == 0:
            return F
        p_t = D[1] + R2 * (c * N[1] + s * Bn[1])
        p_h = R2 * (-s * N[0] + c * Bn[0])
        p_tt = D[2] + R2 * (c * N[2] + s * Bn[2])
        p_th = R2 * (-s * N[1] + c * Bn[1])
        p_hh = -R2 * (c * N[0] + s * Bn[0])
        dot = lambda u, v: np.einsum("bi,bi->b", u, v)  # noqa: E731
        g = np.stack([-dot(diff, p_t), -dot(diff, p_h)], axis=1)
        H = np.empty((len(X), 2, 2))
        H[:, 0, 0] = dot(p_t, p_t) - dot(diff, p_tt)
        H[:, 1, 1] = dot(p_h, p_h) - dot(diff, p_hh)
        H[:, 0, 1] = H[:, 1, 0] = dot(p_t, p_h) - dot(diff, p_th)
        dist = np.maximum(np.sqrt(2 * F), TINY)
        scale = np.stack([np.linalg.norm(p_t, axis=1) * dist,
                          np.linalg.norm(p_h, axis=1) * dist], axis=1)
        return F, g, H, scale

    return objective


def tube_surface_cpp(x, master: Curve, R2: float, settings: Optional[SolverSettings] = None,
                     slave_tangent=None) -> CppState:
    """Project ``x`` onto the tube of radius ``R2`` around the master centerline.

    Seeds from the unique centerline projection; the returned state's ``x2`` is
    the surface foot point and ``kinematics.gap`` the signed surface gap.
    """
    settings = settings or SolverSettings()
    x = np.asarray(x, dtype=float)
    if not R2 > 0:
        raise ValueError("R2 must be positive")
    try:
        uni = unilateral_cpp(x, master, settings)
    except DegenerateParametrizationError as exc:
        raise AmbiguousProjectionError("point lies on the master centerline") from exc
    if uni.kind != Multiplicity.UNIQUE:
        raise AmbiguousProjectionError(
            f"centerline projection is {uni.kind.value}; surface coordinates are ill-posed")
    seed = uni.solutions[0]
    if seed.kinematics.d < 1e-12 * max(R2, 1.0):
        raise AmbiguousProjectionError("point lies on the master centerline")
    direction = _tube_direction(master)
    t0 = seed.t2
    N, Bn = frame_field_derivatives(master, np.asarray(t0), 0, direction)
    radial = x - np.array(seed.x2)
    th0 = math.atan2(float(radial @ Bn[0]), float(radial @ N[0]))

    lo = np.array([master.t_lo, -math.pi])
    hi = np.array([master.t_hi, math.pi])
    per = np.array([master.periodic, True])
    out = minimize_batch(_tube_objective(x, master, R2, direction), np.array([[t0, th0]]),
                         lo, hi, per, settings.newton_tol, settings.accept_tol,
                         settings.max_newton_iter, settings.max_fallback_iter)
    if not out.converged[0]:
        raise ProjectionError("tube-surface projection did not converge")
    t, th = float(master.wrap(out.x[0, 0])), float(out.x[0, 1])
    D = master._derivs(np.asarray(t), 2)
    N, Bn = frame_field_derivatives(master, np.asarray(t), 0, direction)
    foot = D[0] + R2 * (math.cos(th) * N[0] + math.sin(th) * Bn[0])
    fr2 = frenet_from_derivatives(D[1], D[2], master.kappa_tol)
    kin = contact_kinematics(x, D[0], slave_tangent, None, fr2, (0.0, R2))
    return CppState("tube-surface", None, t, th, tuple(map(float, x)), tuple(map(float, foot)),
                    kin, float(out.residual[0]), bool(out.at_bound[0, 0]), None)
