# Vectorized multi-start minimization of a smooth objective on a box whose
# coordinates are either clamped to [lo, hi] or wrapped periodically.
#
# objective(X, order) takes X of shape (B, n); with order=0 it returns F (B,),
# with order=2 it returns (F, g, H, scale) where scale (B, n) normalizes the
# gradient into the dimensionless residual used for convergence.
from dataclasses import dataclass

import numpy as np

ARMIJO = 1e-4
MAX_HALVINGS = 40


@dataclass
class BatchResult:
    x: np.ndarray
    residual: np.ndarray
    converged: np.ndarray
    at_bound: np.ndarray
    hessian: np.ndarray
    F: np.ndarray


def _project(x, lo, hi, periodic):
    span = hi - lo
    wrapped = lo + np.mod(x - lo, span)
    return np.where(periodic, wrapped, np.clip(x, lo, hi))


def _active_fixed(x, g, lo, hi, periodic):
    at_lo = ~periodic & (x <= lo) & (g > 0)
    at_hi = ~periodic & (x >= hi) & (g < 0)
    return at_lo | at_hi


def _newton_direction(g, H):
    lam, V = np.linalg.eigh(H)
    mag = np.abs(lam)
    floor = np.maximum(1e-8 * mag.max(axis=-1, keepdims=True), 1e-300)
    coef = np.einsum("bji,bj->bi", V, g) / np.maximum(mag, floor)
    return -np.einsum("bij,bj->bi", V, coef)


def minimize_batch(objective, x0, lo, hi, periodic, tol, accept_tol,
                   max_newton, max_fallback):
    x0 = np.asarray(x0, dtype=float)
    B, n = x0.shape
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    periodic = np.asarray(periodic, dtype=bool)

    x = _project(x0.copy(), lo, hi, periodic)
    residual = np.full(B, np.inf)
    converged = np.zeros(B, dtype=bool)
    done = np.zeros(B, dtype=bool)
    fixed_out = np.zeros((B, n), dtype=bool)
    hess = np.zeros((B, n, n))
    Fout = np.zeros(B)
    stall = np.zeros(B, dtype=int)

    for it in range(max_newton + max_fallback + 1):
        idx = np.flatnonzero(~done)
        if idx.size == 0:
            break
        xa = x[idx]
        F, g, H, scale = objective(xa, 2)
        fixed = _active_fixed(xa, g, lo, hi, periodic)
        gf = np.where(fixed, 0.0, g)
        res = np.max(np.abs(gf) / scale, axis=1)
        improved = res < residual[idx]
        stall[idx] = np.where(improved, 0, stall[idx] + 1)
        residual[idx] = res
        fixed_out[idx] = fixed
        hess[idx] = H
        Fout[idx] = F

        ok = res <= tol
        stalled = (stall[idx] >= 3) & (res <= accept_tol)
        finish = ok | stalled
        converged[idx[finish]] = True
        done[idx[finish]] = True
        if it == max_newton + max_fallback:
            break
        keep = ~finish
        idx, xa, F, gf, H, fixed, res = (a[keep] for a in (idx, xa, F, gf, H, fixed, res))
        if idx.size == 0:
            break

        # reduced system: fixed coordinates get an identity row/column
        Hr = H.copy()
        for k in range(n):
            fk = fixed[:, k]
            Hr[fk, k, :] = 0.0
            Hr[fk, :, k] = 0.0
            Hr[fk, k, k] = 1.0
        if it < max_newton:
            p = _newton_direction(gf, Hr)
        else:
            # gradient fallback, scaled by the Hessian's spectral radius
            lam = np.abs(np.linalg.eigvalsh(Hr)).max(axis=1)
            p = -gf / np.maximum(lam, 1e-300)[:, None]
        slope = np.einsum("bi,bi->b", gf, p)

        step = np.ones(idx.size)
        accepted = np.zeros(idx.size, dtype=bool)
        near = res < 1e-6
        xnew = xa.copy()
        for _ in range(MAX_HALVINGS):
            pend = np.flatnonzero(~accepted)
            if pend.size == 0:
                break
            trial = _project(xa[pend] + step[pend, None] * p[pend], lo, hi, periodic)
            Ft = objective(trial, 0)
            armijo = Ft <= F[pend] + ARMIJO * step[pend] * slope[pend]
            flat = near[pend] & (Ft <= F[pend] * (1 + 1e-12) + 1e-300)
            acc = armijo | flat
            xnew[pend[acc]] = trial[acc]
            accepted[pend[acc]] = True
            step[pend[~acc]] *= 0.5
        # no acceptable step: the iterate sits at the rounding floor
        failed = ~accepted
        if failed.any():
            fin = idx[failed]
            converged[fin] = residual[fin] <= accept_tol
            done[fin] = True
        x[idx[accepted]] = xnew[accepted]

    at_bound = fixed_out | (~periodic & ((x <= lo) | (x >= hi)))
    return BatchResult(x, residual, converged, at_bound, hess, Fout)
