"""Numpy implementations of the inner-solver loops.

The compiled backend (``dwslasso.kernels._ckernels``) mirrors these routines;
this module is the always-available fallback and the only backend that can
record per-iteration history.  Inputs are trusted (validated by the caller).
"""

from __future__ import annotations

import time

import numpy as np

from ..errors import NumericalError


def _kkt(g, x, eta):
    if g.size == 0:
        return 0.0
    v = np.where(x != 0.0, np.abs(g + np.sign(x) * eta),
                 np.maximum(np.abs(g) - eta, 0.0))
    return float(v.max())


def _fval(r, x, eta):
    return 0.5 * float(r @ r) + eta * float(np.abs(x).sum())


def _nviol(g, x, eta):
    # violations among zero coordinates only; used for history rows
    return int(np.count_nonzero((x == 0.0) & (np.abs(g) > eta)))


def ista_solve(a, b, eta, x0, step, tol, max_iters, f_cap, history=None):
    """Proximal-gradient iteration with a fixed step.

    Monotone whenever ``step <= 1/||a||^2``.  Stops when the coordinate-wise
    optimality residual drops to ``tol`` and the objective does not exceed
    ``f_cap``.  Returns ``(x, iterations, converged)``.
    """
    x = np.array(x0, dtype=np.float64)
    thr = step * eta
    t0 = time.perf_counter()
    it = 0
    while True:
        r = a @ x - b
        g = a.T @ r
        f = _fval(r, x, eta)
        if history is not None:
            history.append((f, int(np.count_nonzero(x)), _nviol(g, x, eta),
                            time.perf_counter() - t0))
        if not np.isfinite(f):
            raise NumericalError(f"non-finite objective at inner iteration {it}")
        if _kkt(g, x, eta) <= tol and f <= f_cap:
            return x, it, True
        if it >= max_iters:
            return x, it, False
        z = x - step * g
        x = np.sign(z) * np.maximum(np.abs(z) - thr, 0.0)
        it += 1


def gpsr_bb_solve(a, b, eta, x0, alpha0, alpha_min, alpha_max, tol, max_iters,
                  f_cap, history=None):
    """Barzilai-Borwein gradient projection on the split ``x = u - v``.

    ``u, v >= 0`` turns the objective into a bound-constrained quadratic.
    Every projected step is accepted (nonmonotone) and the step length is
    re-fit from the last displacement, clamped to ``[alpha_min, alpha_max]``.
    Stopping tests the optimality residual of the original objective plus the
    ``f_cap`` guard; on iteration exhaustion the best iterate seen is
    returned with ``converged=False``.
    """
    u = np.maximum(x0, 0.0)
    v = np.maximum(-x0, 0.0)
    x = u - v
    r = a @ x - b
    g = a.T @ r
    alpha = float(alpha0)
    best_f = np.inf
    best_x = x.copy()
    t0 = time.perf_counter()
    it = 0
    while True:
        f = _fval(r, x, eta)
        if history is not None:
            history.append((f, int(np.count_nonzero(x)), _nviol(g, x, eta),
                            time.perf_counter() - t0))
        if not np.isfinite(f):
            raise NumericalError(f"non-finite objective at inner iteration {it}")
        if f < best_f:
            best_f = f
            best_x = x.copy()
        if _kkt(g, x, eta) <= tol and f <= f_cap:
            # confirm on a fresh residual; the incremental update drifts
            r = a @ x - b
            g = a.T @ r
            f = _fval(r, x, eta)
            if _kkt(g, x, eta) <= tol and f <= f_cap:
                return x, it, True
        if it >= max_iters:
            return best_x, it, False
        gu = g + eta
        gv = eta - g
        u1 = np.maximum(u - alpha * gu, 0.0)
        v1 = np.maximum(v - alpha * gv, 0.0)
        # drop the common positive part: x is unchanged bit-for-bit, but the
        # split's null direction (u, v growing together) cannot accumulate
        # and feed the step-length fit
        m = np.minimum(u1, v1)
        u1 -= m
        v1 -= m
        du = u1 - u
        dv = v1 - v
        sts = float(du @ du) + float(dv @ dv)
        if sts == 0.0:
            # projection fixed point short of tol; cannot make progress
            return best_x, it, False
        adx = a @ (du - dv)
        sbs = float(adx @ adx)
        u, v = u1, v1
        x = u - v
        it += 1
        if it % 64 == 0:
            r = a @ x - b  # refresh the incrementally updated residual
        else:
            r = r + adx
        g = a.T @ r
        alpha = min(max(sts / sbs, alpha_min), alpha_max) if sbs > 0.0 else alpha_max
