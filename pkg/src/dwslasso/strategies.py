"""Comparator working-set policies sharing the outer loop.

``doubling`` targets a working set of twice the current support (the pruning
variant of the size rule used by recent working-set solvers), ``modified_dws``
starts the dynamic method as if the initial support already had ``tau``
entries with ``p0 = tau``, and ``full`` solves over all variables at once.
"""

from __future__ import annotations

import time
from dataclasses import replace

import numpy as np

from .dws import (DwsConfig, DwsPolicy, RunResult, TraceRecord,
                  init_working_set, next_tau, run_working_set_loop)
from .instance import Instance
from .linalg import as_vector
from .solver import SolverConfig, default_inner_tol, solve_restricted

__all__ = [
    "STRATEGIES",
    "doubling_next_ws",
    "modified_dws_next",
    "run_strategy",
]

STRATEGIES = ("dws", "doubling", "modified_dws", "full")


def _heaviest_candidates(grad, supp_idx, n: int) -> np.ndarray:
    """Non-support coordinates ranked by descending weight, ties ascending."""
    mask = np.ones(n, dtype=bool)
    mask[supp_idx] = False
    cand = np.nonzero(mask)[0]
    order = np.lexsort((cand, -np.abs(np.asarray(grad))[cand]))
    return cand[order].astype(np.intp)


def doubling_next_ws(x_r, grad, eta: float, kkt_eps: float,
                     p0: int = 10) -> np.ndarray:
    """Next working set under the doubling rule.

    The working-set size is set to ``2 * |supp(x_r)|`` (at least ``p0``, at
    most ``n``): the support survives, zero variables are dropped, and the
    heaviest non-support coordinates fill the remainder, so violating
    coordinates enter first and the target size is sustained even when few
    of them remain.  ``eta`` and ``kkt_eps`` are accepted for interface
    symmetry with the dynamic rule; weight ordering already places every
    coordinate above the threshold ahead of the rest.
    """
    x_r = as_vector(x_r)
    n = x_r.size
    supp_idx = np.nonzero(x_r)[0].astype(np.intp)
    target = min(max(p0, 2 * supp_idx.size), n)
    take = max(target - supp_idx.size, 0)
    cand = _heaviest_candidates(grad, supp_idx, n)
    return np.union1d(supp_idx, cand[:take]).astype(np.intp)


def modified_dws_next(supp_now: int, supp_prev: int, a_prev: int,
                      cfg: DwsConfig, k: int, e_size: int,
                      r: int) -> tuple[int, int]:
    """Admission budget of the modified dynamic rule.

    Identical to :func:`dwslasso.dws.next_tau` except that in the first
    iteration the previous support size is pretended to be ``tau``.
    """
    if cfg.tau is None:
        raise ValueError("cfg must be resolved (tau is None)")
    if r == 1:
        supp_prev = cfg.tau
    return next_tau(supp_now, supp_prev, a_prev, cfg, k, e_size)


class _DoublingPolicy(DwsPolicy):
    name = "doubling"

    def plan(self, supp_now, supp_prev, a_prev, cfg, k, e_size, r, n):
        target = min(max(cfg.p0, 2 * supp_now), n)
        return max(target - supp_now, 0), 0

    def build_ws(self, supp_idx, e_idx, tau_next, cfg, n, grad):
        cand = _heaviest_candidates(grad, supp_idx, n)
        return np.union1d(supp_idx, cand[:tau_next]).astype(np.intp)


class _ModifiedDwsPolicy(DwsPolicy):
    name = "modified_dws"

    def supp_prev0(self, cfg):
        return cfg.tau

    def initial_ws(self, grad0, cfg):
        return init_working_set(grad0, min(cfg.tau, grad0.size))


def _run_full(inst: Instance, cfg: DwsConfig, scfg: SolverConfig) -> RunResult:
    """One solve over all variables, traced per inner iteration.

    The trace has one row per inner-solver iteration (the meaningful progress
    record for a single full solve); the admission column is zero throughout.
    """
    a, b, eta = inst.a, inst.b, inst.eta
    k, n = a.shape
    atb = a.T @ b
    tol = scfg.tol_inner if scfg.tol_inner is not None else default_inner_tol(atb)
    scfg = replace(scfg, tol_inner=tol)
    cfg = cfg.resolve(n=n, k=k, tol_inner=tol)

    t0 = time.perf_counter()
    sol = solve_restricted(np.asfortranarray(a), b, eta, np.zeros(n), scfg,
                           record_history=True)
    wall = time.perf_counter() - t0
    result = RunResult(x=sol.x_w, cfg=cfg, scfg=scfg)
    history = sol.history or []
    for i, (fval, supp_size, e_size, elapsed) in enumerate(history):
        result.trace.append(TraceRecord(
            r=i + 1,
            ws_size=n,
            supp_size=int(supp_size),
            e_size=int(e_size),
            tau_next=0,
            objective=float(fval),
            inner_iters=1,
            cum_seconds=float(elapsed),
        ))
    if not result.trace:
        result.trace.append(TraceRecord(
            r=1, ws_size=n, supp_size=int(np.count_nonzero(sol.x_w)),
            e_size=0, tau_next=0, objective=sol.f_value,
            inner_iters=sol.iters_used, cum_seconds=wall,
        ))
    result.truncated = not sol.converged
    result.inner_failures = 0 if sol.converged else 1
    return result


def run_strategy(kind: str, inst: Instance, cfg: DwsConfig | None = None,
                 scfg: SolverConfig | None = None) -> RunResult:
    """Run one strategy to termination on ``inst``."""
    cfg = cfg or DwsConfig()
    scfg = scfg or SolverConfig()
    if kind == "dws":
        return run_working_set_loop(inst, cfg, scfg, DwsPolicy())
    if kind == "doubling":
        return run_working_set_loop(inst, cfg, scfg, _DoublingPolicy())
    if kind == "modified_dws":
        return run_working_set_loop(inst, cfg, scfg, _ModifiedDwsPolicy())
    if kind == "full":
        return _run_full(inst, cfg, scfg)
    raise ValueError(f"unknown strategy {kind!r}; expected one of {STRATEGIES}")
