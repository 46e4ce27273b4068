"""Dynamic working-set outer loop.

Each iteration solves the problem restricted to the current working set,
recomputes the full gradient, extracts the violating coordinates, and admits
the heaviest of them on top of the surviving support.  The admission budget
grows geometrically while the support outpaces it and resets when the support
growth stalls, so the working set tracks the support instead of doubling past
it.  Zero variables are dropped from the next working set.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .instance import Instance
from .linalg import gradient, objective
from .solver import SolverConfig, default_inner_tol, solve_restricted

__all__ = [
    "DwsConfig",
    "TraceRecord",
    "RunResult",
    "violating_set",
    "init_working_set",
    "next_tau",
    "run_dws",
]


@dataclass(frozen=True)
class DwsConfig:
    """Outer-loop settings.

    ``tau=None`` resolves to ``min(floor(4*ln(n)^2), k)`` and
    ``kkt_eps=None`` to ``10 * tol_inner``; see :meth:`resolve`.
    """

    h: float = 2.0
    tau: int | None = None
    p0: int = 10
    kkt_eps: float | None = None
    max_outer: int = 500

    def __post_init__(self):
        if not 1.0 < self.h <= 2.0:
            raise ValueError("h must lie in (1, 2]")
        if self.tau is not None and self.tau < 1:
            raise ValueError("tau must be at least 1")
        if self.p0 < 1:
            raise ValueError("p0 must be at least 1")
        if self.kkt_eps is not None and self.kkt_eps < 0:
            raise ValueError("kkt_eps must be nonnegative")
        if self.max_outer < 1:
            raise ValueError("max_outer must be at least 1")

    def resolve(self, n: int, k: int, tol_inner: float) -> "DwsConfig":
        """Fill the data-dependent defaults for a concrete problem.

        ``tau`` is clamped into [1, k]: the base step may not exceed the
        number of observations (the default formula crosses k on small
        problems).
        """
        tau = self.tau
        if tau is None:
            tau = min(int(math.floor(4.0 * math.log(n) ** 2)), k)
        tau = max(1, min(tau, k))
        kkt_eps = self.kkt_eps
        if kkt_eps is None:
            # inner inexactness can push |grad| marginally above eta on
            # variables the solver zeroed; without slack the loop can stall
            # re-admitting them forever
            kkt_eps = 10.0 * tol_inner
        return replace(self, tau=tau, kkt_eps=kkt_eps)


@dataclass(frozen=True)
class TraceRecord:
    """Per-outer-iteration metrics."""

    r: int
    ws_size: int
    supp_size: int
    e_size: int
    tau_next: int
    objective: float
    inner_iters: int
    cum_seconds: float


@dataclass
class RunResult:
    """Everything a run produced, including per-iteration audit data."""

    x: np.ndarray
    trace: list[TraceRecord] = field(default_factory=list)
    iterates: list[np.ndarray] = field(default_factory=list)
    working_sets: list[np.ndarray] = field(default_factory=list)
    violating_sets: list[np.ndarray] = field(default_factory=list)
    a_values: list[int] = field(default_factory=list)
    truncated: bool = False
    inner_failures: int = 0
    cfg: DwsConfig | None = None
    scfg: SolverConfig | None = None

    @property
    def sum_tau(self) -> int:
        return sum(rec.tau_next for rec in self.trace)

    @property
    def max_ws_size(self) -> int:
        return max((rec.ws_size for rec in self.trace), default=0)

    @property
    def final_objective(self) -> float:
        return self.trace[-1].objective if self.trace else math.nan


def violating_set(grad, eta: float, kkt_eps: float = 0.0,
                  exclude=None) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates whose partial derivative exceeds the threshold in magnitude.

    Returns ``(indices, weights)`` with ``weights = |grad|`` restricted to the
    violators, sorted by descending weight with ties broken by ascending
    index.  ``exclude`` (typically the working set) is removed exactly, which
    keeps the violating set disjoint from the working set by construction.
    """
    grad = np.asarray(grad, dtype=np.float64)
    w = np.abs(grad)
    mask = w > eta + kkt_eps
    if exclude is not None:
        mask[np.asarray(exclude, dtype=np.intp)] = False
    idx = np.nonzero(mask)[0]
    if idx.size == 0:
        return idx.astype(np.intp), np.empty(0)
    order = np.lexsort((idx, -w[idx]))
    idx = idx[order].astype(np.intp)
    return idx, w[idx]


def init_working_set(grad0, p0: int) -> np.ndarray:
    """Indices of the ``p0`` largest gradient magnitudes, sorted ascending.

    Ties break by ascending index.  Sub-threshold coordinates may be included
    when fewer than ``p0`` violators exist.
    """
    grad0 = np.asarray(grad0, dtype=np.float64)
    n = grad0.size
    if not 1 <= p0 <= n:
        raise ValueError(f"p0 must lie in [1, {n}]")
    order = np.lexsort((np.arange(n), -np.abs(grad0)))
    return np.sort(order[:p0].astype(np.intp))


def next_tau(supp_now: int, supp_prev: int, a_prev: int, cfg: DwsConfig,
             k: int, e_size: int) -> tuple[int, int]:
    """Admission budget and growth exponent for the next iteration.

    ``m`` is the smallest integer >= -1 with
    ``supp_now <= h^m * tau + supp_prev``, found by iteration to avoid
    logarithm boundary errors at exact powers.  The exponent may grow by at
    most one per iteration, and the budget is clamped by ``k`` and the
    violating-set size.
    """
    if cfg.tau is None:
        raise ValueError("cfg must be resolved (tau is None)")
    if min(supp_now, supp_prev, e_size, k) < 0 or a_prev < 0:
        raise ValueError("counts must be nonnegative")
    h, tau = cfg.h, cfg.tau
    m = -1
    while supp_now > (h ** m) * tau + supp_prev:
        m += 1
    a_now = min(m + 1, a_prev + 1)
    if a_now < 0:
        a_now = 0
    tau_next = min(int(math.floor(h ** a_now * tau)), k, e_size)
    return tau_next, a_now


class DwsPolicy:
    """Working-set update rule of the dynamic method."""

    name = "dws"

    def supp_prev0(self, cfg: DwsConfig) -> int:
        return 0

    def initial_ws(self, grad0, cfg: DwsConfig) -> np.ndarray:
        return init_working_set(grad0, min(cfg.p0, grad0.size))

    def plan(self, supp_now, supp_prev, a_prev, cfg, k, e_size, r,
             n) -> tuple[int, int]:
        return next_tau(supp_now, supp_prev, a_prev, cfg, k, e_size)

    def build_ws(self, supp_idx, e_idx, tau_next, cfg, n, grad) -> np.ndarray:
        return np.union1d(supp_idx, e_idx[:tau_next]).astype(np.intp)


def run_working_set_loop(inst: Instance, cfg: DwsConfig, scfg: SolverConfig,
                         policy) -> RunResult:
    """Shared outer loop; the policy decides how working sets evolve."""
    a, b, eta = inst.a, inst.b, inst.eta
    k, n = a.shape
    atb = a.T @ b
    tol = scfg.tol_inner if scfg.tol_inner is not None else default_inner_tol(atb)
    scfg = replace(scfg, tol_inner=tol)
    cfg = cfg.resolve(n=n, k=k, tol_inner=tol)

    t0 = time.perf_counter()
    x = np.zeros(n)
    grad = -atb
    result = RunResult(x=x, cfg=cfg, scfg=scfg)

    e_idx, _ = violating_set(grad, eta, cfg.kkt_eps)
    if e_idx.size == 0:
        return result

    ws = policy.initial_ws(grad, cfg)
    supp_prev = policy.supp_prev0(cfg)
    a_prev = 0
    r = 1
    while True:
        a_w = np.asfortranarray(a[:, ws])
        sol = solve_restricted(a_w, b, eta, x[ws], scfg)
        if not sol.converged:
            result.inner_failures += 1
        x = np.zeros(n)
        x[ws] = sol.x_w
        supp_idx = ws[sol.x_w != 0.0]
        grad = gradient(a, atb, x, supp_idx)
        e_idx, _ = violating_set(grad, eta, cfg.kkt_eps, exclude=ws)
        tau_next, a_now = policy.plan(
            supp_idx.size, supp_prev, a_prev, cfg, k, e_idx.size, r, n)
        result.trace.append(TraceRecord(
            r=r,
            ws_size=int(ws.size),
            supp_size=int(supp_idx.size),
            e_size=int(e_idx.size),
            tau_next=int(tau_next),
            objective=objective(a, b, eta, x),
            inner_iters=sol.iters_used,
            cum_seconds=time.perf_counter() - t0,
        ))
        result.iterates.append(x.copy())
        result.working_sets.append(ws.copy())
        result.violating_sets.append(e_idx.copy())
        result.a_values.append(int(a_now))
        if e_idx.size == 0:
            break
        if r >= cfg.max_outer:
            result.truncated = True
            break
        ws = policy.build_ws(supp_idx, e_idx, tau_next, cfg, n, grad)
        supp_prev = supp_idx.size
        a_prev = a_now
        r += 1

    result.x = x
    return result


def run_dws(inst: Instance, cfg: DwsConfig | None = None,
            scfg: SolverConfig | None = None) -> RunResult:
    """Run the dynamic working-set method to termination.

    Stops when no violating coordinate remains, at which point the iterate is
    globally optimal up to the combined inner and threshold tolerances; hits
    on ``max_outer`` return the best iterate with ``truncated=True``.
    """
    return run_working_set_loop(inst, cfg or DwsConfig(), scfg or SolverConfig(),
                                DwsPolicy())
