"""Inner solvers for the working-set-restricted problem.

Two variants solve ``min 0.5*||A_w x - b||^2 + eta*||x||_1`` over the free
coordinates: a Barzilai-Borwein gradient-projection method (fast, the default)
and a fixed-step proximal-gradient method that is provably monotone and serves
as the trusted reference.  Both stop on the coordinate-wise optimality
residual rather than objective stagnation, so the outer loop's violating-set
logic stays meaningful under inner inexactness.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .errors import NumericalError
from .instance import Instance
from .linalg import as_matrix, as_vector, kkt_residual, objective

__all__ = [
    "SolverConfig",
    "RestrictedSolution",
    "default_inner_tol",
    "solve_restricted",
    "solve_full_oracle",
]

VARIANTS = ("gpsr_bb", "ista_oracle")

ORACLE_ITER_CAP = 10_000_000


@dataclass(frozen=True)
class SolverConfig:
    """Inner-solver settings.

    ``tol_inner=None`` resolves to ``1e-9 * (1 + ||A^T b||_inf)`` so the
    stopping threshold scales with the problem magnitude.
    """

    variant: str = "gpsr_bb"
    tol_inner: float | None = None
    max_inner_iters: int = 100_000
    bb_step_bounds: tuple[float, float] = (1e-30, 1e30)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.tol_inner is not None and self.tol_inner <= 0:
            raise ValueError("tol_inner must be positive")
        if self.max_inner_iters < 1:
            raise ValueError("max_inner_iters must be at least 1")
        lo, hi = self.bb_step_bounds
        if not 0 < lo < hi:
            raise ValueError("need 0 < alpha_min < alpha_max")


@dataclass(frozen=True)
class RestrictedSolution:
    """Solution over the working-set coordinates."""

    x_w: np.ndarray
    iters_used: int
    f_value: float
    converged: bool
    history: list | None = None


def default_inner_tol(atb: np.ndarray) -> float:
    """Problem-scaled stopping tolerance."""
    scale = float(np.abs(atb).max()) if atb.size else 0.0
    return 1e-9 * (1.0 + scale)


def _lipschitz_bound(a: np.ndarray) -> float:
    """Largest eigenvalue of ``a.T @ a`` (squared spectral norm), floored."""
    sv = np.linalg.svd(a, compute_uv=False)
    top = float(sv[0]) if sv.size else 0.0
    return max(top * top, 1e-30)


def solve_restricted(a_w, b, eta: float, warm, cfg: SolverConfig | None = None,
                     lip: float | None = None, record_history: bool = False,
                     backend: str | None = None) -> RestrictedSolution:
    """Solve the restricted problem from the warm point.

    The returned solution has coordinate-wise optimality residual at most the
    resolved tolerance, and its objective never exceeds the warm point's
    (up to 1e-12 relative).  On iteration exhaustion the best iterate found is
    returned with ``converged=False``.
    """
    a_w = as_matrix(a_w)
    b = as_vector(b, a_w.shape[0])
    warm = as_vector(warm, a_w.shape[1])
    if eta <= 0.0:
        raise ValueError("eta must be positive")
    cfg = cfg or SolverConfig()
    tol = cfg.tol_inner
    if tol is None:
        tol = default_inner_tol(a_w.T @ b)

    f_warm = objective(a_w, b, eta, warm)
    f_cap = f_warm + 1e-12 * (1.0 + abs(f_warm))
    history: list | None = [] if record_history else None

    if cfg.variant == "ista_oracle":
        if lip is None:
            lip = _lipschitz_bound(a_w)
        x, iters, ok = kernels.ista_solve(
            a_w, b, eta, warm, 1.0 / lip, tol, cfg.max_inner_iters, f_cap,
            history=history, backend=backend)
    else:
        lo, hi = cfg.bb_step_bounds
        x, iters, ok = kernels.gpsr_bb_solve(
            a_w, b, eta, warm, 1.0, lo, hi, tol, cfg.max_inner_iters, f_cap,
            history=history, backend=backend)

    return RestrictedSolution(
        x_w=x,
        iters_used=int(iters),
        f_value=objective(a_w, b, eta, x),
        converged=bool(ok),
        history=history,
    )


def solve_full_oracle(inst: Instance, tol: float) -> np.ndarray:
    """High-precision reference solution over all variables.

    Fixed-step proximal gradient from zero with the exact inverse-Lipschitz
    step; the iteration cap is a hard error because reference solves must
    converge cleanly or not at all.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    a = as_matrix(inst.a)
    b = as_vector(inst.b, a.shape[0])
    step = 1.0 / _lipschitz_bound(a)
    x, iters, ok = kernels.ista_solve(
        a, b, inst.eta, np.zeros(a.shape[1]), step, tol, ORACLE_ITER_CAP,
        np.inf)
    if not ok:
        raise NumericalError(
            f"oracle iteration cap {ORACLE_ITER_CAP} exhausted at tol {tol}")
    return x


def verify_restricted_kkt(a_w, b, eta: float, x_w) -> float:
    """Independent optimality residual of a restricted solution."""
    a_w = as_matrix(a_w)
    g = a_w.T @ (a_w @ as_vector(x_w, a_w.shape[1]) - as_vector(b, a_w.shape[0]))
    return kkt_residual(g, x_w, eta)
