"""Optimality certificates and verification machinery.

Everything here is an executable check built from the subgradient structure
of the objective: the certificate vectors vanish off the violating set and
certify global optimality when the violating set is empty; moving along a
signed violating axis admits a closed-form line minimizer whose gain obeys an
exact identity; and a unit conical combination of the heaviest violating axes
can be constructed whose alignment with the certificate vector is provably
bounded below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dws import RunResult, violating_set
from .errors import NumericalError
from .instance import Instance
from .linalg import as_vector, gradient, kkt_violations, objective

__all__ = [
    "Certificate",
    "DescentReport",
    "LineMinimum",
    "ContractionRecord",
    "zeta_gamma",
    "check_global",
    "line_minimizer",
    "build_descent",
    "contraction_check",
    "optimum_lower_bound_check",
]


@dataclass(frozen=True)
class Certificate:
    """Global-optimality check result."""

    gamma: np.ndarray
    max_violation: float
    status: str  # "optimal" | "suboptimal"
    worst: tuple[tuple[int, float], ...]  # top offenders, descending
    tol: float


@dataclass(frozen=True)
class LineMinimum:
    """Exact minimizer of the objective along a ray from an iterate."""

    t_star: float
    f_at_y: float
    y: np.ndarray


@dataclass(frozen=True)
class DescentReport:
    """Constructed descent direction and its alignment guarantee."""

    direction: np.ndarray
    cos_bound_required: float
    cos_achieved: float
    premise_satisfied: bool
    line_min_t: float | None = None
    predicted_gain: float | None = None


@dataclass(frozen=True)
class ContractionRecord:
    """Per-iteration contraction measurement."""

    r: int
    tau_next: int
    checked: bool
    reason: str
    ratio: float | None
    bound: float | None
    passed: bool | None


def zeta_gamma(grad, eta: float, e_idx) -> tuple[np.ndarray, np.ndarray]:
    """Certificate pair at a point with gradient ``grad`` and violators ``e_idx``.

    The first vector cancels the gradient off the violating set and saturates
    at ``-sign(grad)*eta`` on it; the second is their sum, which therefore
    vanishes off the violating set and keeps the gradient's signs on it.
    """
    grad = as_vector(grad)
    e_idx = np.asarray(e_idx, dtype=np.intp)
    zeta = -grad.copy()
    zeta[e_idx] = -np.sign(grad[e_idx]) * eta
    gamma = grad + zeta
    return zeta, gamma


def check_global(inst: Instance, x, tol: float) -> Certificate:
    """Coordinate-wise optimality check of ``x`` for the full problem."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    x = as_vector(x, inst.n)
    atb = inst.a.T @ inst.b
    supp = np.nonzero(x)[0]
    grad = gradient(inst.a, atb, x, supp)
    viol = kkt_violations(grad, x, inst.eta)
    e_idx, _ = violating_set(grad, inst.eta)
    _, gamma = zeta_gamma(grad, inst.eta, e_idx)
    order = np.argsort(-viol, kind="stable")[:5]
    worst = tuple((int(i), float(viol[i])) for i in order)
    max_violation = float(viol.max()) if viol.size else 0.0
    status = "optimal" if max_violation <= tol else "suboptimal"
    return Certificate(gamma=gamma, max_violation=max_violation, status=status,
                       worst=worst, tol=float(tol))


def _validate_direction(grad, eta, x, n_dir):
    supp = np.nonzero(n_dir)[0]
    if supp.size == 0:
        raise ValueError("direction must be nonzero")
    if not math.isclose(float(n_dir @ n_dir), 1.0, rel_tol=0, abs_tol=1e-10):
        raise ValueError("direction must have unit norm")
    if np.any(x[supp] != 0.0):
        raise ValueError("direction must be supported off the support of x")
    if np.any(np.abs(grad[supp]) <= eta):
        raise ValueError("direction must be supported on violating coordinates")
    if np.any(np.sign(n_dir[supp]) != -np.sign(grad[supp])):
        raise ValueError("direction must oppose the gradient signs")
    return supp


def line_minimizer(inst: Instance, x, n_dir) -> LineMinimum:
    """Exact minimizer of the objective along ``x + t * n_dir`` for ``t >= 0``.

    ``n_dir`` must be a unit conical combination of signed violating axes at
    ``x`` (validated).  Along such a ray the l1 term is exactly linear, so the
    objective is an exact parabola and the minimizer is closed-form.
    """
    x = as_vector(x, inst.n)
    n_dir = as_vector(n_dir, inst.n)
    atb = inst.a.T @ inst.b
    grad = gradient(inst.a, atb, x, np.nonzero(x)[0])
    _validate_direction(grad, inst.eta, x, n_dir)
    e_idx, _ = violating_set(grad, inst.eta)
    _, gamma = zeta_gamma(grad, inst.eta, e_idx)
    an = inst.a @ n_dir
    denom = float(an @ an)
    if denom <= 0.0:
        raise NumericalError("direction lies in the null space of the matrix")
    t_star = float(-(gamma @ n_dir)) / denom
    y = x + t_star * n_dir
    return LineMinimum(t_star=t_star, f_at_y=objective(inst.a, inst.b, inst.eta, y),
                       y=y)


def build_descent(grad, eta: float, tau_next: int, s_est: int,
                  supp_star=None, a=None) -> DescentReport:
    """Construct a unit descent direction on the heaviest violating axes.

    The candidate axes are the ``tau_next`` heaviest violators.  Starting from
    the single axes, the largest power-of-two subset is combined pairwise
    (each pair merged into their normalized sum, which bisects the right angle
    between them), stage by stage, stopping early once a stage vector comes
    within sixty degrees of the target; the best-aligned candidate produced is
    returned.  When every candidate axis meets the per-axis alignment premise,
    the result provably reaches ``sqrt(tau / (4*(s+tau)*ln(tau)))``.

    ``supp_star`` (the reference support, when known) widens the projection
    target; ``a`` enables the line-minimizer fields of the report.
    """
    grad = as_vector(grad)
    n = grad.size
    if tau_next < 2:
        raise ValueError("tau_next must be at least 2 (log degenerates)")
    if s_est < 1:
        raise ValueError("s_est must be at least 1")
    e_idx, _ = violating_set(grad, eta)
    if e_idx.size < tau_next:
        raise ValueError(
            f"violating set has {e_idx.size} members, need at least {tau_next}")
    g_idx = e_idx[:tau_next]
    gamma = np.zeros(n)
    gamma[e_idx] = np.sign(grad[e_idx]) * (np.abs(grad[e_idx]) - eta)
    if supp_star is None:
        h_idx = g_idx
    else:
        supp_star = np.asarray(supp_star, dtype=np.intp)
        h_idx = np.union1d(g_idx, np.intersect1d(supp_star, e_idx)).astype(np.intp)
    h_norm = float(np.linalg.norm(gamma[h_idx]))
    if h_norm <= 0.0:
        raise NumericalError("certificate vector vanishes on the target set")

    log_tau = math.log(tau_next)
    cos_required = math.sqrt(tau_next / (4.0 * (s_est + tau_next) * log_tau))
    cos_premise = 1.0 / math.sqrt(2.0 * (s_est + tau_next) * log_tau)

    vals = np.abs(gamma[g_idx])  # descending: heaviest violators first
    cos_single = vals / h_norm
    # a hair of tightening so floating-point ties never count as satisfying
    premise = bool(np.all(cos_single >= cos_premise * (1.0 + 1e-9)))

    best_cos = float(cos_single[0])
    best_positions = np.array([0], dtype=np.intp)
    best_coeff = 1.0

    if cos_premise < 0.5:  # premise angle exceeds sixty degrees: combine
        w_size = 1 << int(math.floor(math.log2(tau_next)))
        blocks = [np.array([p], dtype=np.intp) for p in range(w_size)]
        coeff = 1.0
        while len(blocks) > 1:
            coeff /= math.sqrt(2.0)
            blocks = [np.concatenate((blocks[i], blocks[i + 1]))
                      for i in range(0, len(blocks), 2)]
            stage_best = -1.0
            for blk in blocks:
                c = coeff * float(vals[blk].sum()) / h_norm
                if c > stage_best:
                    stage_best = c
                if c > best_cos:
                    best_cos = c
                    best_positions = blk
                    best_coeff = coeff
            if stage_best >= 0.5:  # within sixty degrees of the target
                break

    direction = np.zeros(n)
    sel = g_idx[best_positions]
    direction[sel] = -np.sign(grad[sel]) * best_coeff
    cos_achieved = float(-(gamma[h_idx] @ direction[h_idx]) / h_norm)

    line_min_t = None
    predicted_gain = None
    if a is not None:
        an = np.asarray(a) @ direction
        denom = float(an @ an)
        if denom > 0.0:
            num = float(-(gamma @ direction))
            line_min_t = num / denom
            predicted_gain = 0.5 * num * num / denom

    return DescentReport(
        direction=direction,
        cos_bound_required=cos_required,
        cos_achieved=cos_achieved,
        premise_satisfied=premise,
        line_min_t=line_min_t,
        predicted_gain=predicted_gain,
    )


def contraction_check(inst: Instance, result: RunResult, x_star,
                      eps: float, slack: float = 1e-9) -> list[ContractionRecord]:
    """Measure the per-iteration error contraction against its bound.

    For consecutive iterates whose error exceeds ``eps`` times the squared
    distance to the reference solution (and whose admission budget is at
    least 2), the error ratio must not exceed
    ``1 - eps*tau / (8*(s+tau)*ln(tau))`` plus slack.  Other iterations are
    reported as skipped, not failed.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if len(result.iterates) != len(result.trace):
        raise ValueError("run result lacks per-iteration solutions")
    x_star = as_vector(x_star, inst.n)
    f_star = objective(inst.a, inst.b, inst.eta, x_star)
    s = int(np.count_nonzero(x_star))
    records: list[ContractionRecord] = []
    for i in range(len(result.trace) - 1):
        rec = result.trace[i]
        nxt = result.trace[i + 1]
        tau = rec.tau_next
        if tau < 2:
            records.append(ContractionRecord(rec.r, tau, False,
                                             "admission budget below 2",
                                             None, None, None))
            continue
        xr = result.iterates[i]
        gap = rec.objective - f_star
        dist2 = float(np.sum((x_star - xr) ** 2))
        if gap <= eps * dist2:
            records.append(ContractionRecord(rec.r, tau, False,
                                             "error within eps of distance",
                                             None, None, None))
            continue
        bound = 1.0 - eps * tau / (8.0 * (s + tau) * math.log(tau))
        ratio = (nxt.objective - f_star) / gap
        records.append(ContractionRecord(rec.r, tau, True, "",
                                         float(ratio), float(bound),
                                         bool(ratio <= bound + slack)))
    return records


def optimum_lower_bound_check(inst: Instance, x_star,
                              slack: float = 1e-9) -> bool | None:
    """Check the floor on the optimal value, ``eta * ||b|| / 4``.

    Returns ``None`` (skipped) for the all-zero solution, for which the floor
    does not apply.
    """
    x_star = as_vector(x_star, inst.n)
    if not np.any(x_star):
        return None
    f_star = objective(inst.a, inst.b, inst.eta, x_star)
    floor = inst.eta * float(np.linalg.norm(inst.b)) / 4.0
    return bool(f_star >= floor - slack)
