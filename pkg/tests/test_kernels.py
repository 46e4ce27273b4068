import numpy as np
import pytest

from dwslasso import SolverConfig, kernels, solve_restricted
from dwslasso.kernels import _pykernels

from conftest import make_instance

has_compiled = "cython" in kernels.backends()
needs_compiled = pytest.mark.skipif(not has_compiled,
                                    reason="compiled backend not built")


def restricted_problem(seed=3, width=40):
    inst = make_instance(n=400, s=8, seed=seed)
    ws = np.sort(np.argsort(-np.abs(inst.a.T @ inst.b))[:width])
    return np.asfortranarray(inst.a[:, ws]), inst.b, inst.eta


def test_default_backend_reported():
    assert kernels.BACKEND in ("numpy", "cython")
    assert "numpy" in kernels.backends()


def test_history_runs_on_numpy_backend():
    a_w, b, eta = restricted_problem()
    hist = []
    x, iters, ok = kernels.ista_solve(a_w, b, eta, np.zeros(a_w.shape[1]),
                                      1.0, 1e-8, 10_000, np.inf, history=hist)
    assert ok
    assert len(hist) == iters + 1
    fvals = [row[0] for row in hist]
    assert fvals[-1] <= fvals[0]


@needs_compiled
@pytest.mark.parametrize("variant", ["gpsr_bb", "ista_oracle"])
def test_backend_parity(variant):
    a_w, b, eta = restricted_problem()
    warm = np.zeros(a_w.shape[1])
    cfg = SolverConfig(variant=variant, tol_inner=1e-10)
    out = {be: solve_restricted(a_w, b, eta, warm, cfg, backend=be)
           for be in ("numpy", "cython")}
    assert out["numpy"].iters_used == out["cython"].iters_used
    assert out["numpy"].converged and out["cython"].converged
    np.testing.assert_allclose(out["numpy"].x_w, out["cython"].x_w,
                               rtol=0, atol=1e-12)


@needs_compiled
def test_compiled_backend_rejects_history():
    a_w, b, eta = restricted_problem()
    from dwslasso.kernels import _ckernels
    with pytest.raises(ValueError, match="history"):
        _ckernels.ista_solve(a_w, b, eta, np.zeros(a_w.shape[1]), 1.0, 1e-8,
                             10, np.inf, history=[])


@needs_compiled
def test_backend_forcing():
    a_w, b, eta = restricted_problem()
    warm = np.zeros(a_w.shape[1])
    sol = solve_restricted(a_w, b, eta, warm, SolverConfig(), backend="cython")
    assert sol.converged


def test_unknown_backend_rejected():
    a_w, b, eta = restricted_problem()
    with pytest.raises(ValueError, match="backend"):
        solve_restricted(a_w, b, eta, np.zeros(a_w.shape[1]), SolverConfig(),
                         backend="fortran")


@needs_compiled
def test_warm_start_parity_from_nonzero_point():
    a_w, b, eta = restricted_problem(seed=9)
    base = solve_restricted(a_w, b, eta, np.zeros(a_w.shape[1]),
                            SolverConfig(tol_inner=1e-6))
    warm = base.x_w
    out = {be: solve_restricted(a_w, b, eta, warm, SolverConfig(), backend=be)
           for be in ("numpy", "cython")}
    np.testing.assert_allclose(out["numpy"].x_w, out["cython"].x_w,
                               rtol=0, atol=1e-12)
