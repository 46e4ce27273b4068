import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dwslasso.linalg import (as_matrix, as_vector, columns, embed, gradient,
                             kkt_residual, matvec, objective)


def naive_matvec(a, x):
    k, n = a.shape
    out = np.zeros(k)
    for i in range(k):
        acc = 0.0
        for j in range(n):
            acc += a[i, j] * x[j]
        out[i] = acc
    return out


def fd_gradient(a, b, x, h=1e-6):
    """Central finite differences of the least-squares term."""
    def f(v):
        r = a @ v - b
        return 0.5 * float(r @ r)

    g = np.zeros(x.size)
    for j in range(x.size):
        e = np.zeros(x.size)
        e[j] = h
        g[j] = (f(x + e) - f(x - e)) / (2.0 * h)
    return g


def fsum_objective(a, b, eta, x):
    """Exact-accumulation recomputation of the objective."""
    k, n = a.shape
    sq = []
    for i in range(k):
        r_i = math.fsum([a[i, j] * x[j] for j in range(n)] + [-b[i]])
        sq.append(r_i * r_i)
    return 0.5 * math.fsum(sq) + eta * math.fsum(abs(v) for v in x)


def test_matvec_scalar():
    assert matvec(np.array([[2.0]]), np.array([3.0])) == np.array([6.0])


def test_matvec_identity():
    x = np.array([1.0, -4.0])
    np.testing.assert_array_equal(matvec(np.eye(2), x), x)


def test_matvec_matches_naive_reference():
    rng = np.random.default_rng(7)
    a = rng.standard_normal((5, 7))
    x = rng.standard_normal(7)
    np.testing.assert_allclose(matvec(a, x), naive_matvec(a, x),
                               rtol=0, atol=1e-12)


def test_matvec_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        matvec(np.ones((2, 3)), np.ones(4))


@given(st.sampled_from([np.nan, np.inf, -np.inf]))
@settings(max_examples=10, deadline=None)
def test_vectors_reject_nonfinite(bad):
    v = np.array([1.0, bad, 0.0])
    with pytest.raises(ValueError, match="finite"):
        as_vector(v)
    with pytest.raises(ValueError, match="finite"):
        as_matrix(v.reshape(1, 3))


def test_matrix_is_column_major():
    a = as_matrix(np.arange(6.0).reshape(2, 3))
    assert a.flags.f_contiguous


def test_gradient_at_zero_is_minus_atb():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((4, 6))
    atb = a.T @ rng.standard_normal(4)
    g = gradient(a, atb, np.zeros(6), np.array([], dtype=int))
    np.testing.assert_array_equal(g, -atb)


def test_gradient_1d():
    a = np.array([[1.0]])
    atb = np.array([2.0])
    g = gradient(a, atb, np.array([1.0]), np.array([0]))
    np.testing.assert_allclose(g, [-1.0])


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((20, 100)) / 12.0
    b = rng.standard_normal(20)
    atb = a.T @ b
    x = np.zeros(100)
    supp = rng.choice(100, size=15, replace=False)
    x[supp] = rng.standard_normal(15)
    g = gradient(a, atb, x, supp)
    fd = fd_gradient(a, b, x)
    assert np.abs(g - fd).max() <= 1e-5 * (1.0 + np.abs(g).max())


def test_gradient_matches_dense_formula():
    rng = np.random.default_rng(11)
    a = rng.standard_normal((8, 30)) / 6.0
    b = rng.standard_normal(8)
    atb = a.T @ b
    x = np.zeros(30)
    x[[2, 9, 17]] = [0.5, -1.0, 2.0]
    g = gradient(a, atb, x, np.array([2, 9, 17]))
    dense = a.T @ a @ x - atb
    assert np.abs(g - dense).max() <= 1e-12 * (1.0 + np.abs(atb).max())


def test_gradient_supp_with_zero_entry_is_allowed():
    a = np.array([[1.0, 0.5]])
    atb = a.T @ np.array([1.0])
    x = np.array([1.0, 0.0])
    loose = gradient(a, atb, x, np.array([0, 1]))  # wasteful, not wrong
    tight = gradient(a, atb, x, np.array([0]))
    np.testing.assert_allclose(loose, tight)


def test_gradient_rejects_out_of_range_index():
    a = np.ones((2, 3))
    atb = np.zeros(3)
    with pytest.raises(ValueError, match="out of range"):
        gradient(a, atb, np.zeros(3), np.array([3]))


def test_objective_at_zero_is_half_bnorm():
    b = np.array([3.0, 4.0])
    assert objective(np.zeros((2, 5)), b, 1.0, np.zeros(5)) == pytest.approx(12.5)


def test_objective_1d():
    assert objective(np.array([[1.0]]), np.array([2.0]), 1.0,
                     np.array([1.0])) == pytest.approx(1.5)


def test_objective_matches_fsum_reference():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((12, 40))
    b = rng.standard_normal(12)
    x = rng.standard_normal(40)
    f = objective(a, b, 0.3, x)
    ref = fsum_objective(a, b, 0.3, x)
    assert abs(f - ref) <= 1e-10 * abs(ref)


def test_objective_permutation_invariant():
    rng = np.random.default_rng(9)
    a = rng.standard_normal((6, 15))
    b = rng.standard_normal(6)
    x = rng.standard_normal(15)
    perm = rng.permutation(15)
    f1 = objective(a, b, 0.7, x)
    f2 = objective(a[:, perm], b, 0.7, x[perm])
    assert abs(f1 - f2) <= 1e-12 * (1.0 + abs(f1))


def test_objective_requires_positive_eta():
    with pytest.raises(ValueError, match="eta"):
        objective(np.ones((1, 1)), np.ones(1), 0.0, np.ones(1))


def test_matvec_column_extraction_composes():
    rng = np.random.default_rng(13)
    a = rng.standard_normal((7, 20))
    w = np.array([1, 4, 5, 11, 19])
    x_w = rng.standard_normal(5)
    full = matvec(a, embed(x_w, w, 20))
    sub = matvec(columns(a, w), x_w)
    assert np.abs(full - sub).max() <= 1e-14 * (1.0 + np.abs(full).max())


def test_columns_extraction_is_bit_exact():
    rng = np.random.default_rng(17)
    a = rng.standard_normal((5, 9))
    idx = np.array([0, 3, 8])
    sub = columns(a, idx)
    for pos, j in enumerate(idx):
        assert np.array_equal(sub[:, pos], np.asarray(a, order="F")[:, j])


def test_kkt_residual_zero_at_1d_solution():
    # closed form: gradient at the solution equals -sign(x)*eta
    g = np.array([-0.5])
    assert kkt_residual(g, np.array([1.5]), 0.5) == 0.0
    assert kkt_residual(np.array([0.3]), np.array([0.0]), 0.5) == 0.0
    assert kkt_residual(np.array([0.9]), np.array([0.0]), 0.5) == pytest.approx(0.4)
