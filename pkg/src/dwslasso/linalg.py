"""Dense matrix/vector kernels shared by every solver component.

Matrices are float64 and stored column-major (Fortran order): the outer
working-set loop extracts column submatrices every iteration, and contiguous
columns make that extraction a plain memory copy.  Vectors are 1-D float64
arrays.  Public operations validate shapes and reject non-finite input; the
tight inner loops in :mod:`dwslasso.kernels` skip those checks.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "as_matrix",
    "as_vector",
    "as_index_array",
    "columns",
    "embed",
    "matvec",
    "gradient",
    "objective",
    "kkt_violations",
    "kkt_residual",
]


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a 2-D column-major float64 array with finite entries."""
    m = np.asfortranarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if not np.isfinite(m).all():
        raise ValueError("matrix entries must be finite")
    return m


def as_vector(x, size: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a 1-D float64 array, optionally checking its length."""
    v = np.ascontiguousarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got ndim={v.ndim}")
    if size is not None and v.size != size:
        raise ValueError(f"dimension mismatch: expected length {size}, got {v.size}")
    if not np.isfinite(v).all():
        raise ValueError("vector entries must be finite")
    return v


def as_index_array(idx, n: int) -> np.ndarray:
    """Coerce ``idx`` to an index array and bounds-check it against ``[0, n)``."""
    out = np.atleast_1d(np.asarray(idx, dtype=np.intp))
    if out.ndim != 1:
        raise ValueError("index list must be 1-D")
    if out.size and (out.min() < 0 or out.max() >= n):
        raise ValueError(f"index out of range [0, {n})")
    return out


def columns(a, idx) -> np.ndarray:
    """Column submatrix ``a[:, idx]`` as a fresh column-major copy.

    Extraction is bit-exact: the selected columns are copied verbatim.
    """
    a = as_matrix(a)
    idx = as_index_array(idx, a.shape[1])
    return np.asfortranarray(a[:, idx])


def embed(x_w, idx, n: int) -> np.ndarray:
    """Scatter working-set values into a length-``n`` vector, zeros elsewhere."""
    idx = as_index_array(idx, n)
    x_w = as_vector(x_w, idx.size)
    out = np.zeros(n)
    out[idx] = x_w
    return out


def matvec(a, x) -> np.ndarray:
    """Matrix-vector product ``a @ x`` with dimension checks."""
    a = as_matrix(a)
    x = as_vector(x, a.shape[1])
    return a @ x


def gradient(a, atb, x, supp) -> np.ndarray:
    """Gradient of the least-squares term at ``x``.

    Computes ``a.T @ (a @ x) - atb`` touching only the ``supp`` columns for
    the forward product, so the cost is O(k*|supp| + k*n).  ``atb`` must be
    the precomputed ``a.T @ b``.  ``supp`` must cover every nonzero entry of
    ``x``; extra indices are wasteful but harmless.
    """
    a = as_matrix(a)
    n = a.shape[1]
    atb = as_vector(atb, n)
    x = as_vector(x, n)
    supp = as_index_array(supp, n)
    if supp.size == 0:
        return -atb
    ax = a[:, supp] @ x[supp]
    return a.T @ ax - atb


def objective(a, b, eta: float, x) -> float:
    """Value of ``0.5*||a @ x - b||^2 + eta*||x||_1``."""
    a = as_matrix(a)
    b = as_vector(b, a.shape[0])
    x = as_vector(x, a.shape[1])
    if eta <= 0.0:
        raise ValueError("eta must be positive")
    r = a @ x - b
    return 0.5 * float(r @ r) + eta * float(np.abs(x).sum())


def kkt_violations(g, x, eta: float) -> np.ndarray:
    """Coordinate-wise optimality violations at ``x`` given the gradient ``g``.

    At a minimizer every coordinate satisfies: ``|g_i| <= eta`` where
    ``x_i == 0`` and ``g_i == -sign(x_i)*eta`` elsewhere.  The returned vector
    measures how far each coordinate is from its condition.
    """
    g = np.asarray(g, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    zero = np.maximum(np.abs(g) - eta, 0.0)
    nonzero = np.abs(g + np.sign(x) * eta)
    return np.where(x != 0.0, nonzero, zero)


def kkt_residual(g, x, eta: float) -> float:
    """Largest coordinate-wise optimality violation (0 for empty input)."""
    v = kkt_violations(g, x, eta)
    return float(v.max()) if v.size else 0.0
