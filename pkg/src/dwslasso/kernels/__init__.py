"""Inner-solver kernels with an optional compiled backend.

The compiled extension is used when importable; otherwise the numpy fallback
is selected.  ``DWSLASSO_KERNELS=numpy`` or ``=cython`` forces a backend
(forcing an unbuilt compiled backend raises at import).  History recording is
only available from the numpy backend, and the wrappers route accordingly.
"""

from __future__ import annotations

import os

from . import _pykernels

_forced = os.environ.get("DWSLASSO_KERNELS", "").strip().lower()
if _forced not in ("", "numpy", "cython"):
    raise ImportError(f"DWSLASSO_KERNELS must be 'numpy' or 'cython', got {_forced!r}")

_ck = None
if _forced != "numpy":
    try:
        from . import _ckernels as _ck
    except ImportError:
        _ck = None
        if _forced == "cython":
            raise ImportError(
                "DWSLASSO_KERNELS=cython but the compiled backend is not built; "
                "run `python -m dwslasso.kernels.build`"
            )

BACKEND = "cython" if _ck is not None else "numpy"


def backends() -> dict:
    """Mapping of available backend names to their modules."""
    out = {"numpy": _pykernels}
    if _ck is not None:
        out["cython"] = _ck
    return out


def _select(backend, history):
    if history is not None:
        return _pykernels
    if backend is None:
        return _ck if _ck is not None else _pykernels
    try:
        return backends()[backend]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {backend!r}") from None


def ista_solve(a, b, eta, x0, step, tol, max_iters, f_cap, history=None,
               backend=None):
    mod = _select(backend, history)
    return mod.ista_solve(a, b, eta, x0, step, tol, max_iters, f_cap,
                          history=history)


def gpsr_bb_solve(a, b, eta, x0, alpha0, alpha_min, alpha_max, tol, max_iters,
                  f_cap, history=None, backend=None):
    mod = _select(backend, history)
    return mod.gpsr_bb_solve(a, b, eta, x0, alpha0, alpha_min, alpha_max, tol,
                             max_iters, f_cap, history=history)
