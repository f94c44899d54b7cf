"""Hot-kernel backend selection.

The compiled Cython extension is used when available; otherwise the numpy
reference implementation is selected.  Set RSSA_PURE_PYTHON=1 to force the
numpy backend (useful for benchmarking and debugging).
"""
import os

from . import _numpy_backend

if os.environ.get("RSSA_PURE_PYTHON"):
    _impl = _numpy_backend
    BACKEND = "numpy"
else:
    try:
        from . import _fast as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _numpy_backend
        BACKEND = "numpy"

family_lie = _impl.family_lie
solve_g_star = _impl.solve_g_star
feasibility_bounds = _impl.feasibility_bounds

__all__ = ["family_lie", "solve_g_star", "feasibility_bounds", "BACKEND"]
