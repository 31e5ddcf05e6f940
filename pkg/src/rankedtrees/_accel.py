"""JIT switch for the numeric kernels.

Kernels are written in the numba-compatible subset of Python and decorated
with :func:`kernel`.  With numba available they are compiled in nopython
mode; setting ``RANKEDTREES_NO_JIT=1`` (or running without numba) leaves
them as plain Python functions operating on numpy arrays.  Either way the
original function stays reachable as ``fn.py_func``, which is what the
benchmark uses to time both paths in a single process.
"""

from __future__ import annotations

import os

_DISABLED = os.environ.get("RANKEDTREES_NO_JIT", "").strip().lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("JIT disabled by RANKEDTREES_NO_JIT")
    from numba import njit as _njit

    USE_NUMBA = True
except ImportError:
    _njit = None
    USE_NUMBA = False


def kernel(fn):
    if USE_NUMBA:
        return _njit(cache=True, nogil=True)(fn)
    fn.py_func = fn
    return fn
