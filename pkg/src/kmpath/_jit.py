"""Numba dispatch switch.

Set ``KMPATH_DISABLE_JIT=1`` before importing :mod:`kmpath` to run every hot
kernel through its pure-numpy fallback. Both code paths are importable at all
times so that they can be compared directly (see ``benchmarks/``).
"""
import os
import warnings

JIT_OPTIONS = {
    "nogil": True,
    "cache": True,
}

try:
    import numba
    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAS_NUMBA = False

USE_JIT = HAS_NUMBA and os.environ.get("KMPATH_DISABLE_JIT", "0").lower() not in ("1", "true", "yes")


def njit(func=None, **options):
    """``numba.njit`` with the package defaults, or identity without numba."""
    opts = {**JIT_OPTIONS, **options}

    def wrap(f):
        if not HAS_NUMBA:
            return f
        return numba.njit(**opts)(f)

    if func is None:
        return wrap
    return wrap(func)


def set_threads(n):
    """Forward a worker-count hint to numba; results do not depend on it."""
    if n is None or not HAS_NUMBA:
        return
    n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    with warnings.catch_warnings():
        # numba complains about optional threading layers it cannot load
        warnings.simplefilter("ignore", numba.NumbaWarning)
        numba.set_num_threads(n)
