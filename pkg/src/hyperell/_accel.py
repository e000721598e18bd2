"""Numba switch.

Set ``HYPERELL_DISABLE_NUMBA=1`` to force the pure-numpy kernels (useful for
debugging, and for benchmarking the two paths against each other).
"""
import os

_DISABLED = os.environ.get("HYPERELL_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(fn):
            return fn

        return wrap


def backend():
    return "numba" if HAVE_NUMBA else "numpy"
