"""Backend selection for the hot pixel-loop kernels.

Numba JIT is used when available. Set MAKEUPKIT_DISABLE_NUMBA=1 to force
the pure-numpy fallbacks (same arithmetic, same results).
"""

import os

_DISABLED = os.environ.get("MAKEUPKIT_DISABLE_NUMBA", "") not in ("", "0")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit  # noqa: F401

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        # transparent decorator so kernels run as plain python/numpy
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(fn):
            return fn

        return wrap


def backend_name() -> str:
    return "numba" if HAS_NUMBA else "numpy"
