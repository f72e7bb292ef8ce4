"""Numba acceleration switch.

Hot kernels are written once and compiled with ``numba.njit`` when available.
Setting the environment variable ``SEHS_NO_NUMBA=1`` (before import) selects
the pure-numpy fallback path instead; results are identical either way, only
slower.  ``benchmarks/bench_kernels.py`` compares the two paths.
"""

import os

_TRUTHY = ("1", "true", "yes", "on")

NUMBA_DISABLED = os.environ.get("SEHS_NO_NUMBA", "").lower() in _TRUTHY

if not NUMBA_DISABLED:
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False
else:
    NUMBA_ENABLED = False


def maybe_njit(func):
    """Compile ``func`` with numba when enabled, otherwise return it as-is."""
    if NUMBA_ENABLED:
        return _njit(cache=True)(func)
    return func
