"""Numba availability and the pure-numpy fallback switch.

Set ``HARTOGS_LAB_DISABLE_NUMBA=1`` in the environment before import to force
every kernel onto its numpy path.
"""

import os

DISABLED = os.environ.get("HARTOGS_LAB_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and not DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` when available, identity decorator otherwise."""
    if not NUMBA_AVAILABLE:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
