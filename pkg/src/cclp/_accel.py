"""Backend selection for the compiled kernels.

Set ``CC_DISABLE_NUMBA=1`` to run the pure-numpy implementations instead of
the numba ones. Both backends consume the same pre-drawn random numbers, so
results are identical either way.
"""

import os

_FALSY = {"", "0", "false", "no", "off"}


def numba_requested() -> bool:
    return os.environ.get("CC_DISABLE_NUMBA", "").strip().lower() in _FALSY


try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

USE_NUMBA = _numba is not None and numba_requested()


def njit(fn):
    """Compile ``fn`` with numba when available, else return it unchanged."""
    if _numba is None:
        return fn
    return _numba.njit(cache=True, nogil=True)(fn)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
