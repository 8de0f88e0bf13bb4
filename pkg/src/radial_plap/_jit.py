"""Selection between numba-compiled kernels and their interpreted fallback.

Set ``RADIAL_PLAP_DISABLE_JIT=1`` to run every kernel as plain Python/NumPy.
The flag is read once, at import time.
"""

import os
import warnings

_FALSY = ("", "0", "false", "no", "off")

try:
    import numba
    from numba.core.errors import NumbaWarning
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
else:
    # kernels that take other kernels as arguments cannot be cached on disk;
    # they are simply recompiled, which is harmless
    warnings.filterwarnings("ignore", message="Cannot cache compiled function",
                            category=NumbaWarning)

USE_NUMBA = (
    numba is not None
    and os.environ.get("RADIAL_PLAP_DISABLE_JIT", "0").strip().lower() in _FALSY
)


def kernel(fn):
    """Compile ``fn`` with ``numba.njit`` when enabled, else return it unchanged."""
    if USE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


def interpreted(fn):
    """The pure-Python version of a kernel, compiled or not."""
    return getattr(fn, "py_func", fn)
