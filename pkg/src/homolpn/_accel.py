"""Optional numba acceleration.

Set ``HOMOLPN_DISABLE_NUMBA=1`` to force the pure-numpy kernels even when
numba is importable.
"""

import os

try:
    from numba import njit as _njit

    NUMBA_INSTALLED = True
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    NUMBA_INSTALLED = False

_FLAG = os.environ.get("HOMOLPN_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _FLAG in ("1", "true", "yes", "on")
USE_NUMBA = NUMBA_INSTALLED and not NUMBA_DISABLED


def optional_njit(*args, **kwargs):
    """``numba.njit`` when numba is installed, identity otherwise.

    Compilation is lazy, so decorating a kernel costs nothing until the
    numba path is actually called.
    """

    def decorator(func):
        if NUMBA_INSTALLED:
            return _njit(*args, **kwargs)(func)
        return func

    return decorator
