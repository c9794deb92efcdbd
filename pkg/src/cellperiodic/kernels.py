"""Kernel backend selection.

The compiled extension is used when it was built; setting the environment
variable ``CELLPERIODIC_PURE_PYTHON=1`` before import forces the fallback.
"""

import os

from . import _fallback

try:
    if os.environ.get("CELLPERIODIC_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python kernels requested")
    from . import _kernels as _impl
    BACKEND = "compiled"
except ImportError:
    _impl = _fallback
    BACKEND = "python"

periodic_sweep = _impl.periodic_sweep
rk4_cell = _impl.rk4_cell


def compiled_available():
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        return False
    return True
