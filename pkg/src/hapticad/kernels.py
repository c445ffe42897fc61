"""Numeric kernel backend, chosen once at import.

The compiled ``_kernels`` extension is used when it is importable; otherwise
the numpy versions in ``_kernels_py`` are. Setting ``HAPTICAD_PURE_PYTHON=1``
forces the numpy path. ``BACKEND`` names the active implementation.
"""

import os

from . import _kernels_py

if os.environ.get("HAPTICAD_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "cython"

actuator_force = _impl.actuator_force
mlp_forward = _impl.mlp_forward
loss_and_grads = _impl.loss_and_grads


def compiled():
    """Return the compiled kernel module, or None when it is not built."""
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels
