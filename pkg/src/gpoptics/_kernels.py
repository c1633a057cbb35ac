"""Kernel backend selection.

The compiled extension is used when it imports; otherwise, or when
``GPOPTICS_PURE_PYTHON=1`` is set, the pure-Python fallback is used.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("GPOPTICS_PURE_PYTHON", "").strip() not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

fan_solid_angle = _impl.fan_solid_angle
transport = _impl.transport
phase_steps = _impl.phase_steps
apply_family = _impl.apply_family


def thread_count():
    """Worker threads allowed by GPOPTICS_THREADS (0 or unset = auto)."""
    raw = os.environ.get("GPOPTICS_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"GPOPTICS_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError("GPOPTICS_THREADS must be >= 0")
    if n == 0:
        n = os.cpu_count() or 1
    return n
