"""Backend selection for the sweep kernels.

The compiled ``_sweeps`` extension is used when importable; set
``SHADOW_COVER_PURE=1`` to force the pure-Python fallback.
"""
import os

from . import _sweeps_py

BACKEND = "python"
if os.environ.get("SHADOW_COVER_PURE") != "1":
    try:
        from . import _sweeps as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _sweeps_py
else:
    _impl = _sweeps_py

forward_recurrence = _impl.forward_recurrence
backward_recurrence = _impl.backward_recurrence

BACKENDS = {"python": _sweeps_py}
if BACKEND == "compiled":
    BACKENDS["compiled"] = _impl
