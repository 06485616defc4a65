"""Kernel backend selection: compiled extension if available, else pure Python.

Set ZLINK_PURE_PYTHON=1 to force the fallback (used by the benchmark and
by the differential tests).
"""

from __future__ import annotations

import os

from . import _speedups_py

if os.environ.get("ZLINK_PURE_PYTHON"):
    _impl = _speedups_py
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _speedups_py

KIND_STRING = _speedups_py.KIND_STRING
KIND_VECTOR = _speedups_py.KIND_VECTOR
KIND_NESTED = _speedups_py.KIND_NESTED

OK = _speedups_py.OK
ERR_TOO_SHORT = _speedups_py.ERR_TOO_SHORT
ERR_SLOT_BOUNDS = _speedups_py.ERR_SLOT_BOUNDS
ERR_MISALIGNED = _speedups_py.ERR_MISALIGNED

validate = _impl.validate
assemble = _impl.assemble

BACKEND = "c" if _impl.__name__.endswith("_speedups") else "python"


def backend_name() -> str:
    """Which kernel implementation is active: "c" or "python"."""
    return BACKEND
