"""Queue kernels: the compiled extension when it is built, else pure Python.

Set ``RFVLC_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
if os.environ.get("RFVLC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py
else:
    _impl = _kernels_py

lindley = _impl.lindley
fcfs_delays = _impl.fcfs_delays
