"""Kernel backend selection.

The compiled extension is used when it imports; set ``RESPKERN_BACKEND=python``
to force the pure-Python fallback.
"""
import os

from . import _kernels_py

kernels = _kernels_py
BACKEND = "python"

if os.environ.get("RESPKERN_BACKEND", "").lower() != "python":
    try:
        from . import _kernels as kernels  # noqa: F811
    except ImportError:
        pass
    else:
        BACKEND = "compiled"

__all__ = ["kernels", "BACKEND"]
