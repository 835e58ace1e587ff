"""Pick the kernel implementation at import time.

The compiled ``_ckernels`` extension is used when it was built; otherwise, or
when ``RESTRICTLAB_PURE_PYTHON`` is set to a non-empty value other than ``0``,
the numpy fallback in ``_pykernels`` is used.  Both expose the same functions.
"""
import os

from . import _pykernels

_forced = os.environ.get("RESTRICTLAB_PURE_PYTHON", "") not in ("", "0")

if _forced:
    kernels = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as kernels
        BACKEND = "cython"
    except ImportError:
        kernels = _pykernels
        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
