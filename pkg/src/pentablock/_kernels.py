"""Backend selection for the hot kernels.

The compiled ``_psi_kernel`` extension is used when it was built; otherwise
the pure-Python ``_psi_fallback`` is used.  Setting the environment variable
``PENTABLOCK_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _psi_fallback

BACKEND = "python"
psi_sup = _psi_fallback.psi_sup
psi_sup_batch = _psi_fallback.psi_sup_batch

if os.environ.get("PENTABLOCK_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _psi_kernel
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        psi_sup = _psi_kernel.psi_sup
        psi_sup_batch = _psi_kernel.psi_sup_batch

__all__ = ["BACKEND", "psi_sup", "psi_sup_batch"]
