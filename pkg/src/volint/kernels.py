"""Kernel backend selection.

The compiled extension ``volint._ckernels`` is used when it was built;
otherwise the pure-Python module with the same API is loaded.  Setting
``VOLINT_PURE_PYTHON=1`` forces the fallback.
"""
from __future__ import annotations

import os

if os.environ.get("VOLINT_PURE_PYTHON"):
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        from . import _pykernels as _impl

BACKEND: str = _impl.BACKEND

orientation_int = _impl.orientation_int
kappa_pairing_num = _impl.kappa_pairing_num
lobachevsky = _impl.lobachevsky
lobachevsky_many = _impl.lobachevsky_many
bloch_wigner = _impl.bloch_wigner
bloch_wigner_many = _impl.bloch_wigner_many

__all__ = [
    "BACKEND",
    "orientation_int",
    "kappa_pairing_num",
    "lobachevsky",
    "lobachevsky_many",
    "bloch_wigner",
    "bloch_wigner_many",
]
