"""Kernel backend selection: compiled extension if available, numpy fallback.

Set SHALLOWRANGE_PURE_PYTHON=1 to force the fallback (used by the kernel
benchmark and the backend-equivalence tests).
"""

from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("SHALLOWRANGE_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.BACKEND

orient_det = _impl.orient_det
halfplane_mask = _impl.halfplane_mask
disk_mask = _impl.disk_mask
