"""Kernel backend selection.

The compiled extension is used when it imports; otherwise (or when
``WFKIT_PURE=1``) the numpy versions are used.  ``BACKEND`` names the choice.
"""

import os

from . import _kernels_py as pure

if os.environ.get("WFKIT_PURE", "") not in ("", "0"):
    _impl = pure
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        _impl = pure
        BACKEND = "python"

cap_max = _impl.cap_max
line_integrals = _impl.line_integrals
polygon_crossings = _impl.polygon_crossings

__all__ = ["BACKEND", "cap_max", "line_integrals", "polygon_crossings", "pure"]
