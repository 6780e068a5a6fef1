"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``PARTIALXP_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernel_py

try:
    if os.environ.get("PARTIALXP_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _kernel as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def reach(ct, fixed, stop_mask: int = 0) -> tuple[int, int]:
    """Reachable class mask and node-visit count for cell assignment ``fixed``."""
    if _compiled is not None and ct.fits_u64:
        return _compiled.reach(ct, fixed, stop_mask)
    return _kernel_py.reach(ct, fixed, stop_mask)
