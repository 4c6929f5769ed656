"""Kernel selection.

The compiled Jacobi sweep is used when the extension was built; otherwise the
pure-Python version is used. Setting ``ENTLAW_PURE_PYTHON=1`` forces the
fallback (useful for benchmarking and for testing both paths).
"""

from __future__ import annotations

import os

from . import _jacobi_py

try:
    if os.environ.get("ENTLAW_PURE_PYTHON"):
        raise ImportError("pure-Python kernels requested")
    from . import _jacobi_ext
except ImportError:
    _jacobi_ext = None

BACKENDS = {"python": _jacobi_py.jacobi_inplace}
if _jacobi_ext is not None:
    BACKENDS["compiled"] = _jacobi_ext.jacobi_inplace

BACKEND = "compiled" if "compiled" in BACKENDS else "python"
jacobi_inplace = BACKENDS[BACKEND]
