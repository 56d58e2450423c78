"""Backend selection for the hot pair loops.

The compiled extension is used when it was built; setting RIESZ_NO_EXT=1
(before import) forces the NumPy fallback. Both backends produce identical
estimates up to floating-point reduction order, which is covered by tests.
"""
from __future__ import annotations

import os

from . import _numpy_backend

if os.environ.get("RIESZ_NO_EXT"):
    _impl = _numpy_backend
    BACKEND = "numpy"
else:
    try:
        from . import _compiled as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _numpy_backend
        BACKEND = "numpy"

pair_power_sums = _impl.pair_power_sums
pair_hist = _impl.pair_hist

__all__ = ["BACKEND", "pair_power_sums", "pair_hist", "_numpy_backend"]
