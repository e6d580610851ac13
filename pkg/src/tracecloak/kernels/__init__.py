"""Hot counting kernels with a compiled core and a numpy fallback.

The Monte Carlo validation of the false-positive bound sorts and compares
millions of random vectors; that inner loop lives here.  At import time we
prefer the Cython extension and fall back to the pure numpy implementation
when it is unavailable.  Set TRACECLOAK_PURE=1 to force the fallback.

Both backends are bit-for-bit equivalent: callers supply the random rows,
so results depend only on the caller's RNG stream.
"""

from __future__ import annotations

import os

from . import _pure

if os.environ.get("TRACECLOAK_PURE", "") not in ("", "0"):
    _impl = _pure
    BACKEND = "pure"
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _pure
        BACKEND = "pure"

count_sorted_within = _impl.count_sorted_within
count_within = _impl.count_within


def backend() -> str:
    """Which implementation was selected at import ('compiled' or 'pure')."""
    return BACKEND
