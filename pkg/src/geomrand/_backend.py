"""Pick the compiled generator kernels when available, else the numpy fallback.

Set ``GEOMRAND_BACKEND=python`` to force the fallback (``compiled`` makes a
missing extension an error instead of a silent downgrade).
"""

from __future__ import annotations

import os

from . import _fallback

_requested = os.environ.get("GEOMRAND_BACKEND", "auto").lower()

if _requested == "python":
    kernels = _fallback
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        if _requested == "compiled":
            raise
        kernels = _fallback

BACKEND = "python" if kernels is _fallback else "compiled"
advance = _fallback.advance

__all__ = ["kernels", "BACKEND", "advance"]
