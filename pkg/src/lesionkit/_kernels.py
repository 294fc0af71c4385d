"""Kernel backend selection.

Prefers the compiled extension, falls back to the pure-Python twin.
Set ``LESIONKIT_FORCE_PURE=1`` to force the fallback (used by the
benchmark and by the backend-equivalence tests).
"""
import os

if os.environ.get("LESIONKIT_FORCE_PURE") == "1":
    from . import _purecv as kernel
else:
    try:
        from . import _fastcv as kernel  # type: ignore[attr-defined]
    except ImportError:
        from . import _purecv as kernel

expand_pass = kernel.expand_pass
shrink_pass = kernel.shrink_pass
KERNEL_BACKEND = kernel.BACKEND
