"""Kernel backend selection.

The compiled Cython module is used when it imports; otherwise the numpy
fallback.  Set ``STEERENGINE_PURE=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _fallback

BACKENDS = {"python": _fallback}

try:
    from . import _kernels
except ImportError:  # extension not built
    _kernels = None
else:
    BACKENDS["compiled"] = _kernels

if os.environ.get("STEERENGINE_PURE") or _kernels is None:
    NAME = "python"
else:
    NAME = "compiled"

kernels = BACKENDS[NAME]


def get(name: str | None = None):
    """Return the kernel module called ``name`` (default: the active one)."""
    if name is None:
        return kernels
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} is not available; have {sorted(BACKENDS)}") from None
