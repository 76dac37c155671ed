"""Kernel selection: the compiled extension when it imports, else pure Python.

``BLINDTM_BACKEND=python`` forces the fallback.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _fallback

try:  # pragma: no cover - depends on the build
    from . import _kernels as _compiled
except ImportError:  # pragma: no cover
    _compiled = None

HAVE_COMPILED = _compiled is not None


def get(name: str | None = None) -> ModuleType:
    name = name or os.environ.get("BLINDTM_BACKEND") or "auto"
    if name == "python":
        return _fallback
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built; run 'pip install -e .'")
        return _compiled
    if name != "auto":
        raise ValueError(f"unknown backend {name!r}")
    return _compiled if _compiled is not None else _fallback


def active() -> str:
    return "compiled" if get() is _compiled else "python"
