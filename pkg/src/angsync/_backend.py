"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
twin. :func:`use_backend` switches explicitly (tests and benchmarks).
"""
from __future__ import annotations

from types import ModuleType

from . import _core_py

try:
    from . import _core as _compiled
except ImportError:  # extension not built
    _compiled = None

_active: ModuleType = _compiled if _compiled is not None else _core_py


def has_compiled() -> bool:
    return _compiled is not None


def name() -> str:
    return "compiled" if _active is _compiled else "python"


def kernels() -> ModuleType:
    return _active


def use_backend(which: str) -> str:
    """Select ``"compiled"`` or ``"python"``; returns the previous name."""
    global _active
    previous = name()
    if which == "python":
        _active = _core_py
    elif which == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        _active = _compiled
    else:
        raise ValueError(f"unknown backend {which!r}")
    return previous
