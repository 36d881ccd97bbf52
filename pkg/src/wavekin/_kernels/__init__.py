"""Kernel backend selection: compiled extension when available, NumPy otherwise.

Set ``WAVEKIN_DISABLE_EXT=1`` to force the NumPy fallback even when the
extension is built (useful for debugging and A/B benchmarks).
"""

from __future__ import annotations

import os
from contextlib import contextmanager

from . import collision_np

_BACKENDS = {"numpy": collision_np}

try:
    from . import collision_cy  # compiled at install time; optional

    _BACKENDS["compiled"] = collision_cy
except ImportError:
    collision_cy = None

_DISABLED_ENV = os.environ.get("WAVEKIN_DISABLE_EXT", "").lower() in {"1", "true", "yes", "on"}
_active = "numpy" if (_DISABLED_ENV or "compiled" not in _BACKENDS) else "compiled"


def active_backend() -> str:
    """Name of the backend currently in use ('compiled' or 'numpy')."""
    return _active


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def get(name: str | None = None):
    """Return the backend module by name (default: the active one)."""
    if name is None:
        name = _active
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown kernel backend {name!r}; available: {available_backends()}")


@contextmanager
def use_backend(name: str):
    """Temporarily switch the active backend (tests and benchmarks)."""
    global _active
    get(name)
    previous = _active
    _active = name
    try:
        yield
    finally:
        _active = previous
