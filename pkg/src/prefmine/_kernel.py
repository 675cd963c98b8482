"""Shortest-path kernel selection.

The compiled Cython kernel is preferred; the pure-Python twin is the
fallback. Both implement the same contract and the same arithmetic, so
results are identical bit for bit. Selection happens at import, can be
forced with the PREFMINE_KERNEL environment variable (``cython`` /
``python`` / ``auto``), and can be switched at runtime for benchmarking.
"""

from __future__ import annotations

import os

from . import _dijkstra_py

try:
    from . import _dijkstra as _dijkstra_ext
except ImportError:
    _dijkstra_ext = None

_IMPLS = {"python": _dijkstra_py}
if _dijkstra_ext is not None:
    _IMPLS["cython"] = _dijkstra_ext

_active = None


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_IMPLS))


def use(name: str) -> str:
    """Select a kernel backend; returns the name actually activated."""
    global _active
    if name in ("auto", "", None):
        name = "cython" if "cython" in _IMPLS else "python"
    if name not in _IMPLS:
        raise ValueError(
            f"kernel backend {name!r} unavailable (have: {available_backends()})"
        )
    _active = _IMPLS[name]
    return name


def backend() -> str:
    return _active.BACKEND


def shortest_path_raw(*args, **kwargs):
    return _active.shortest_path_raw(*args, **kwargs)


use(os.environ.get("PREFMINE_KERNEL", "auto"))
