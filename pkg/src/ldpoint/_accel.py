"""Numba switch.

Set ``LDPOINT_DISABLE_NUMBA=1`` to force the pure-numpy kernels. The choice
made at import time is only the default; :func:`set_backend` flips it at
runtime so both paths can be compared in one process.
"""

from __future__ import annotations

import contextlib
import os

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False

_disabled = os.environ.get("LDPOINT_DISABLE_NUMBA", "0").strip().lower() in ("1", "true", "yes")

_state = {"backend": "numba" if (HAS_NUMBA and not _disabled) else "numpy"}

numba_default = {
    "nogil": True,
    "cache": True,
    "fastmath": False,
    "boundscheck": False,
    "error_model": "numpy",
}


def njit(func):
    """``numba.njit`` with the package defaults, or identity without numba."""
    if not HAS_NUMBA:
        return func
    return numba.njit(**numba_default)(func)


def njit_inline(func):
    if not HAS_NUMBA:
        return func
    opts = dict(numba_default)
    opts["inline"] = "always"
    return numba.njit(**opts)(func)


def backend() -> str:
    return _state["backend"]


def set_backend(name: str) -> None:
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba is not installed")
    _state["backend"] = name


@contextlib.contextmanager
def using_backend(name: str):
    old = backend()
    set_backend(name)
    try:
        yield
    finally:
        set_backend(old)
