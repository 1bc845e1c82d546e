"""Backend selection for the Bellman stage sweep.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``SYMDISPATCH_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the numpy implementation is used.
"""

from __future__ import annotations

import os

from . import _stage_py

_force_python = os.environ.get("SYMDISPATCH_PURE_PYTHON", "") not in ("", "0")

if _force_python:
    _impl = _stage_py
else:
    try:
        from . import _stage as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _stage_py

BACKEND: str = _impl.BACKEND
stage_nearest = _impl.stage_nearest
stage_linear = _impl.stage_linear


def get_backend(name: str | None = None):
    """Return the kernel module called ``name`` (``"cython"`` or ``"python"``)."""
    if name is None:
        return _impl
    if name == "python":
        return _stage_py
    if name == "cython":
        from . import _stage  # type: ignore[attr-defined]

        return _stage
    raise ValueError(f"unknown backend {name!r}")


def compiled_available() -> bool:
    try:
        from . import _stage  # type: ignore[attr-defined]  # noqa: F401
    except ImportError:
        return False
    return True
