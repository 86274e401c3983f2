"""Kernel selection: compiled Cython sweep when importable, else the Python twin.

Set ``QMLKIT_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _sweep_py

if os.environ.get("QMLKIT_PURE_PYTHON", "") not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _sweep as _compiled
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
KERNELS = {"python": _sweep_py.sweeps}
if _compiled is not None:
    KERNELS["cython"] = _compiled.sweeps


def get_kernel(name: str | None = None):
    name = BACKEND if name is None else name
    try:
        return KERNELS[name]
    except KeyError:
        raise ValueError(f"kernel {name!r} unavailable; have {sorted(KERNELS)}") from None
