"""Kernel backend selection.

Prefers the compiled extension (``iamsim._kernels``) and falls back to the
numpy implementation. Set IAMSIM_BACKEND=python or =cython to force one;
forcing cython fails loudly when the extension is missing.
"""

from __future__ import annotations

import os

from . import _kernels_py

_forced = os.environ.get("IAMSIM_BACKEND", "").strip().lower()

if _forced == "python":
    _impl = _kernels_py
elif _forced == "cython":
    from . import _kernels as _impl  # type: ignore[no-redef]
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND

first_eligible_index = _impl.first_eligible_index
erm_scan = _impl.erm_scan
best_response_min = _impl.best_response_min
