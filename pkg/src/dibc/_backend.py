"""Kernel backend selection: compiled extension when available, else pure Python.

Set DIBC_PURE_PYTHON=1 to force the pure-Python kernels.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("DIBC_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

bc_trials = _impl.bc_trials
alice_cheat_trials = _impl.alice_cheat_trials
gain_trials = _impl.gain_trials
coinflip_trials = _impl.coinflip_trials


def backend_name() -> str:
    return _impl.name
