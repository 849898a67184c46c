"""Numeric backend selection for the motion kernels.

The compiled extension is preferred; the pure-Python twin is the fallback
and the reference. Set TEMPOFLEET_FORCE_PY=1 to force the fallback (used
by the equivalence tests and the benchmark).
"""

from __future__ import annotations

import os

from . import _kernels_py


def _select():
    if os.environ.get("TEMPOFLEET_FORCE_PY"):
        return _kernels_py
    try:
        from . import _kernels_c
        return _kernels_c
    except ImportError:
        return _kernels_py


_backend = _select()


def backend_name():
    return _backend.backend_name()


def run_motion(prob, dt, t_max, log_every=0):
    return _backend.run_motion(prob, dt, t_max, log_every)


def python_backend():
    """The pure-Python kernel module, regardless of selection."""
    return _kernels_py


def compiled_backend():
    """The compiled kernel module, or None when unavailable."""
    try:
        from . import _kernels_c
        return _kernels_c
    except ImportError:
        return None
