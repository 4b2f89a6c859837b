"""Kernel backend selection.

The compiled extension is preferred; the pure-Python fallback is used when
the extension is missing or when ``ULAMSIG_PURE_PYTHON=1`` is set.  Both
expose the same four kernels with identical contracts.
"""

from __future__ import annotations

import os

from . import _purepy

if os.environ.get("ULAMSIG_PURE_PYTHON", "") not in ("", "0"):
    _impl = _purepy
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _purepy
        BACKEND = "python"

ulam_sieve = _impl.ulam_sieve
cosine_mean = _impl.cosine_mean
grid_cosine_means = _impl.grid_cosine_means
reduce_phases = _impl.reduce_phases

DEFAULT_MEMORY_CAP = int(os.environ.get("ULAMSIG_MEMORY_CAP", 4 * 1024**3))


def default_threads() -> int:
    env = os.environ.get("ULAMSIG_THREADS", "")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1
