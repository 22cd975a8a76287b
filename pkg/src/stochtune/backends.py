"""Simulation kernel backend selection.

Two interchangeable kernel sets exist: numba-compiled scalar loops
(``_kernels_numba``) and vectorized pure-numpy equivalents
(``_kernels_numpy``).  Both consume identical per-stream random draws,
so with deterministic holding times they produce bit-identical
trajectories; the only divergence is the last ulp of ``log1p`` under
exponential holding times.

The environment variable ``TUNE_BACKEND`` picks the implementation:

* ``auto`` (default) -- numba kernels when numba imports cleanly,
  otherwise the numpy fallback;
* ``numba`` / ``numpy`` -- force one side (forcing numba raises if the
  import fails).

``TUNE_NUM_THREADS`` caps worker parallelism.  The shipped kernels run
one worker per process (desk-scale grids and cycle counts leave nothing
to win from threading), so every cap >= 1 is already honoured; the
value is still parsed and, when the numba backend is active, forwarded
as that library's thread ceiling.
"""

import os

ENV_BACKEND = "TUNE_BACKEND"
ENV_THREADS = "TUNE_NUM_THREADS"

_BACKENDS = ("auto", "numba", "numpy")
_loaded = {}


def thread_cap():
    """Parsed value of ``TUNE_NUM_THREADS``; None when unset, empty,
    unparsable, or 0 (implementation default)."""
    raw = os.environ.get(ENV_THREADS, "").strip()
    if not raw:
        return None
    try:
        cap = int(raw)
    except ValueError:
        return None
    return cap if cap > 0 else None


def _load(name):
    if name in _loaded:
        return _loaded[name]
    if name == "numba":
        from . import _kernels_numba as module

        cap = thread_cap()
        if cap is not None:
            module.apply_thread_cap(cap)
    else:
        from . import _kernels_numpy as module
    _loaded[name] = module
    return module


def get_backend(name=None):
    """Resolve a kernel module by explicit name or the env flag."""
    if name is None:
        name = os.environ.get(ENV_BACKEND, "auto").strip().lower() or "auto"
    if name not in _BACKENDS:
        raise ValueError(
            f"unknown backend {name!r}; expected one of {', '.join(_BACKENDS)}"
        )
    if name == "auto":
        try:
            return _load("numba")
        except ImportError:
            return _load("numpy")
    return _load(name)
