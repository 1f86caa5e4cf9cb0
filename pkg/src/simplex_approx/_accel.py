"""Optional numba acceleration for the hot kernels.

The kernels in ``_kernels`` exist in two forms: explicit loops, which are
compiled with ``numba.njit`` when numba is importable, and vectorized numpy
code. ``SIMPLEX_APPROX_DISABLE_JIT=1`` forces the numpy path even when numba
is installed. ``SIMPLEX_APPROX_THREADS`` caps numba's thread pool.
"""

from __future__ import annotations

import os

_FALSY = ("", "0", "false", "no", "off")

JIT_DISABLED = os.environ.get("SIMPLEX_APPROX_DISABLE_JIT", "0").strip().lower() not in _FALSY

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not JIT_DISABLED


def thread_cap() -> int | None:
    """Return the thread cap from ``SIMPLEX_APPROX_THREADS``, or None if unset."""
    raw = os.environ.get("SIMPLEX_APPROX_THREADS", "").strip()
    if not raw:
        return None
    try:
        cap = int(raw)
    except ValueError:
        return None
    return max(1, cap)


def apply_thread_cap() -> None:
    cap = thread_cap()
    if cap is not None and USE_NUMBA:
        if numba.config.THREADING_LAYER == "default":
            # probe TBB last: old TBB builds only produce a warning and are skipped anyway
            numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
        numba.set_num_threads(min(cap, numba.config.NUMBA_NUM_THREADS))


def njit(func):
    """Compile ``func`` with numba when acceleration is enabled, else return it as is."""
    if USE_NUMBA:
        return numba.njit(cache=True)(func)
    return func


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
