"""Kernel backend selection.

``INGHAMLAB_BACKEND=numpy`` forces the pure-numpy kernels; the default is
numba when it can be imported.  ``INGHAMLAB_THREADS`` caps numba's thread
pool.
"""
import os

BACKEND_ENV = "INGHAMLAB_BACKEND"
THREADS_ENV = "INGHAMLAB_THREADS"

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    HAVE_NUMBA = False


def requested_backend():
    name = os.environ.get(BACKEND_ENV, "numba").strip().lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"{BACKEND_ENV} must be 'numba' or 'numpy', got {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        return "numpy"
    return name


def apply_thread_limit():
    if not HAVE_NUMBA:
        return
    import numba

    if "NUMBA_THREADING_LAYER" not in os.environ:
        # the portable layer; avoids probing for a TBB runtime
        numba.config.THREADING_LAYER = "workqueue"
    value = os.environ.get(THREADS_ENV)
    if not value:
        return

    numba.set_num_threads(max(1, min(int(value), numba.config.NUMBA_NUM_THREADS)))
