"""Hot numerical kernels with interchangeable numba / numpy backends.

The active backend is chosen once at import from ``INGHAMLAB_BACKEND``.
``load(name)`` returns either implementation explicitly (used by tests and
the benchmark).
"""
import importlib

from .._backend import apply_thread_limit, requested_backend
from ._consts import BERN_COEF, HALF_LOG_2PI

_MODULES = {"numba": "._jit", "numpy": "._numpy"}
API = ("loggamma", "loggamma_array", "bessel_psi_array", "bessel_psi_matrix",
       "log_c", "log_c_array", "jacobi_phi_row", "jacobi_phi_matrix", "box_average")


def load(name):
    return importlib.import_module(_MODULES[name], __name__)


BACKEND = requested_backend()
_impl = load(BACKEND)
if BACKEND == "numba":
    apply_thread_limit()

loggamma = _impl.loggamma
loggamma_array = _impl.loggamma_array
bessel_psi_array = _impl.bessel_psi_array
bessel_psi_matrix = _impl.bessel_psi_matrix
log_c = _impl.log_c
log_c_array = _impl.log_c_array
jacobi_phi_row = _impl.jacobi_phi_row
jacobi_phi_matrix = _impl.jacobi_phi_matrix
box_average = _impl.box_average
