import os
import subprocess
import sys

import numpy as np
import pytest

from inghamlab import kernels

JIT = kernels.load("numba")
NP = kernels.load("numpy")


def _close(a, b, rel=1e-12, abs_=1e-300):
    a, b = np.asarray(a), np.asarray(b)
    scale = np.maximum(np.abs(b), 1.0)
    return np.max(np.abs(a - b) / scale) <= rel or np.max(np.abs(a - b)) <= abs_


def test_loggamma_agree():
    z = np.array([0.3 + 0j, 2.5 + 1j, -1.5 + 0.2j, 30 - 7j, 1 + 300j, 1e-3 + 0j])
    assert _close(JIT.loggamma_array(z), NP.loggamma_array(z))
    assert abs(JIT.loggamma(3.2 + 0.5j) - NP.loggamma(3.2 + 0.5j)) < 1e-13


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 0.75, 1.5, 12.0])
def test_bessel_psi_agree(alpha):
    t = np.concatenate([np.linspace(0, 5, 40), np.geomspace(5, 5e4, 60)])
    assert _close(JIT.bessel_psi_array(alpha, t), NP.bessel_psi_array(alpha, t), rel=1e-11)
    lam, r = np.linspace(0, 50, 7), np.linspace(0, 3, 9)
    assert _close(JIT.bessel_psi_matrix(alpha, lam, r), NP.bessel_psi_matrix(alpha, lam, r), rel=1e-11)


@pytest.mark.parametrize("ab", [(0.5, -0.5), (0.0, -0.5), (1.0, 0.0), (3.0, 1.0)])
def test_log_c_agree(ab):
    lam = np.array([0.05, 1.0, 7.5, 120.0], dtype=complex)
    assert _close(JIT.log_c_array(*ab, lam), NP.log_c_array(*ab, lam))


@pytest.mark.parametrize("ab", [(0.5, -0.5), (1.0, 0.0), (3.0, 1.0)])
@pytest.mark.parametrize("lam", [0.0, 0.4, 3.0, 40.0])
def test_jacobi_phi_row_agree(ab, lam):
    # r spans the series, Cauchy-contour and Harish-Chandra regimes
    r = np.ascontiguousarray(np.linspace(0.0, 8.0, 81))
    assert _close(JIT.jacobi_phi_row(*ab, lam, r), NP.jacobi_phi_row(*ab, lam, r), rel=1e-10)


def test_box_average_agree():
    h = 0.01
    x = np.arange(0, 400) * h
    v = np.exp(-((x - 2) / 0.3) ** 2)
    for a in (0.004, 0.05, 0.731):
        assert _close(JIT.box_average(v, h, a), NP.box_average(v, h, a), rel=1e-13)


def _run(env_value, code):
    env = dict(os.environ, INGHAMLAB_BACKEND=env_value)
    return subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)


def test_environment_selects_backend():
    out = _run("numpy", "from inghamlab import kernels; print(kernels.BACKEND)")
    assert out.returncode == 0 and out.stdout.strip() == "numpy"
    bad = _run("fortran", "import inghamlab.kernels")
    assert bad.returncode != 0 and "INGHAMLAB_BACKEND" in bad.stderr


def test_numpy_backend_end_to_end():
    code = ("import numpy as np\n"
            "from inghamlab.specfun import JacobiParams, jacobi_phi\n"
            "r = np.linspace(0.01, 4, 9)\n"
            "v = jacobi_phi(JacobiParams(0.5, -0.5), 2.0, r)\n"
            "print(np.max(np.abs(v - np.sin(2 * r) / (2 * np.sinh(r)))))\n")
    out = _run("numpy", code)
    assert out.returncode == 0, out.stderr
    assert float(out.stdout) < 1e-12
