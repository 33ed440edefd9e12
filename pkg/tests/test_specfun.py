import math
import warnings

import mpmath as mp
import numpy as np
import pytest
import scipy.special as sc

from inghamlab.errors import DomainError, LimitWarning, PoleError
from inghamlab.specfun import (
    JacobiParams,
    KTypeIndex,
    bessel_psi,
    c_function,
    c_function_inv_sq,
    hankel_constant,
    jacobi_phi,
    jacobi_weight,
    kostant_Q,
    log_c_function_inv_sq,
    log_gamma,
    pochhammer,
)

mp.mp.dps = 30


def mp_phi(a, b, lam, r):
    rho = a + b + 1
    z = -mp.sinh(r) ** 2
    v = mp.hyp2f1((rho + 1j * lam) / 2, (rho - 1j * lam) / 2, a + 1, z)
    return float(mp.re(v))


def mp_c(a, b, lam):
    rho = a + b + 1
    il = 1j * mp.mpf(lam)
    return complex(2 ** (rho - il) * mp.gamma(a + 1) * mp.gamma(il)
                   / (mp.gamma((il + rho) / 2) * mp.gamma((il + a - b + 1) / 2)))


# ------------------------------------------------------------- log-gamma
@pytest.mark.parametrize("z", [0.5, 1.0, 2.5, 10.0, 0.1 + 3j, -2.5 + 0.5j, 1e-3 + 1e-3j, 50 + 200j, -7.5])
def test_log_gamma_matches_mpmath_modulo_branch(z):
    got = log_gamma(z)
    ref = complex(mp.loggamma(z))
    assert abs(got.real - ref.real) <= 1e-13 * max(1, abs(ref.real))
    # imaginary parts agree modulo 2 pi (branch of the sum of logs)
    d = (got.imag - ref.imag) / (2 * math.pi)
    assert abs(d - round(d)) < 1e-12


def test_log_gamma_real_axis_matches_lgamma():
    x = np.linspace(0.05, 40, 200)
    assert np.max(np.abs(log_gamma(x).real - sc.gammaln(x))) < 1e-12


@pytest.mark.parametrize("z", [0, -1, -5])
def test_log_gamma_poles(z):
    with pytest.raises(PoleError):
        log_gamma(z)


def test_log_gamma_recurrence():
    z = np.array([0.3 + 0.2j, 2.2 - 5j, 7.5 + 1j])
    lhs = np.exp(log_gamma(z + 1) - log_gamma(z))
    assert np.allclose(lhs, z, rtol=1e-13)


def test_pochhammer():
    assert pochhammer(3, 0) == 1
    assert pochhammer(3, 4) == 3 * 4 * 5 * 6
    assert abs(pochhammer(0.5 + 1j, 3) - complex(mp.rf(0.5 + 1j, 3))) < 1e-13
    with pytest.raises(DomainError):
        pochhammer(1.0, -1)


# -------------------------------------------------------------- Bessel
@pytest.mark.parametrize("alpha", [-0.4, 0.0, 0.5, 1.5, 3.0, 7.25, 20.0])
def test_bessel_psi_against_scipy(alpha):
    t = np.concatenate([np.linspace(1e-3, 2, 50), np.linspace(2, 60, 300), np.geomspace(60, 1e4, 50)])
    ref = hankel_constant(alpha) * sc.jv(alpha, t) * t ** (-alpha)
    got = bessel_psi(alpha, t)
    assert np.max(np.abs(got - ref)) < 5e-13 * max(1.0, hankel_constant(alpha))


def test_bessel_psi_origin_and_half_order():
    assert bessel_psi(2.0, 0.0) == 1.0
    t = np.linspace(0.01, 50, 500)
    # order 1/2: sin t / t ; order -1/2: cos t
    assert np.max(np.abs(bessel_psi(0.5, t) - np.sin(t) / t)) < 1e-13
    assert np.max(np.abs(bessel_psi(-0.5, t) - np.cos(t))) < 1e-13


def test_bessel_psi_rejects_bad_order():
    with pytest.raises(DomainError):
        bessel_psi(-1.0, 1.0)


# -------------------------------------------------------- Jacobi phi
@pytest.mark.parametrize("ab", [(-0.5, -0.5), (0.5, -0.5), (2.5, 1.0), (0.0, 0.0), (1.0, 0.0), (-0.3, 0.2)])
def test_jacobi_phi_against_mpmath(ab):
    p = JacobiParams(*ab)
    rng = np.random.default_rng(1)
    for lam, r in zip(rng.uniform(0, 30, 25), rng.uniform(0, 6, 25)):
        ref = mp_phi(p.alpha, p.beta, lam, r)
        got = jacobi_phi(p, lam, r)
        assert abs(got - ref) < 1e-10 * max(1.0, abs(ref)), (lam, r, got, ref)


def test_jacobi_phi_small_lambda_region():
    p = JacobiParams(0.5, -0.5)
    for lam in (0.0, 0.05, 0.2, 0.44):
        for r in (0.9, 2.0, 5.0):
            ref = mp_phi(0.5, -0.5, lam, r)
            assert abs(jacobi_phi(p, lam, r) - ref) < 1e-11


def test_jacobi_phi_closed_forms():
    r = np.linspace(0.01, 5, 100)
    lam = 2.3
    # (1/2, -1/2): sin(lam r) / (lam sinh r)
    assert np.max(np.abs(jacobi_phi(JacobiParams(0.5, -0.5), lam, r) - np.sin(lam * r) / (lam * np.sinh(r)))) < 1e-12
    # (-1/2, -1/2): cos(lam r)
    assert np.max(np.abs(jacobi_phi(JacobiParams(-0.5, -0.5), lam, r) - np.cos(lam * r))) < 1e-12


def test_jacobi_phi_even_and_normalized():
    p = JacobiParams(1.0, 0.0)
    assert jacobi_phi(p, 3.0, 0.0) == 1.0
    assert jacobi_phi(p, -3.0, 1.2) == jacobi_phi(p, 3.0, 1.2)


def test_jacobi_params_validation():
    assert JacobiParams(0.5, -0.5).rho == 1.0
    with pytest.raises(DomainError):
        JacobiParams(-1.0, 0.0)
    with pytest.raises(DomainError):
        JacobiParams(0.0, 1.5)


def test_ktype_validation():
    KTypeIndex(2, 0)
    KTypeIndex(3, -1)
    for bad in ((1, 0), (1, 3), (0, 2)):
        with pytest.raises(DomainError):
            KTypeIndex(*bad)


# ----------------------------------------------------------- c-function
@pytest.mark.parametrize("ab", [(0.5, -0.5), (2.5, 1.0), (0.0, -0.5), (1.0, 0.0)])
def test_c_function_against_mpmath(ab):
    p = JacobiParams(*ab)
    for lam in (0.1, 0.7, 3.0, 25.0):
        assert abs(c_function(p, lam) - mp_c(*ab, lam)) < 1e-12 * abs(mp_c(*ab, lam))


@pytest.mark.parametrize("lam", [0.1, 1.0, 10.0, 100.0])
def test_c_inv_sq_anchor_cosine_pair(lam):
    # duplication formula: Gamma(z) Gamma(z + 1/2) = 2^{1-2z} sqrt(pi) Gamma(2z)
    assert abs(c_function_inv_sq(JacobiParams(-0.5, -0.5), lam) - 4.0) < 1e-10


def test_c_inv_sq_large_lambda_asymptotics():
    # |c|^-2 ~ C lam^{2 alpha + 1}; compare the ratio with mpmath at large lam
    p = JacobiParams(2.5, 1.0)
    for lam in (30.0, 1e3, 1e6):
        ref = float(1 / abs(mp.mpc(mp_c(2.5, 1.0, lam))) ** 2) if lam < 1e4 else None
        got = c_function_inv_sq(p, lam)
        if ref is not None:
            assert abs(got - ref) < 1e-11 * ref
    # log form stays finite to 1e300 and grows like (2 alpha + 1) log lam
    l1, l2 = log_c_function_inv_sq(p, np.array([1e150, 1e300]))
    assert abs((l2 - l1) / (150 * math.log(10)) - (2 * p.alpha + 1)) < 1e-10


def test_c_inv_sq_at_zero_is_a_limit():
    p = JacobiParams(0.5, -0.5)
    with pytest.warns(LimitWarning):
        v0 = c_function_inv_sq(p, 0.0)
    assert v0 == 0.0
    # alpha - beta + 1 = 0 would need beta = alpha + 1: finite nonzero limit
    q = JacobiParams(-0.5, 0.5)
    with pytest.warns(LimitWarning):
        vq = c_function_inv_sq(q, 0.0)
    assert abs(vq - c_function_inv_sq(q, 1e-7)) < 1e-6 * vq


def test_c_inv_sq_even():
    p = JacobiParams(1.0, 0.0)
    assert c_function_inv_sq(p, -2.0) == c_function_inv_sq(p, 2.0)


# --------------------------------------------------------- Kostant, weight
def test_kostant_Q_factor_by_factor():
    p = JacobiParams(0.5, -0.5)
    lam = 1.3
    il = 1j * lam
    ref = ((p.rho + il) / 2) * ((p.rho + il) / 2 + 1)  # (2, 2): first factor length 2
    assert abs(kostant_Q(p, (2, 2), lam) - ref) < 1e-14
    assert kostant_Q(p, (0, 0), lam) == 1


def test_jacobi_weight():
    p = JacobiParams(0.5, -0.5)
    r = np.array([0.3, 1.0])
    assert np.allclose(jacobi_weight(p, r), (2 * np.sinh(r)) ** 2)
    with pytest.raises(DomainError):
        jacobi_weight(p, -1.0)
