"""Numba kernels: complex log-gamma, the normalized Bessel kernel, Jacobi
functions and the exact box-average operator.

Every routine here has a numpy twin in ``_numpy.py`` with the same
signature; ``tests/test_backends.py`` checks they agree.
"""
import cmath
import math

import numpy as np
from numba import njit, prange

from ._consts import (
    BERN_COEF,
    CAUCHY_NODES,
    CAUCHY_RADIUS,
    HALF_LOG_2PI,
    HC_LAMBDA_MIN,
    SERIES_SINH_MAX,
    SERIES_LAMSINH_MAX,
    bessel_asym_threshold as _asym_py,
    miller_start as _miller_py,
)

bessel_asym_threshold = njit(cache=True)(_asym_py)
miller_start = njit(cache=True)(_miller_py)

_BERN = np.array(BERN_COEF)


# ---------------------------------------------------------------- log-gamma
@njit(cache=True)
def loggamma(z):
    """Principal-branch log Gamma of a complex scalar (shift + Stirling)."""
    acc = 0j
    while z.real < 12.0:
        acc += cmath.log(z)
        z += 1.0
    inv = 1.0 / z
    inv2 = inv * inv
    s = 0j
    for k in range(_BERN.shape[0] - 1, -1, -1):
        s = s * inv2 + _BERN[k]
    s *= inv
    return (z - 0.5) * cmath.log(z) - z + HALF_LOG_2PI + s - acc


@njit(cache=True)
def loggamma_array(z):
    out = np.empty(z.shape[0], dtype=np.complex128)
    for i in range(z.shape[0]):
        out[i] = loggamma(z[i])
    return out


# ------------------------------------------------------------ Bessel kernel
@njit(cache=True)
def _psi_series(alpha, t):
    q = -0.25 * t * t
    term = 1.0
    s = 1.0
    for k in range(1, 400):
        term *= q / (k * (alpha + k))
        s += term
        if abs(term) < 1e-17 * abs(s):
            break
    return s


@njit(cache=True)
def _neumann_coeffs(alpha, kmax):
    # weights of J_{alpha+2k} in the Neumann series of (t/2)^alpha / Gamma(alpha+1)
    e = np.empty(kmax + 1)
    e[0] = 1.0
    if kmax >= 1:
        e[1] = 1.0
    for k in range(1, kmax):
        e[k + 1] = e[k] * (alpha + k) / (k + 1)
    return e


@njit(cache=True)
def _psi_miller(alpha, t, e):
    n = miller_start(t)
    fp1 = 0.0
    f = 1e-30
    s = 0.0
    for j in range(n, 0, -1):
        if j % 2 == 0:
            k = j // 2
            s += (alpha + 2 * k) * e[k] * f
        fm1 = 2.0 * (alpha + j) / t * f - fp1
        fp1 = f
        f = fm1
        if abs(f) > 1e250:
            f *= 1e-250
            fp1 *= 1e-250
            s *= 1e-250
    return f / (s + f)


@njit(cache=True)
def _psi_asym(alpha, t, log_pref):
    mu = 4.0 * alpha * alpha
    chi = t - (0.5 * alpha + 0.25) * math.pi
    p = 0.0
    q = 0.0
    term = 1.0
    for k in range(200):
        sign = 1.0 if (k // 2) % 2 == 0 else -1.0
        if k % 2 == 0:
            p += sign * term
        else:
            q += sign * term
        nxt = term * (mu - (2 * k + 1) ** 2) / ((k + 1) * 8.0 * t)
        if abs(nxt) < 1e-17 or abs(nxt) > abs(term):
            break
        term = nxt
    j = math.sqrt(2.0 / (math.pi * t)) * (p * math.cos(chi) - q * math.sin(chi))
    return math.exp(log_pref - alpha * math.log(t)) * j


@njit(cache=True)
def _psi_one(alpha, t, t_asym, log_pref, e):
    if t <= 2.0:
        return _psi_series(alpha, t)
    if t < t_asym:
        return _psi_miller(alpha, t, e)
    return _psi_asym(alpha, t, log_pref)


@njit(cache=True)
def bessel_psi_array(alpha, t):
    """psi(t) = 2^a Gamma(a+1) t^-a J_a(t) for every entry of ``t`` (t >= 0)."""
    t_asym = bessel_asym_threshold(alpha)
    log_pref = alpha * math.log(2.0) + math.lgamma(alpha + 1.0)
    e = _neumann_coeffs(alpha, miller_start(t_asym) // 2 + 1)
    out = np.empty(t.shape[0])
    for i in range(t.shape[0]):
        out[i] = _psi_one(alpha, abs(t[i]), t_asym, log_pref, e)
    return out


@njit(cache=True, parallel=True)
def bessel_psi_matrix(alpha, lam, r):
    """Matrix psi(lam_i * r_j)."""
    t_asym = bessel_asym_threshold(alpha)
    log_pref = alpha * math.log(2.0) + math.lgamma(alpha + 1.0)
    e = _neumann_coeffs(alpha, miller_start(t_asym) // 2 + 1)
    out = np.empty((lam.shape[0], r.shape[0]))
    for i in prange(lam.shape[0]):
        li = abs(lam[i])
        for j in range(r.shape[0]):
            out[i, j] = _psi_one(alpha, li * r[j], t_asym, log_pref, e)
    return out


# --------------------------------------------------------- Jacobi functions
@njit(cache=True)
def log_c(alpha, beta, lam):
    """log of the c-function at complex spectral parameter ``lam``."""
    rho = alpha + beta + 1.0
    il = 1j * lam
    return ((rho - il) * math.log(2.0) + math.lgamma(alpha + 1.0) + loggamma(il)
            - loggamma(0.5 * (il + rho)) - loggamma(0.5 * (il + alpha - beta + 1.0)))


@njit(cache=True)
def log_c_array(alpha, beta, lam):
    out = np.empty(lam.shape[0], dtype=np.complex128)
    for i in range(lam.shape[0]):
        out[i] = log_c(alpha, beta, lam[i])
    return out


@njit(cache=True)
def _zseries(alpha, beta, lam, r):
    h = 0.5 * (alpha + beta + 1.0)
    l4 = 0.25 * lam * lam
    z = -math.sinh(r) ** 2
    term = 1.0
    s = 1.0
    for k in range(20000):
        term *= ((h + k) ** 2 + l4) / ((alpha + 1.0 + k) * (k + 1.0)) * z
        s += term
        if k > 2 and abs(term) < 1e-17 * max(abs(s), 1e-300):
            break
    return s


@njit(cache=True)
def _hc_coeffs(alpha, beta, lam, x_max):
    """Expansion coefficients of the Harish-Chandra series in x = e^{-2r},
    generated until the terms at ``x_max`` are negligible."""
    rho = alpha + beta + 1.0
    a1 = 2.0 * (2.0 * alpha + 1.0)
    a2 = 2.0 * (2.0 * beta + 1.0)
    cap = 256
    g = np.empty(cap, dtype=np.complex128)
    g[0] = 1.0
    s_all = 0j
    s_alt = 0j
    peak = 1.0
    small = 0
    p = 1.0
    k = 1
    while k < 400000:
        if k >= cap:
            g2 = np.empty(2 * cap, dtype=np.complex128)
            g2[:cap] = g
            g = g2
            cap *= 2
        mu = 1j * lam - rho - 2.0 * (k - 1)
        s_all = s_all + mu * g[k - 1]
        s_alt = -(s_alt + mu * g[k - 1])
        g[k] = -(a1 * s_all + a2 * s_alt) / (4.0 * k * (k - 1j * lam))
        p *= x_max
        mag = abs(g[k]) * p
        if mag > peak:
            peak = mag
        if mag < 1e-18 * peak:
            small += 1
            if small >= 3:
                return g[:k + 1]
        else:
            small = 0
        k += 1
    return g[:k]


@njit(cache=True)
def _hc_sum(g, r):
    x = math.exp(-2.0 * r)
    s = 0j
    p = 1.0
    small = 0
    for k in range(g.shape[0]):
        t = g[k] * p
        s += t
        if abs(t) < 1e-17 * abs(s):
            small += 1
            if small >= 3:
                break
        else:
            small = 0
        p *= x
    return s


@njit(cache=True)
def jacobi_phi_row(alpha, beta, lam, r):
    """phi_lam^{(alpha, beta)}(r_j) for one real lam and all r_j >= 0."""
    lam = abs(lam)
    rho = alpha + beta + 1.0
    n = r.shape[0]
    out = np.zeros(n)
    region = np.zeros(n, dtype=np.int8)
    rmin_h = np.inf
    rmin_c = np.inf
    for j in range(n):
        s = math.sinh(r[j])
        if s <= SERIES_SINH_MAX and lam * s <= SERIES_LAMSINH_MAX:
            out[j] = _zseries(alpha, beta, lam, r[j])
        elif lam >= HC_LAMBDA_MIN:
            region[j] = 1
            rmin_h = min(rmin_h, r[j])
        else:
            region[j] = 2
            rmin_c = min(rmin_c, r[j])
    if rmin_h < np.inf:
        g = _hc_coeffs(alpha, beta, complex(lam), math.exp(-2.0 * rmin_h))
        lc = log_c(alpha, beta, complex(lam))
        for j in range(n):
            if region[j] == 1:
                hs = _hc_sum(g, r[j])
                out[j] = 2.0 * (cmath.exp(lc + (1j * lam - rho) * r[j]) * hs).real
    if rmin_c < np.inf:
        # Cauchy average of the analytic continuation around lam: avoids the
        # cancellation of c(lam)Phi_lam + c(-lam)Phi_-lam near lam = 0
        xm = math.exp(-2.0 * rmin_c)
        for q in range(CAUCHY_NODES):
            th = 2.0 * math.pi * (q + 0.5) / CAUCHY_NODES
            zeta = CAUCHY_RADIUS * cmath.exp(1j * th)
            w = zeta / (zeta - lam) / CAUCHY_NODES
            gp = _hc_coeffs(alpha, beta, zeta, xm)
            gm = _hc_coeffs(alpha, beta, -zeta, xm)
            lcp = log_c(alpha, beta, zeta)
            lcm = log_c(alpha, beta, -zeta)
            for j in range(n):
                if region[j] == 2:
                    v = (cmath.exp(lcp + (1j * zeta - rho) * r[j]) * _hc_sum(gp, r[j])
                         + cmath.exp(lcm + (-1j * zeta - rho) * r[j]) * _hc_sum(gm, r[j]))
                    out[j] += (w * v).real
    return out


@njit(cache=True, parallel=True)
def jacobi_phi_matrix(alpha, beta, lam, r):
    """Matrix phi_{lam_i}(r_j)."""
    out = np.empty((lam.shape[0], r.shape[0]))
    for i in prange(lam.shape[0]):
        out[i, :] = jacobi_phi_row(alpha, beta, lam[i], r)
    return out


# ------------------------------------------------------------- box average
@njit(cache=True)
def _primitive(c, v, h, pos):
    # integral of the piecewise-linear interpolant from node 0 to node-position pos
    n = v.shape[0]
    if pos <= 0.0:
        return 0.0
    if pos >= n - 1:
        return c[n - 1]
    m = int(math.floor(pos))
    th = pos - m
    return c[m] + h * (th * v[m] + 0.5 * th * th * (v[m + 1] - v[m]))


@njit(cache=True)
def box_average(v, h, a):
    """Exact average of the piecewise-linear interpolant of ``v`` (uniform
    spacing ``h``, zero outside) over [x_i - a, x_i + a] at every node."""
    n = v.shape[0]
    c = np.empty(n)
    c[0] = 0.0
    for i in range(1, n):
        c[i] = c[i - 1] + 0.5 * h * (v[i - 1] + v[i])
    s = a / h
    out = np.empty(n)
    for i in range(n):
        out[i] = (_primitive(c, v, h, i + s) - _primitive(c, v, h, i - s)) / (2.0 * a)
    return out
