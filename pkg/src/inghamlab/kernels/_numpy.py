"""Pure-numpy kernels mirroring ``_jit.py`` (vectorized over arguments)."""
import math

import numpy as np

from ._consts import (
    BERN_COEF,
    CAUCHY_NODES,
    CAUCHY_RADIUS,
    HALF_LOG_2PI,
    HC_LAMBDA_MIN,
    SERIES_SINH_MAX,
    SERIES_LAMSINH_MAX,
    bessel_asym_threshold,
    miller_start,
)


def loggamma_array(z):
    z = np.array(z, dtype=np.complex128, copy=True)
    acc = np.zeros_like(z)
    low = z.real < 12.0
    while low.any():
        acc[low] += np.log(z[low])
        z[low] += 1.0
        low = z.real < 12.0
    inv = 1.0 / z
    inv2 = inv * inv
    s = np.zeros_like(z)
    for b in reversed(BERN_COEF):
        s = s * inv2 + b
    return (z - 0.5) * np.log(z) - z + HALF_LOG_2PI + s * inv - acc


def loggamma(z):
    return complex(loggamma_array(np.array([z]))[0])


# ------------------------------------------------------------ Bessel kernel
def _psi_series(alpha, t):
    q = -0.25 * t * t
    term = np.ones_like(t)
    s = np.ones_like(t)
    for k in range(1, 400):
        term = term * q / (k * (alpha + k))
        s += term
        if np.all(np.abs(term) < 1e-17 * np.abs(s)):
            break
    return s


def _psi_miller(alpha, t):
    n = miller_start(float(t.max()))
    kmax = n // 2
    e = np.empty(kmax + 1)
    e[0] = 1.0
    if kmax >= 1:
        e[1] = 1.0
    for k in range(1, kmax):
        e[k + 1] = e[k] * (alpha + k) / (k + 1)
    fp1 = np.zeros_like(t)
    f = np.full_like(t, 1e-30)
    s = np.zeros_like(t)
    two_over_t = 2.0 / t
    for j in range(n, 0, -1):
        if j % 2 == 0:
            s += (alpha + j) * e[j // 2] * f
        f, fp1 = (alpha + j) * two_over_t * f - fp1, f
        big = np.abs(f) > 1e250
        if big.any():
            f[big] *= 1e-250
            fp1[big] *= 1e-250
            s[big] *= 1e-250
    return f / (s + f)


def _psi_asym(alpha, t):
    log_pref = alpha * math.log(2.0) + math.lgamma(alpha + 1.0)
    mu = 4.0 * alpha * alpha
    chi = t - (0.5 * alpha + 0.25) * math.pi
    p = np.zeros_like(t)
    q = np.zeros_like(t)
    term = np.ones_like(t)
    live = np.ones(t.shape, dtype=bool)
    for k in range(200):
        sign = 1.0 if (k // 2) % 2 == 0 else -1.0
        if k % 2 == 0:
            p += np.where(live, sign * term, 0.0)
        else:
            q += np.where(live, sign * term, 0.0)
        nxt = term * (mu - (2 * k + 1) ** 2) / ((k + 1) * 8.0 * t)
        live &= ~((np.abs(nxt) < 1e-17) | (np.abs(nxt) > np.abs(term)))
        if not live.any():
            break
        term = np.where(live, nxt, term)
    j = np.sqrt(2.0 / (math.pi * t)) * (p * np.cos(chi) - q * np.sin(chi))
    return np.exp(log_pref - alpha * np.log(t)) * j


def bessel_psi_array(alpha, t):
    t = np.abs(np.asarray(t, dtype=float))
    out = np.empty_like(t)
    t_asym = bessel_asym_threshold(alpha)
    lo = t <= 2.0
    hi = t >= t_asym
    mid = ~(lo | hi)
    if lo.any():
        out[lo] = _psi_series(alpha, t[lo])
    if mid.any():
        out[mid] = _psi_miller(alpha, t[mid])
    if hi.any():
        out[hi] = _psi_asym(alpha, t[hi])
    return out


def bessel_psi_matrix(alpha, lam, r):
    t = np.abs(np.asarray(lam, dtype=float))[:, None] * np.asarray(r, dtype=float)[None, :]
    return bessel_psi_array(alpha, t.ravel()).reshape(t.shape)


# --------------------------------------------------------- Jacobi functions
def log_c(alpha, beta, lam):
    rho = alpha + beta + 1.0
    il = 1j * np.asarray(lam, dtype=np.complex128)
    lg = loggamma_array(np.concatenate([np.atleast_1d(il), np.atleast_1d(0.5 * (il + rho)),
                                        np.atleast_1d(0.5 * (il + alpha - beta + 1.0))]))
    m = np.atleast_1d(il).shape[0]
    out = ((rho - np.atleast_1d(il)) * math.log(2.0) + math.lgamma(alpha + 1.0)
           + lg[:m] - lg[m:2 * m] - lg[2 * m:])
    return out if np.ndim(lam) else complex(out[0])


def log_c_array(alpha, beta, lam):
    return np.atleast_1d(log_c(alpha, beta, np.asarray(lam, dtype=np.complex128)))


def _zseries(alpha, beta, lam, r):
    h = 0.5 * (alpha + beta + 1.0)
    l4 = 0.25 * lam * lam
    z = -np.sinh(r) ** 2
    term = np.ones_like(r)
    s = np.ones_like(r)
    for k in range(20000):
        term = term * (((h + k) ** 2 + l4) / ((alpha + 1.0 + k) * (k + 1.0))) * z
        s += term
        if k > 2 and np.all(np.abs(term) < 1e-17 * np.maximum(np.abs(s), 1e-300)):
            break
    return s


def _hc_coeffs(alpha, beta, lam, x_max):
    rho = alpha + beta + 1.0
    a1 = 2.0 * (2.0 * alpha + 1.0)
    a2 = 2.0 * (2.0 * beta + 1.0)
    g = [1.0 + 0j]
    s_all = 0j
    s_alt = 0j
    peak = 1.0
    small = 0
    p = 1.0
    k = 1
    while k < 400000:
        mu = 1j * lam - rho - 2.0 * (k - 1)
        s_all = s_all + mu * g[k - 1]
        s_alt = -(s_alt + mu * g[k - 1])
        g.append(-(a1 * s_all + a2 * s_alt) / (4.0 * k * (k - 1j * lam)))
        p *= x_max
        mag = abs(g[k]) * p
        peak = max(peak, mag)
        if mag < 1e-18 * peak:
            small += 1
            if small >= 3:
                break
        else:
            small = 0
        k += 1
    return np.array(g, dtype=np.complex128)


def _hc_sum(g, r):
    # Horner in x = e^{-2r}; terms beyond the series' useful length are
    # negligible at every r in the batch because g was sized for min(r)
    x = np.exp(-2.0 * r)
    s = np.zeros(r.shape, dtype=np.complex128)
    for gk in g[::-1]:
        s = s * x + gk
    return s


def jacobi_phi_row(alpha, beta, lam, r):
    lam = abs(float(lam))
    r = np.asarray(r, dtype=float)
    rho = alpha + beta + 1.0
    out = np.zeros(r.shape)
    s = np.sinh(r)
    ser = (s <= SERIES_SINH_MAX) & (lam * s <= SERIES_LAMSINH_MAX)
    rest = ~ser
    if ser.any():
        out[ser] = _zseries(alpha, beta, lam, r[ser])
    if not rest.any():
        return out
    rr = r[rest]
    if lam >= HC_LAMBDA_MIN:
        g = _hc_coeffs(alpha, beta, complex(lam), math.exp(-2.0 * rr.min()))
        lc = log_c(alpha, beta, complex(lam))
        out[rest] = 2.0 * (np.exp(lc + (1j * lam - rho) * rr) * _hc_sum(g, rr)).real
        return out
    xm = math.exp(-2.0 * rr.min())
    acc = np.zeros(rr.shape)
    for q in range(CAUCHY_NODES):
        zeta = CAUCHY_RADIUS * np.exp(1j * 2.0 * math.pi * (q + 0.5) / CAUCHY_NODES)
        w = zeta / (zeta - lam) / CAUCHY_NODES
        v = np.zeros(rr.shape, dtype=np.complex128)
        for sg in (1.0, -1.0):
            z = sg * zeta
            g = _hc_coeffs(alpha, beta, z, xm)
            v += np.exp(log_c(alpha, beta, z) + (1j * z - rho) * rr) * _hc_sum(g, rr)
        acc += (w * v).real
    out[rest] = acc
    return out


def jacobi_phi_matrix(alpha, beta, lam, r):
    lam = np.asarray(lam, dtype=float)
    out = np.empty((lam.shape[0], np.asarray(r).shape[0]))
    for i, li in enumerate(lam):
        out[i] = jacobi_phi_row(alpha, beta, li, r)
    return out


# ------------------------------------------------------------- box average
def box_average(v, h, a):
    v = np.asarray(v, dtype=float)
    n = v.shape[0]
    c = np.concatenate([[0.0], np.cumsum(0.5 * h * (v[:-1] + v[1:]))])
    s = a / h
    idx = np.arange(n, dtype=float)

    def prim(pos):
        m = np.clip(np.floor(pos).astype(np.int64), 0, n - 2)
        th = pos - m
        val = c[m] + h * (th * v[m] + 0.5 * th * th * (v[m + 1] - v[m]))
        val = np.where(pos <= 0.0, 0.0, val)
        return np.where(pos >= n - 1, c[n - 1], val)

    return (prim(idx + s) - prim(idx - s)) / (2.0 * a)
