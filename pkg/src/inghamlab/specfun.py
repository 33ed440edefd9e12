"""Pointwise special functions: log-gamma, Pochhammer symbols, the
normalized Bessel kernel, Jacobi functions, the c-function, Kostant
polynomials and the Jacobi weight.

Scalar inputs give scalar outputs; array inputs are evaluated elementwise.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DomainError, LimitWarning, PoleError

__all__ = [
    "JacobiParams", "KTypeIndex", "log_gamma", "pochhammer", "bessel_psi",
    "jacobi_phi", "jacobi_phi_matrix", "c_function", "c_function_inv_sq",
    "kostant_Q", "jacobi_weight", "hankel_constant", "log_c_function_inv_sq",
]


@dataclass(frozen=True)
class JacobiParams:
    """Jacobi parameters (alpha, beta) with rho = alpha + beta + 1.

    Construction enforces alpha > -1 and |beta| <= alpha + 1.
    """

    alpha: float
    beta: float
    rho: float = field(init=False)

    def __post_init__(self):
        a, b = float(self.alpha), float(self.beta)
        if not a > -1.0:
            raise DomainError(f"alpha must exceed -1, got {a}")
        if abs(b) > a + 1.0 + 1e-14:
            raise DomainError(f"|beta| must not exceed alpha + 1, got alpha={a}, beta={b}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "rho", a + b + 1.0)


@dataclass(frozen=True)
class KTypeIndex:
    """Integer pair (p, q) labelling a K-type, with p >= |q| and p = q mod 2."""

    p: int
    q: int

    def __post_init__(self):
        if self.p < abs(self.q) or (self.p - self.q) % 2:
            raise DomainError(f"invalid K-type ({self.p}, {self.q}): need p >= |q| and p = q mod 2")


def _as_ktype(ktype):
    return ktype if isinstance(ktype, KTypeIndex) else KTypeIndex(*ktype)


def _is_pole(z):
    return (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))


def log_gamma(z):
    """Principal branch of log Gamma(z) for complex z.

    Raises
    ------
    PoleError
        If any z is a nonpositive integer.
    """
    arr = np.asarray(z, dtype=np.complex128)
    if np.any(_is_pole(arr)):
        raise PoleError("log_gamma has poles at nonpositive integers")
    flat = arr.ravel()
    out = kernels.loggamma_array(np.ascontiguousarray(flat)).reshape(arr.shape)
    return complex(out) if arr.ndim == 0 else out


def pochhammer(z, m):
    """Rising factorial (z)_m = z (z+1) ... (z+m-1) as an exact product."""
    if m < 0 or int(m) != m:
        raise DomainError("pochhammer length must be a nonnegative integer")
    arr = np.asarray(z)
    out = np.ones_like(arr, dtype=np.result_type(arr, float))
    for k in range(int(m)):
        out = out * (arr + k)
    return out[()] if out.ndim == 0 else out


def hankel_constant(alpha):
    """2^alpha Gamma(alpha+1): the kernel normalization forcing psi(0) = 1."""
    return math.exp(alpha * math.log(2.0) + math.lgamma(alpha + 1.0))


def bessel_psi(alpha, t):
    """Normalized Bessel kernel psi(t) = 2^a Gamma(a+1) t^{-a} J_a(t).

    Power series for t <= 2, Miller backward recurrence up to
    max(25, alpha^2), Hankel asymptotics beyond.  psi(0) = 1.
    """
    if not alpha > -1.0:
        raise DomainError(f"Bessel order must exceed -1, got {alpha}")
    arr = np.asarray(t, dtype=float)
    out = kernels.bessel_psi_array(float(alpha), np.ascontiguousarray(arr.ravel())).reshape(arr.shape)
    return float(out) if arr.ndim == 0 else out


def jacobi_phi_matrix(p: JacobiParams, lambdas, r):
    """Matrix phi_{lambda_i}(r_j) for real lambdas and r >= 0."""
    r = np.ascontiguousarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("jacobi_phi requires r >= 0")
    lam = np.ascontiguousarray(np.abs(np.asarray(lambdas, dtype=float)))
    return kernels.jacobi_phi_matrix(p.alpha, p.beta, lam, r)


def jacobi_phi(p: JacobiParams, lam, r):
    """Jacobi function phi_lam^{(alpha, beta)}(r), even in lam, phi(0) = 1.

    Evaluated from the hypergeometric series in -sinh^2 r near the origin
    and from the Harish-Chandra expansion elsewhere; see
    :func:`inghamlab.numerics.jacobi_phi_ode` for the independent oracle.
    ``lam`` and ``r`` broadcast against each other.
    """
    lam_a, r_a = np.broadcast_arrays(np.abs(np.asarray(lam, dtype=float)), np.asarray(r, dtype=float))
    if np.any(r_a < 0):
        raise DomainError("jacobi_phi requires r >= 0")
    out = np.empty(lam_a.shape)
    flat_l, flat_r, flat_o = lam_a.ravel(), r_a.ravel(), out.reshape(-1)
    for lv in np.unique(flat_l):
        sel = flat_l == lv
        flat_o[sel] = kernels.jacobi_phi_row(p.alpha, p.beta, float(lv), np.ascontiguousarray(flat_r[sel]))
    return float(out) if out.ndim == 0 else out


def _log_c(p, lam):
    return kernels.log_c_array(p.alpha, p.beta, np.ascontiguousarray(lam, dtype=np.complex128))


def c_function(p: JacobiParams, lam):
    """Harish-Chandra c-function at real or complex lam != 0."""
    lam_a = np.asarray(lam, dtype=np.complex128)
    out = np.exp(_log_c(p, lam_a.ravel())).reshape(lam_a.shape)
    return complex(out) if lam_a.ndim == 0 else out


def _c_inv_sq_at_zero(p: JacobiParams):
    # c has a simple pole from Gamma(i lam) unless a denominator Gamma is
    # also singular, in which case the ratio stays finite
    args = (0.5 * p.rho, 0.5 * (p.alpha - p.beta + 1.0))
    for i, a in enumerate(args):
        if abs(a) < 1e-14:
            other = args[1 - i]
            return 4.0 * math.exp(2.0 * math.lgamma(other) - 2.0 * p.rho * math.log(2.0)
                                  - 2.0 * math.lgamma(p.alpha + 1.0))
    return 0.0


def c_function_inv_sq(p: JacobiParams, lam):
    """Plancherel density |c(lam)|^{-2}, even in lam.

    At lam = 0 the continuous extension is returned with a LimitWarning.
    """
    lam_a = np.abs(np.asarray(lam, dtype=float))
    flat = lam_a.ravel()
    out = np.empty(flat.shape)
    zero = flat == 0.0
    if zero.any():
        warnings.warn("|c(0)|^-2 defined by continuity", LimitWarning, stacklevel=2)
        out[zero] = _c_inv_sq_at_zero(p)
    nz = ~zero
    if nz.any():
        out[nz] = np.exp(log_c_function_inv_sq(p, flat[nz]))
    out = out.reshape(lam_a.shape)
    return float(out) if out.ndim == 0 else out


_LARGE_LAMBDA = 30.0


def _re_loggamma_shifted(x, y):
    """Re log Gamma(x + i y) + pi y / 2 for large y > 0, free of the
    O(y) cancellation present in the raw value."""
    z = x + 1j * y
    inv = 1.0 / z
    inv2 = inv * inv
    s = np.zeros_like(z)
    for b in reversed(kernels.BERN_COEF):
        s = s * inv2 + b
    return ((x - 0.5) * np.log(np.abs(z)) + y * np.arctan(x / y) - x
            + kernels.HALF_LOG_2PI + (s * inv).real)


def _log_c_inv_sq_large(p: JacobiParams, lam):
    # the pi*y/2 terms of the three Gamma factors cancel exactly
    h = 0.5 * lam
    val = (p.rho * math.log(2.0) + math.lgamma(p.alpha + 1.0) + _re_loggamma_shifted(0.0, lam)
           - _re_loggamma_shifted(0.5 * p.rho, h)
           - _re_loggamma_shifted(0.5 * (p.alpha - p.beta + 1.0), h))
    return -2.0 * val


def log_c_function_inv_sq(p: JacobiParams, lam):
    """log |c(lam)|^{-2} for lam != 0, accurate for lam up to ~1e300."""
    lam_a = np.abs(np.asarray(lam, dtype=float))
    if np.any(lam_a == 0):
        raise PoleError("log |c|^-2 requested at lam = 0")
    flat = lam_a.ravel()
    out = np.empty(flat.shape)
    big = flat >= _LARGE_LAMBDA
    out[big] = _log_c_inv_sq_large(p, flat[big])
    out[~big] = -2.0 * _log_c(p, flat[~big]).real
    out = out.reshape(lam_a.shape)
    return float(out) if out.ndim == 0 else out


def kostant_Q(p: JacobiParams, ktype, lam):
    """Kostant polynomial Q_delta(i lam + rho) for the K-type (p, q)."""
    kt = _as_ktype(ktype)
    il = 1j * np.asarray(lam, dtype=float)
    return (pochhammer((p.alpha + p.beta + 1.0 + il) / 2.0, (kt.p + kt.q) // 2)
            * pochhammer((p.alpha - p.beta + 1.0 + il) / 2.0, (kt.p - kt.q) // 2))


def jacobi_weight(p: JacobiParams, r):
    """(2 sinh r)^{2 alpha + 1} (2 cosh r)^{2 beta + 1}."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("jacobi_weight requires r >= 0")
    with np.errstate(divide="ignore"):
        out = (2.0 * np.sinh(r)) ** (2.0 * p.alpha + 1.0) * (2.0 * np.cosh(r)) ** (2.0 * p.beta + 1.0)
    return float(out) if out.ndim == 0 else out
