"""Hankel and Jacobi transform pairs, Plancherel accounting and spectral
operator-power norms.

Normalizations
--------------
Hankel pair of order a: both sides use the measure
``r^{2a+1} dr / (2^a Gamma(a+1))`` and the kernel ``psi(lam r)``, so
exp(-r^2/2) is a fixed point.

Jacobi pair: ``F(lam) = int f phi_lam w(r) dr`` with
``w = (2 sinh r)^{2a+1} (2 cosh r)^{2b+1}`` and inverse
``f(r) = (1/2pi) int_0^inf F phi_lam |c(lam)|^{-2} dlam``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, MagnitudeOverflowError, TruncationWarning
from .numerics import RadialGrid, SampledRadialFunction, SpectralSamples, grid_from_nodes, make_grid
from .specfun import (
    JacobiParams,
    c_function_inv_sq,
    hankel_constant,
    jacobi_phi_matrix,
    jacobi_weight,
    log_c_function_inv_sq,
)
from . import kernels

__all__ = [
    "PairKind", "hankel", "jacobi", "TransformPairReport", "hankel_forward",
    "hankel_inverse", "jacobi_forward", "jacobi_inverse", "plancherel_check",
    "spectral_power_norm", "log_spectral_power_norm", "lambda_grid",
]

# entries of a kernel matrix built at once; larger products are blocked
_BLOCK = 2_000_000
LOG_BUDGET = 700.0


@dataclass(frozen=True)
class PairKind:
    """Which transform pair a spectral object belongs to.

    Use :func:`hankel` or :func:`jacobi` to build one.
    """

    kind: str
    alpha: float
    params: JacobiParams | None = None

    @property
    def natural_shift(self):
        """Default spectral offset: 1 for Hankel pairs, rho for Jacobi pairs."""
        return 1.0 if self.kind == "hankel" else self.params.rho

    @property
    def weight_kind(self):
        return "hankel-measure" if self.kind == "hankel" else "jacobi-plancherel"

    def radial_density(self, r):
        if self.kind == "hankel":
            return np.asarray(r, float) ** (2 * self.alpha + 1) / hankel_constant(self.alpha)
        return jacobi_weight(self.params, r)

    def log_spectral_density(self, lam):
        lam = np.asarray(lam, float)
        if self.kind == "hankel":
            with np.errstate(divide="ignore"):
                return (2 * self.alpha + 1) * np.log(lam) - math.log(hankel_constant(self.alpha))
        return log_c_function_inv_sq(self.params, lam) - math.log(2 * math.pi)

    def spectral_density(self, lam):
        lam = np.asarray(lam, float)
        if self.kind == "hankel":
            return lam ** (2 * self.alpha + 1) / hankel_constant(self.alpha)
        return c_function_inv_sq(self.params, lam) / (2 * math.pi)

    def forward(self, f, lambdas):
        if self.kind == "hankel":
            return hankel_forward(f, self.alpha, lambdas)
        return jacobi_forward(f, self.params, lambdas)

    def inverse(self, F, r_grid):
        if self.kind == "hankel":
            return hankel_inverse(F, self.alpha, r_grid)
        return jacobi_inverse(F, self.params, r_grid)


def hankel(alpha):
    if not alpha > -1:
        raise DomainError(f"Hankel order must exceed -1, got {alpha}")
    return PairKind("hankel", float(alpha))


def jacobi(p: JacobiParams):
    return PairKind("jacobi", p.alpha, p)


def pair_of(F: SpectralSamples) -> PairKind:
    if F.weight_kind == "hankel-measure":
        return hankel(F.params)
    if F.weight_kind == "jacobi-plancherel":
        return jacobi(F.params)
    raise DomainError("custom spectral samples carry no transform pair; pass pair_kind")


def lambda_grid(lam_max, panels=None, order=10):
    """Composite Gauss-Legendre grid on [0, lam_max] (about 1 panel per unit)."""
    panels = panels or max(4, int(math.ceil(lam_max)))
    return make_grid(lam_max, panels, order)


def _as_grid(lambdas):
    if isinstance(lambdas, RadialGrid):
        return lambdas
    lam = np.asarray(lambdas, float)
    if lam.ndim != 1 or lam.size < 2:
        raise DomainError("lambdas must be a RadialGrid or an increasing array of >= 2 points")
    return grid_from_nodes(lam)


def _blocked(kernel, rows, cols, vec):
    """kernel(rows_block, cols) @ vec, blocking over rows."""
    out = np.empty(rows.shape[0])
    step = max(1, _BLOCK // max(1, cols.shape[0]))
    for s in range(0, rows.shape[0], step):
        out[s:s + step] = kernel(rows[s:s + step], cols) @ vec
    return out


def _tail_check(f: SampledRadialFunction, density, what):
    if f.support_hint is not None and f.support_hint[1] <= f.grid.r_max:
        return
    integrand = np.abs(f.values * density)
    peak = integrand.max() if integrand.size else 0.0
    if peak == 0.0:
        return
    tail = integrand[-max(1, integrand.size // 50):].max()
    if tail > 1e-12 * peak:
        warnings.warn(f"{what}: integrand tail {tail / peak:.1e} of peak at the grid edge",
                      TruncationWarning, stacklevel=3)


def _bessel_kernel(alpha):
    return lambda rows, cols: kernels.bessel_psi_matrix(alpha, np.ascontiguousarray(rows), cols)


def _jacobi_kernel(p):
    return lambda rows, cols: jacobi_phi_matrix(p, rows, cols)


def hankel_forward(f: SampledRadialFunction, alpha, lambdas) -> SpectralSamples:
    """Hankel transform of order alpha against the normalized measure."""
    pair = hankel(alpha)
    grid = _as_grid(lambdas)
    dens = pair.radial_density(f.grid.nodes)
    _tail_check(f, dens, "hankel_forward")
    vec = f.grid.quad_weights * f.values * dens
    vals = _blocked(_bessel_kernel(pair.alpha), grid.nodes, np.ascontiguousarray(f.grid.nodes), vec)
    return SpectralSamples(grid, vals, "hankel-measure", pair.alpha)


def hankel_inverse(F: SpectralSamples, alpha, r_grid: RadialGrid) -> SampledRadialFunction:
    """Inverse Hankel transform (same normalized measure in lambda)."""
    pair = hankel(alpha)
    lam = F.grid.nodes
    vec = F.grid.quad_weights * np.real(F.values) * pair.spectral_density(lam)
    vals = _blocked(_bessel_kernel(pair.alpha), np.ascontiguousarray(r_grid.nodes), np.ascontiguousarray(lam), vec)
    return SampledRadialFunction(r_grid, vals)


def jacobi_forward(f: SampledRadialFunction, p: JacobiParams, lambdas) -> SpectralSamples:
    """Jacobi transform F(lam) = int f phi_lam w dr."""
    grid = _as_grid(lambdas)
    dens = jacobi_weight(p, f.grid.nodes)
    _tail_check(f, dens, "jacobi_forward")
    vec = f.grid.quad_weights * f.values * dens
    keep = vec != 0.0
    r = np.ascontiguousarray(f.grid.nodes[keep])
    vals = _blocked(_jacobi_kernel(p), grid.nodes, r, vec[keep])
    return SpectralSamples(grid, vals, "jacobi-plancherel", p)


def jacobi_inverse(F: SpectralSamples, p: JacobiParams, r_grid: RadialGrid) -> SampledRadialFunction:
    """f(r) = (1/2pi) int_0^inf F(lam) phi_lam(r) |c(lam)|^{-2} dlam."""
    lam = F.grid.nodes
    vec = F.grid.quad_weights * np.real(F.values) * jacobi(p).spectral_density(lam)
    # rows over lambda keep one Harish-Chandra coefficient set per lambda
    r = np.ascontiguousarray(r_grid.nodes)
    vals = np.zeros(r.shape[0])
    step = max(1, _BLOCK // max(1, r.shape[0]))
    for s in range(0, lam.shape[0], step):
        vals += vec[s:s + step] @ jacobi_phi_matrix(p, lam[s:s + step], r)
    return SampledRadialFunction(r_grid, vals)


@dataclass(frozen=True, eq=False)
class TransformPairReport:
    """Forward samples, round-trip error and both Plancherel sides (squared norms)."""

    forward: SpectralSamples
    roundtrip_l2_rel_error: float
    plancherel_lhs: float
    plancherel_rhs: float
    roundtrip: SampledRadialFunction | None = None

    @property
    def plancherel_rel_diff(self):
        if self.plancherel_lhs == 0.0:
            return abs(self.plancherel_rhs)
        return abs(self.plancherel_lhs - self.plancherel_rhs) / self.plancherel_lhs

    def as_record(self):
        return {
            "roundtrip_l2_rel_error": self.roundtrip_l2_rel_error,
            "plancherel_lhs": self.plancherel_lhs,
            "plancherel_rhs": self.plancherel_rhs,
            "plancherel_rel_diff": self.plancherel_rel_diff,
            "lambda_max": float(self.forward.grid.r_max),
            "n_lambda": len(self.forward.grid),
        }


def plancherel_check(f: SampledRadialFunction, pair_kind: PairKind, lambdas) -> TransformPairReport:
    """Forward transform, round trip on f's own grid and Plancherel sides."""
    F = pair_kind.forward(f, lambdas)
    back = pair_kind.inverse(F, f.grid)
    rdens = pair_kind.radial_density(f.grid.nodes)
    lhs = f.grid.integrate(f.values ** 2 * rdens)
    rhs = F.grid.integrate(np.abs(F.values) ** 2 * pair_kind.spectral_density(F.grid.nodes))
    err = f.grid.integrate((back.values - f.values) ** 2 * rdens)
    rel = math.sqrt(err / lhs) if lhs > 0 else math.sqrt(err)
    return TransformPairReport(F, rel, lhs, rhs, back)


def log_spectral_power_norm(F: SpectralSamples, shift, m, pair_kind: PairKind | None = None):
    """log ||L^m f||_2 from spectral data, accumulated in the log domain.

    ``||L^m f||^2 = int (lam^2 + shift^2)^{2m} |F|^2 dnu`` with dnu the
    pair's Plancherel measure.  ``m`` may be an array.  Returns -inf for
    F = 0.
    """
    pair = pair_kind or pair_of(F)
    lam = F.grid.nodes
    absF = np.abs(F.values)
    nz = absF > 0
    m_arr = np.atleast_1d(np.asarray(m, dtype=float))
    if not nz.any():
        out = np.full(m_arr.shape, -np.inf)
    else:
        base = (np.log(F.grid.quad_weights[nz]) + 2 * np.log(absF[nz])
                + pair.log_spectral_density(lam[nz]))
        lmul = np.log(lam[nz] ** 2 + shift ** 2)
        terms = base[None, :] + 2 * m_arr[:, None] * lmul[None, :]
        top = terms.max(axis=1)
        out = 0.5 * (top + np.log(np.exp(terms - top[:, None]).sum(axis=1)))
    return float(out[0]) if np.ndim(m) == 0 else out


def spectral_power_norm(F: SpectralSamples, shift, m, pair_kind: PairKind | None = None):
    """||L^m f||_2 computed spectrally (see :func:`log_spectral_power_norm`).

    Raises
    ------
    MagnitudeOverflowError
        If the log-magnitude exceeds the double-precision budget.
    """
    lg = np.atleast_1d(log_spectral_power_norm(F, shift, m, pair_kind))
    if np.any(lg > LOG_BUDGET):
        raise MagnitudeOverflowError(f"log ||L^m f|| = {lg.max():.1f} exceeds {LOG_BUDGET}")
    out = np.exp(lg)
    return float(out[0]) if np.ndim(m) == 0 else out
