import math

import mpmath as mp
import numpy as np
import pytest

from conftest import bump_profile, gaussian_profile
from inghamlab.errors import DomainError, MagnitudeOverflowError, TruncationWarning
from inghamlab.numerics import SampledRadialFunction, SpectralSamples, make_grid
from inghamlab.specfun import JacobiParams, hankel_constant
from inghamlab.transforms import (
    hankel,
    hankel_forward,
    hankel_inverse,
    jacobi,
    jacobi_forward,
    jacobi_inverse,
    lambda_grid,
    log_spectral_power_norm,
    pair_of,
    plancherel_check,
    spectral_power_norm,
)


@pytest.mark.parametrize("alpha", [-0.4, 0.0, 1.5])
def test_hankel_scaled_gaussian(alpha):
    a = 0.8
    g = make_grid(12.0, 150, 10, refine_origin=40)
    f = SampledRadialFunction.from_callable(g, lambda r: np.exp(-a * r * r))
    lam = np.linspace(0, 8, 33)
    F = hankel_forward(f, alpha, lam)
    ref = (2 * a) ** (-(alpha + 1)) * np.exp(-lam ** 2 / (4 * a))
    assert np.max(np.abs(F.values - ref)) < 1e-10


def test_hankel_inverse_of_gaussian():
    lg = lambda_grid(12.0, panels=60)
    F = SpectralSamples(lg, np.exp(-0.5 * lg.nodes ** 2), "hankel-measure", 1.0)
    rg = make_grid(6.0, 30, 10)
    f = hankel_inverse(F, 1.0, rg)
    assert np.max(np.abs(f.values - np.exp(-0.5 * rg.nodes ** 2))) < 1e-12


def test_jacobi_cosine_case():
    p = JacobiParams(-0.5, -0.5)
    g = make_grid(10.0, 80, 10)
    f = SampledRadialFunction.from_callable(g, lambda r: np.exp(-r * r))
    lam = np.linspace(0, 10, 21)
    F = jacobi_forward(f, p, lam)
    assert np.max(np.abs(F.values - 0.5 * math.sqrt(math.pi) * np.exp(-lam ** 2 / 4))) < 1e-12


def test_jacobi_forward_against_mpmath_quadrature(bump):
    p = JacobiParams(0.5, -0.5)
    lam = 3.7
    F = jacobi_forward(bump, p, np.array([0.0, lam])).values[1]

    def integrand(r):
        q = (r - 1) * (2 - r)
        return mp.exp(1 - 0.25 / q) * mp.sin(lam * r) / (lam * mp.sinh(r)) * (2 * mp.sinh(r)) ** 2

    ref = float(mp.quad(integrand, [1, 1.5, 2]))
    assert abs(F - ref) < 1e-10 * abs(ref)


@pytest.mark.parametrize("ab", [(0.5, -0.5), (2.5, 1.0)])
def test_jacobi_round_trip_and_plancherel(ab, bump):
    rep = plancherel_check(bump, jacobi(JacobiParams(*ab)), lambda_grid(200))
    assert rep.roundtrip_l2_rel_error < 1e-4
    assert rep.plancherel_rel_diff < 1e-4
    rec = rep.as_record()
    assert rec["n_lambda"] == 2000 and rec["lambda_max"] == 200.0


def test_pair_kinds():
    h = hankel(1.5)
    assert h.natural_shift == 1.0 and h.weight_kind == "hankel-measure"
    j = jacobi(JacobiParams(1.0, 0.0))
    assert j.natural_shift == 2.0
    F = SpectralSamples(make_grid(1, 2, 2), np.zeros(4), "jacobi-plancherel", JacobiParams(1.0, 0.0))
    assert pair_of(F).kind == "jacobi"
    with pytest.raises(DomainError):
        pair_of(SpectralSamples(make_grid(1, 2, 2), np.zeros(4), "custom"))
    with pytest.raises(DomainError):
        hankel(-1.0)


def test_spectral_densities_are_consistent_with_logs():
    lam = np.array([0.5, 3.0, 40.0])
    for pair in (hankel(0.7), jacobi(JacobiParams(2.5, 1.0))):
        assert np.allclose(np.log(pair.spectral_density(lam)), pair.log_spectral_density(lam), rtol=1e-12)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 2.0])
def test_spectral_power_norm_closed_form(alpha):
    lg = lambda_grid(20.0, panels=80, order=12)
    F = SpectralSamples(lg, np.exp(-0.5 * lg.nodes ** 2), "hankel-measure", alpha)
    for m in (0, 1, 3, 8):
        # int (lam^2 + 1)^{2m} e^{-lam^2} lam^{2a+1} dlam / c_a via the binomial sum
        s = sum(math.comb(2 * m, k) * 0.5 * math.gamma(k + alpha + 1) for k in range(2 * m + 1))
        ref = math.sqrt(s / hankel_constant(alpha))
        assert abs(spectral_power_norm(F, 1.0, m) - ref) < 1e-10 * ref


def test_spectral_power_norm_array_zero_and_overflow():
    lg = lambda_grid(20.0)
    F = SpectralSamples(lg, np.exp(-0.5 * lg.nodes ** 2), "hankel-measure", 0.5)
    arr = log_spectral_power_norm(F, 1.0, np.array([1, 2, 3]))
    assert arr.shape == (3,) and np.all(np.diff(arr) > 0)
    Z = F.with_values(np.zeros(len(lg)))
    assert log_spectral_power_norm(Z, 1.0, 2) == -math.inf
    with pytest.raises(MagnitudeOverflowError):
        spectral_power_norm(F, 1.0, 400)
    assert np.isfinite(log_spectral_power_norm(F, 1.0, 400))


def test_truncation_warning():
    g = make_grid(2.0, 20, 8)
    f = SampledRadialFunction.from_callable(g, lambda r: np.exp(-r))
    with pytest.warns(TruncationWarning):
        hankel_forward(f, 0.5, np.linspace(0, 2, 5))


def test_blocked_kernel_matches_direct(gaussian):
    # forcing tiny blocks must not change the result
    import inghamlab.transforms as tr

    lam = np.linspace(0, 8, 50)
    a = hankel_forward(gaussian, 0.5, lam).values
    old = tr._BLOCK
    tr._BLOCK = 1000
    try:
        b = hankel_forward(gaussian, 0.5, lam).values
    finally:
        tr._BLOCK = old
    assert np.max(np.abs(a - b)) < 1e-14


def test_jacobi_transform_bounded_by_l1_norm(bump):
    # |phi_lam| <= 1 for real lam, so |f~(lam)| <= int |f| w
    from inghamlab.specfun import jacobi_weight

    p = JacobiParams(0.5, -0.5)
    bound = bump.grid.integrate(np.abs(bump.values) * jacobi_weight(p, bump.grid.nodes))
    F = jacobi_forward(bump, p, lambda_grid(100.0))
    assert np.max(np.abs(F.values)) <= bound * (1 + 1e-12)
