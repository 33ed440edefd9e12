import mpmath as mp
import numpy as np
import pytest

from conftest import bump_profile
from inghamlab.errors import DomainError
from inghamlab.ingham import builtin_theta
from inghamlab.numerics import SampledRadialFunction, make_grid, make_uniform_grid, jacobi_phi_ode
from inghamlab.specfun import JacobiParams, KTypeIndex
from inghamlab.symmetric_space import (
    RankOneSpace,
    carleman_m_values,
    project,
    sharpness_witness,
    space_from_multiplicities,
    spherical_fn,
    spherical_fn_delta,
    spherical_mean_profile,
    spherical_transform,
    uncertainty_audit_thm11,
)
from inghamlab.transforms import jacobi_forward, lambda_grid


@pytest.mark.parametrize("mg,m2g,alpha,beta,rho", [
    (2, 0, 0.5, -0.5, 1.0),
    (1, 0, 0.0, -0.5, 0.5),
    (2, 1, 1.0, 0.0, 2.0),
    (4, 3, 3.0, 1.0, 5.0),
])
def test_multiplicities_to_params(mg, m2g, alpha, beta, rho):
    s = space_from_multiplicities(mg, m2g)
    assert (s.alpha, s.beta) == (alpha, beta)
    assert s.rho == rho == s.params.rho


@pytest.mark.parametrize("mg,m2g", [(0, 0), (1.5, 0), (2, -1)])
def test_bad_multiplicities(mg, m2g):
    with pytest.raises(DomainError):
        RankOneSpace(mg, m2g)


def test_real_hyperbolic_closed_form():
    s = RankOneSpace(2, 0)
    r = np.linspace(0.01, 5, 60)
    for lam in (0.3, 2.0, 11.0):
        ref = np.sin(lam * r) / (lam * np.sinh(r))
        assert np.max(np.abs(spherical_fn(s, lam, r) - ref)) < 1e-12


@pytest.mark.parametrize("space", [(1, 0), (2, 1), (4, 3)])
def test_spherical_fn_against_ode(space):
    s = RankOneSpace(*space)
    r = np.linspace(0.5, 4, 8)
    for lam in (0.4, 1.7, 6.0):
        assert np.max(np.abs(jacobi_phi_ode(s.params, lam, r) - spherical_fn(s, lam, r))) < 1e-8


@pytest.mark.parametrize("space", [(2, 0), (1, 0), (2, 1)])
def test_spherical_fn_bounded_by_phi0(space):
    s = RankOneSpace(*space)
    lam = np.linspace(0.0, 30.0, 50)
    r = np.linspace(0.0, 6.0, 50)
    L, R = np.meshgrid(lam, r)
    phi = spherical_fn(s, L.ravel(), R.ravel())
    phi0 = spherical_fn(s, np.zeros(R.size), R.ravel())
    assert np.all(np.abs(phi) <= phi0 * (1 + 1e-12))


def _phi_mp(alpha, beta, lam, r):
    rho = alpha + beta + 1
    return mp.hyp2f1((rho + 1j * lam) / 2, (rho - 1j * lam) / 2, alpha + 1, -mp.sinh(r) ** 2)


@pytest.mark.parametrize("kt", [(0, 0), (1, 1), (2, 0), (3, -1), (4, 2)])
def test_delta_spherical_fn_against_hypergeometric(kt):
    s = RankOneSpace(2, 1)
    a, b = s.alpha, s.beta
    p, q = kt
    lam, r = 1.3, 0.8
    Q = (mp.rf((a + b + 1 + 1j * lam) / 2, (p + q) // 2)
         * mp.rf((a - b + 1 + 1j * lam) / 2, (p - q) // 2))
    ref = Q / mp.rf(a + 1, p) * mp.sinh(r) ** p * mp.cosh(r) ** q * _phi_mp(a + p, b + q, lam, r)
    got = spherical_fn_delta(s, KTypeIndex(p, q), lam, r)
    assert abs(got - complex(ref)) < 1e-11 * max(1.0, abs(complex(ref)))


def test_trivial_ktype_reduces_to_spherical_fn():
    s = RankOneSpace(2, 0)
    r = np.linspace(0, 3, 7)
    assert np.allclose(spherical_fn_delta(s, (0, 0), 2.5, r), spherical_fn(s, 2.5, r), atol=1e-14)
    with pytest.raises(DomainError):
        spherical_fn_delta(s, (1, 0), 2.5, r)


def test_spherical_transform_delegates():
    s = RankOneSpace(1, 0)
    f = bump_profile()
    lg = lambda_grid(20.0)
    a = spherical_transform(s, f, lg).values
    b = jacobi_forward(f, JacobiParams(0.0, -0.5), lg).values
    assert np.array_equal(a, b)


def test_projection_is_eigenfunction():
    s = RankOneSpace(2, 1)
    f = bump_profile()
    ft = spherical_transform(s, f, lambda_grid(40.0))
    rg = make_uniform_grid(4.0, 801, r_min=0.2)
    for lam in (0.7, 3.0, 9.0):
        P = project(s, ft, lam, rg)
        assert P.eigenvalue == -(lam ** 2 + s.rho ** 2)
        assert P.eigen_residual() < 1e-5
    with pytest.raises(DomainError):
        project(s, ft, 0.0, rg)


def test_mean_at_origin_recovers_profile(gaussian):
    # Phi_lam(0) = 1, so the mean at the origin is f itself
    s = RankOneSpace(2, 0)
    ft = spherical_transform(s, gaussian, lambda_grid(30.0))
    rg = make_grid(4.0, 60, 8)
    Fx = spherical_mean_profile(s, ft, 0.0, rg)
    assert np.max(np.abs(Fx.values - np.exp(-0.5 * rg.nodes ** 2))) < 1e-8


@pytest.mark.filterwarnings("ignore::inghamlab.errors.TruncationWarning")
def test_mean_transform_matches_product():
    s = RankOneSpace(2, 1)
    f = bump_profile()
    lg = lambda_grid(120.0)
    ft = spherical_transform(s, f, lg)
    rg = make_grid(4.0, 120, 10)
    x = 0.4
    Fx = spherical_mean_profile(s, ft, x, rg)
    lam = lg.nodes[(lg.nodes > 0.5) & (lg.nodes < 30)]
    back = jacobi_forward(Fx, s.params, lam).values
    want = np.interp(lam, lg.nodes, ft.values) * spherical_fn(s, lam, np.full(lam.shape, x))
    # lam are nodes, interp is exact there
    assert np.max(np.abs(back - want)) < 1e-8


def test_carleman_m_values():
    m = carleman_m_values()
    assert np.array_equal(m[:40], np.arange(1, 41))
    assert m[-1] == 1e12 and np.all(np.diff(m) > 0)


def test_audit_divergent_theta_reports_obstruction():
    s = RankOneSpace(2, 0)
    f = bump_profile()
    rep = uncertainty_audit_thm11(s, f, builtin_theta("inv-log"), (1.0, 60.0))
    assert rep.classification.verdict == "divergent"
    assert rep.carleman.verdict == "diverging"
    assert rep.obstruction
    assert np.isfinite(rep.best_constant) and rep.best_constant > 0
    assert rep.partial_sums.size == 40 and np.all(np.diff(rep.partial_sums) > 0)
    sm = rep.summary()
    assert sm["theta"] == "inv-log" and sm["obstruction_mechanism"] is True


def test_audit_convergent_theta_has_no_obstruction():
    rep = uncertainty_audit_thm11(RankOneSpace(2, 1), bump_profile(), builtin_theta("inv-sqrt"), (1.0, 60.0))
    assert rep.carleman.verdict == "converging"
    assert not rep.obstruction


def test_audit_zero_input():
    g = make_grid(2.0, 20, 8, r_min=1.0)
    z = SampledRadialFunction(g, np.zeros(len(g)), (1.0, 2.0))
    rep = uncertainty_audit_thm11(RankOneSpace(2, 0), z, builtin_theta("inv-log"), (1.0, 30.0))
    assert rep.best_constant == 0.0 and not rep.obstruction


def test_audit_rejects_nonvanishing_profile():
    g = make_grid(2.0, 20, 8)
    f = SampledRadialFunction(g, np.exp(-g.nodes ** 2))
    with pytest.raises(DomainError):
        uncertainty_audit_thm11(RankOneSpace(2, 0), f, builtin_theta("inv-log"), (1.0, 30.0),
                                vanish_radius=0.5)


@pytest.mark.slow
def test_sharpness_witness():
    w = sharpness_witness(RankOneSpace(2, 0), builtin_theta("inv-sqrt"), N=64)
    assert w.tail_mass < 1e-6
    assert np.isfinite(w.C_projection)
    assert w.C_projection <= w.envelope.C_certified * (1 + 1e-9)
