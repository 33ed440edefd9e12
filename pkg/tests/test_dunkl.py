import math

import mpmath as mp
import numpy as np
import pytest

from conftest import bump_profile, gaussian_profile
from inghamlab.errors import DomainError
from inghamlab.ingham import builtin_theta
from inghamlab.numerics import SampledRadialFunction, make_grid, make_uniform_grid
from inghamlab.dunkl import (
    DunklSetting,
    HarmonicComponent,
    _inner,
    assemble_projection,
    builtin_harmonics,
    check_harmonic,
    component_plancherel,
    component_transform,
    dunkl_project,
    dunkl_sharpness_witness,
    dunkl_spherical_mean,
    make_setting,
    phi_kappa,
    sphere_normalization,
    sphere_normalization_quadrature,
    uncertainty_audit_thm13,
)
from inghamlab.transforms import hankel_forward, lambda_grid


def test_setting_derived_quantities():
    s = make_setting(2, "Z2^d", [1.0, 0.5])
    assert s.gamma == 1.5 and s.lambda_kappa == 1.5
    s3 = make_setting(3, kappa_values=[0.25])
    assert s3.kappa_full == (0.25, 0.0, 0.0) and s3.lambda_kappa == 0.75
    assert make_setting(1).lambda_kappa == -0.5


@pytest.mark.parametrize("args", [(2, "A2", [1.0]), (1, "Z2^d", [1.0, 1.0]), (2, "Z2^d", [-0.5])])
def test_setting_rejects(args):
    with pytest.raises(DomainError):
        make_setting(*args)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_unweighted_sphere_area(n):
    assert sphere_normalization(n, ()) == pytest.approx(2 * math.pi ** (n / 2) / math.gamma(n / 2), rel=1e-14)


@pytest.mark.parametrize("kappa", [(0.0, 0.0), (1.0, 0.5), (0.3, 2.0), (0.05, 0.0)])
def test_sphere_normalization_planar_quadrature(kappa):
    assert abs(sphere_normalization_quadrature(kappa) / sphere_normalization(2, kappa) - 1) < 1e-9


def test_sphere_normalization_three_dimensional_mpmath():
    k = (0.5, 1.0, 0.25)
    f = lambda th, ph: (abs(mp.sin(th) * mp.cos(ph)) ** (2 * k[0]) * abs(mp.sin(th) * mp.sin(ph)) ** (2 * k[1])
                        * abs(mp.cos(th)) ** (2 * k[2]) * mp.sin(th))
    ref = 8 * mp.quad(f, [0, mp.pi / 2], [0, mp.pi / 2])
    assert abs(sphere_normalization(3, k) / float(ref) - 1) < 1e-10


@pytest.mark.parametrize("n,kappa", [(2, (1.0, 0.5)), (3, (0.5, 0.0, 2.0)), (3, ())])
def test_builtin_harmonics_orthonormal_and_harmonic(n, kappa):
    s = DunklSetting(n, kappa)
    basis = [h for d in range(3) for h in builtin_harmonics(s, d)]
    G = np.array([[_inner(s, a.terms, b.terms) for b in basis] for a in basis])
    assert np.max(np.abs(G - np.eye(len(basis)))) < 1e-12
    assert len(builtin_harmonics(s, 2)) == n * (n + 1) // 2 - 1
    for h in basis:
        assert check_harmonic(s, h) < 1e-6


def test_harmonic_degree_limit_and_component_validation():
    s = DunklSetting(2, (1.0,))
    with pytest.raises(DomainError):
        builtin_harmonics(s, 3)
    f = bump_profile()
    with pytest.raises(DomainError):
        HarmonicComponent(1, "x1", f, builtin_harmonics(s, 2)[0])
    with pytest.raises(DomainError):
        HarmonicComponent(-1, "bad", f)


def test_kernel_at_origin():
    s = DunklSetting(2, (1.0, 0.5))
    assert phi_kappa(s, 3.0, 0.0) == pytest.approx(s.a_kappa_inv / math.gamma(s.lambda_kappa + 1))


@pytest.mark.parametrize("m", [0, 1, 2])
def test_gaussian_fixed_point(m):
    s = DunklSetting(2, (1.0, 0.5))
    g = gaussian_profile()
    h = builtin_harmonics(s, m)[0]
    comp = HarmonicComponent(m, h.label, SampledRadialFunction(g.grid, g.grid.nodes ** m * g.values), h)
    lam = np.linspace(0, 8, 33)
    tc = component_transform(s, comp, lam)
    assert np.max(np.abs(tc.b.values - np.exp(-0.5 * lam ** 2))) < 1e-12


def _components(s, lam_max=30.0):
    g = gaussian_profile()
    r = g.grid.nodes
    comps = [HarmonicComponent(0, "1", g)]
    for m, prof in ((1, r * np.exp(-r ** 2)), (2, r ** 2 * np.exp(-0.5 * (r - 1) ** 2))):
        h = builtin_harmonics(s, m)[0]
        comps.append(HarmonicComponent(m, h.label, SampledRadialFunction(g.grid, prof), h))
    lg = lambda_grid(lam_max)
    return [component_transform(s, c, lg) for c in comps]


def test_component_plancherel():
    s = DunklSetting(2, (1.0, 0.5))
    lhs, rhs = component_plancherel(s, _components(s))
    assert abs(lhs - rhs) <= 1e-8 * rhs


def test_singular_component_rejected():
    s = DunklSetting(2, (1.0,))
    g = gaussian_profile()
    comp = HarmonicComponent(1, "x1", g, builtin_harmonics(s, 1)[0])
    with pytest.raises(DomainError):
        component_transform(s, comp, lambda_grid(10.0))


def test_projection_components_are_eigenfunctions():
    s = DunklSetting(2, (1.0, 0.5))
    tcs = _components(s)
    rg = make_uniform_grid(5.0, 1001, r_min=0.2)
    for lam in (0.8, 2.5, 6.0):
        for P in dunkl_project(s, tcs, lam, rg):
            assert P.eigenvalue == -lam ** 2
            assert P.eigen_residual() < 1e-5
    with pytest.raises(DomainError):
        dunkl_project(s, tcs, -1.0, rg)


def test_projection_at_origin_sees_only_degree_zero():
    s = DunklSetting(2, (1.0, 0.5))
    tcs = _components(s)
    lam = tcs[0].b.grid.nodes[40]
    v = assemble_projection(s, tcs, lam, np.zeros(2))
    assert v == pytest.approx(float(tcs[0].b.values[40]), rel=1e-12)


def test_spherical_mean_at_origin_recovers_radial_part():
    s = DunklSetting(2, (1.0, 0.5))
    tcs = _components(s)
    rg = make_grid(5.0, 50, 8)
    Fx = dunkl_spherical_mean(s, tcs, np.zeros(2), rg)
    assert np.max(np.abs(Fx.values - np.exp(-0.5 * rg.nodes ** 2))) < 1e-10


@pytest.mark.filterwarnings("ignore::inghamlab.errors.TruncationWarning")
def test_spherical_mean_transform_matches_projection():
    # far-field values sit at the 1e-11 quadrature floor, which the growing
    # density lifts just above the truncation-warning threshold
    s = DunklSetting(2, (1.0, 0.5))
    tcs = _components(s)
    x = np.array([0.3, -0.4])
    rg = make_grid(14.0, 160, 10)
    Fx = dunkl_spherical_mean(s, tcs, x, rg)
    lam = tcs[0].b.grid.nodes
    lam = lam[(lam > 0.2) & (lam < 12)]
    back = hankel_forward(Fx, s.lambda_kappa, lam).values
    want = np.array([assemble_projection(s, tcs, l, x) for l in lam])
    assert np.max(np.abs(back - want)) < 1e-6


def _vanishing_components(s):
    f = bump_profile()
    comps = [HarmonicComponent(0, "1", f)]
    h = builtin_harmonics(s, 1)[0]
    comps.append(HarmonicComponent(1, h.label, SampledRadialFunction(f.grid, f.grid.nodes * f.values,
                                                                     f.support_hint), h))
    lg = lambda_grid(60.0)
    return [component_transform(s, c, lg) for c in comps]


def test_audit_reports_obstruction_for_divergent_theta():
    s = DunklSetting(2, (0.5,))
    rep = uncertainty_audit_thm13(s, _vanishing_components(s), builtin_theta("inv-log"), (1.0, 60.0), 1.0)
    assert rep.obstruction and rep.carleman.verdict == "diverging"
    assert np.isfinite(rep.best_constant) and rep.best_constant > 0
    assert np.all(np.isnan(rep.kernel_at_x))
    rep2 = uncertainty_audit_thm13(s, _vanishing_components(s), builtin_theta("inv-sqrt"), (1.0, 60.0), 1.0)
    assert not rep2.obstruction and rep2.carleman.verdict == "converging"


def test_audit_rejects_nonvanishing_components():
    s = DunklSetting(2, (0.5,))
    with pytest.raises(DomainError):
        uncertainty_audit_thm13(s, _components(s), builtin_theta("inv-log"), (1.0, 30.0), 1.0)


def test_audit_empty_component_list():
    s = DunklSetting(2, (0.5,))
    rep = uncertainty_audit_thm13(s, [], builtin_theta("inv-log"), (1.0, 30.0), 1.0)
    assert rep.best_constant == 0.0 and not rep.obstruction


@pytest.mark.slow
def test_dunkl_sharpness_witness():
    s = DunklSetting(2, (0.5,))
    w = dunkl_sharpness_witness(s, builtin_theta("inv-sqrt"), N=64)
    assert w.tail_mass < 1e-6
    assert np.isfinite(w.C_projection)
    assert w.C_projection <= w.envelope.C_certified * (1 + 1e-9)
