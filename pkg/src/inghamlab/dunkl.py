"""Dunkl analysis for coordinate reflection groups Z_2^d reduced to
shifted-order Hankel transforms.

A function is handled as a finite sum of components f_m(|x|) S_m(x/|x|)
with S_m an h-harmonic of degree m.  Normalization: the radial Gaussian is
a fixed point of the transform, so the degree-m component carries
b_m = hankel_forward(f_m r^{-m}) at order lambda_kappa + m.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError
from .ingham import ThetaSpec
from .numerics import (
    RadialGrid,
    SampledRadialFunction,
    SpectralSamples,
    dunkl_component_op,
    eigen_residual,
    make_grid,
)
from .specfun import bessel_psi, pochhammer
from .transforms import hankel, hankel_forward, hankel_inverse

__all__ = [
    "DunklSetting", "make_setting", "sphere_normalization", "sphere_normalization_quadrature",
    "HHarmonic", "builtin_harmonics", "dunkl_laplacian_fd", "check_harmonic",
    "HarmonicComponent", "phi_kappa", "component_transform", "TransformedComponent",
    "DunklProjection", "dunkl_project", "assemble_projection", "dunkl_spherical_mean",
    "component_plancherel", "uncertainty_audit_thm13", "DunklWitness", "dunkl_sharpness_witness",
]

ROOT_CONFIGS = ("Z2^d",)


@dataclass(frozen=True)
class DunklSetting:
    """Dimension, multiplicities on the coordinate roots e_1..e_d, and the
    derived gamma, lambda_kappa and sphere normalization int h^2 dsigma."""

    n: int
    kappa: tuple
    gamma: float = field(init=False)
    lambda_kappa: float = field(init=False)
    a_kappa_inv: float = field(init=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError("dimension must be a positive integer")
        k = tuple(float(v) for v in self.kappa)
        if len(k) > self.n:
            raise DomainError(f"Z_2^d needs d <= n, got d={len(k)} in dimension {self.n}")
        if any(v < 0 for v in k):
            raise DomainError("multiplicities must be nonnegative")
        object.__setattr__(self, "kappa", k)
        g = float(sum(k))
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "lambda_kappa", g + 0.5 * (self.n - 2))
        object.__setattr__(self, "a_kappa_inv", sphere_normalization(self.n, k))
        if not self.lambda_kappa > -1:
            raise DomainError("lambda_kappa must exceed -1")

    @property
    def kappa_full(self):
        """Multiplicity per coordinate (zero beyond d)."""
        return self.kappa + (0.0,) * (self.n - len(self.kappa))

    def h2(self, x):
        """Weight h_kappa^2(x) = prod |x_i|^{2 kappa_i}."""
        x = np.asarray(x, dtype=float)
        out = np.ones(x.shape[:-1])
        for i, k in enumerate(self.kappa):
            if k:
                out = out * np.abs(x[..., i]) ** (2 * k)
        return out


def _log_sphere_monomial(n, kappa_full, b):
    """log int_{S^{n-1}} prod |x_i|^{2 kappa_i + 2 b_i} dsigma."""
    s = sum(kappa_full) + sum(b)
    return (math.log(2.0) + sum(math.lgamma(k + bi + 0.5) for k, bi in zip(kappa_full, b))
            - math.lgamma(s + 0.5 * n))


def sphere_normalization(n, kappa):
    """int_{S^{n-1}} h_kappa^2 dsigma in closed form (Beta/Gamma integrals)."""
    kf = tuple(kappa) + (0.0,) * (n - len(kappa))
    return math.exp(_log_sphere_monomial(n, kf, (0,) * n))


def sphere_normalization_quadrature(kappa, panels=24, order=20, refine=30):
    """Angular quadrature of int_0^{2 pi} |cos t|^{2k1} |sin t|^{2k2} dt (n = 2).

    Uses the fourfold symmetry and Gauss-Legendre panels graded toward both
    ends of [0, pi/2] where the integrand has power-type endpoint behaviour.
    """
    k1, k2 = (tuple(kappa) + (0.0, 0.0))[:2]
    half = 0.25 * math.pi
    g = make_grid(half, panels, order, refine_origin=refine)
    t = g.nodes
    # [0, pi/4] and its mirror image t -> pi/2 - t
    f = (np.cos(t) ** (2 * k1) * np.sin(t) ** (2 * k2)
         + np.sin(t) ** (2 * k1) * np.cos(t) ** (2 * k2))
    return 4.0 * g.integrate(f)


def make_setting(n, root_config="Z2^d", kappa_values=()):
    """Build a Dunkl setting; only coordinate reflection groups are supported."""
    if root_config not in ROOT_CONFIGS:
        raise DomainError(f"unsupported root configuration {root_config!r}; supported: {ROOT_CONFIGS}")
    kv = np.atleast_1d(np.asarray(kappa_values, dtype=float)).tolist()
    return DunklSetting(int(n), tuple(kv))


# -------------------------------------------------------------- h-harmonics
@dataclass(frozen=True, eq=False)
class HHarmonic:
    """Homogeneous polynomial given as {exponent tuple: coefficient}."""

    degree: int
    label: str
    terms: dict
    evaluator: Callable | None = None

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.evaluator is not None:
            return np.asarray(self.evaluator(x), dtype=float)
        out = np.zeros(x.shape[:-1])
        for e, c in self.terms.items():
            t = np.full(x.shape[:-1], c)
            for i, p in enumerate(e):
                if p:
                    t = t * x[..., i] ** p
            out = out + t
        return out


def _inner(setting, p, q):
    """(p, q)_kappa = a_kappa int p q h^2 dsigma for polynomial dicts."""
    kf = setting.kappa_full
    acc = 0.0
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            if any(v % 2 for v in e):
                continue
            acc += c1 * c2 * math.exp(_log_sphere_monomial(setting.n, kf, tuple(v // 2 for v in e)))
    return acc / setting.a_kappa_inv


def _unit(n, *idx):
    e = [0] * n
    for i in idx:
        e[i] += 1
    return tuple(e)


def builtin_harmonics(setting: DunklSetting, degree):
    """Orthonormal h-harmonic basis of the given degree (0, 1 or 2).

    Degree 2 combines the mixed monomials x_i x_j with the traceless
    squares (1 + 2 k_1) x_i^2 - (1 + 2 k_i) x_1^2, orthonormalized by
    Gram-Schmidt in the (., .)_kappa inner product.
    """
    n, kf = setting.n, setting.kappa_full
    if degree == 0:
        raw = [("1", {_unit(n): 1.0})]
    elif degree == 1:
        raw = [(f"x{i + 1}", {_unit(n, i): 1.0}) for i in range(n)]
    elif degree == 2:
        raw = [(f"x{i + 1}x{j + 1}", {_unit(n, i, j): 1.0}) for i, j in itertools.combinations(range(n), 2)]
        raw += [(f"q{i + 1}", {_unit(n, i, i): 1 + 2 * kf[0], _unit(n, 0, 0): -(1 + 2 * kf[i])})
                for i in range(1, n)]
    else:
        raise DomainError("built-in h-harmonics cover degrees 0-2; supply an evaluator for higher degrees")
    basis = []
    for label, poly in raw:
        v = dict(poly)
        for _, b in basis:
            c = _inner(setting, v, b)
            for e, cb in b.items():
                v[e] = v.get(e, 0.0) - c * cb
        nrm = math.sqrt(_inner(setting, v, v))
        v = {e: c / nrm for e, c in v.items() if abs(c) > 1e-15 * nrm}
        basis.append((label, v))
    return [HHarmonic(degree, label, terms) for label, terms in basis]


def dunkl_laplacian_fd(setting: DunklSetting, f, x, h=1e-3):
    """Delta_kappa f at points x (shape (..., n)) by central differences.

    D_j g(x) = dg/dx_j + k_j (g(x) - g(s_j x)) / x_j with s_j the reflection
    in the j-th coordinate hyperplane; Delta_kappa = sum_j D_j^2.
    """
    x = np.asarray(x, dtype=float)
    kf = setting.kappa_full

    def D(j, g):
        def out(y):
            e = np.zeros(setting.n)
            e[j] = h
            val = (g(y + e) - g(y - e)) / (2 * h)
            if kf[j]:
                ys = y.copy()
                ys[..., j] = -ys[..., j]
                val = val + kf[j] * (g(y) - g(ys)) / y[..., j]
            return val
        return out

    return sum(D(j, D(j, f))(x) for j in range(setting.n))


def check_harmonic(setting: DunklSetting, S: HHarmonic, n_points=64, seed=0):
    """Relative FD size of Delta_kappa S at random points away from the hyperplanes."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.3, 1.2, size=(n_points, setting.n)) * rng.choice([-1.0, 1.0], size=(n_points, setting.n))
    lap = dunkl_laplacian_fd(setting, S, x)
    scale = max(np.max(np.abs(S(x))), 1e-300)
    return float(np.max(np.abs(lap)) / scale)


# --------------------------------------------------------------- components
@dataclass(frozen=True, eq=False)
class HarmonicComponent:
    """Radial profile f_m multiplying the h-harmonic ``harmonic``."""

    degree: int
    harmonic_id: str
    radial_profile: SampledRadialFunction
    harmonic: HHarmonic | None = None

    def __post_init__(self):
        if int(self.degree) != self.degree or self.degree < 0:
            raise DomainError("degree must be a nonnegative integer")
        if self.harmonic is not None and self.harmonic.degree != self.degree:
            raise DomainError("harmonic degree does not match component degree")


def phi_kappa(setting: DunklSetting, lam, x_norm):
    """phi_{kappa, lam}(x) = a_kappa^{-1} psi(lam |x|) / Gamma(lambda_kappa + 1),
    psi the normalized Bessel kernel of order lambda_kappa."""
    lk = setting.lambda_kappa
    t = np.abs(np.asarray(lam, dtype=float)) * np.asarray(x_norm, dtype=float)
    return setting.a_kappa_inv * bessel_psi(lk, t) / math.gamma(lk + 1.0)


def _reduced_profile(comp: HarmonicComponent):
    """f_m(r) r^{-m}, rejecting profiles singular at the origin."""
    f = comp.radial_profile
    m = comp.degree
    if m == 0:
        return f
    r = f.grid.nodes
    v = f.values
    pos = r > 0
    g = np.zeros_like(v)
    g[pos] = v[pos] / r[pos] ** m
    peak = np.max(np.abs(v)) if v.size else 0.0
    rp = r[pos]
    if rp.size >= 2 and peak > 0 and abs(v[pos][0]) > 1e-10 * peak:
        # |f_m| should vanish like r^m at the origin
        growth = math.log(abs(g[pos][0]) / max(abs(g[pos][1]), 1e-300)) / math.log(rp[1] / rp[0])
        if growth > 0.5:
            raise DomainError(f"f_m r^-m diverges at the origin for degree {m}")
    if (~pos).any():
        g[~pos] = g[pos][0] if pos.any() else 0.0
    return SampledRadialFunction(f.grid, g, f.support_hint)


@dataclass(frozen=True, eq=False)
class TransformedComponent:
    """Component with its reduced transform b_m at order lambda_kappa + m."""

    component: HarmonicComponent
    b: SpectralSamples

    @property
    def degree(self):
        return self.component.degree


def component_transform(setting: DunklSetting, comp: HarmonicComponent, lambdas) -> TransformedComponent:
    """b_m = hankel_forward(f_m r^{-m}) at order lambda_kappa + m.

    The Dunkl transform of the component is (-i)^m lam^m b_m(lam) S_m(omega).
    """
    order = setting.lambda_kappa + comp.degree
    b = hankel_forward(_reduced_profile(comp), order, lambdas)
    b = b.with_values(b.values, degree=comp.degree, harmonic_id=comp.harmonic_id)
    return TransformedComponent(comp, b)


@dataclass(frozen=True, eq=False)
class DunklProjection:
    """Radial factor of the degree-m part of the projection at lam.

    ``profile`` is lam^{2m} b_m(lam) r^m psi_{lk+m}(lam r) / (2^m (lk+1)_m);
    the field is profile(|x|) S_m(x/|x|), an eigenfunction with eigenvalue -lam^2.
    """

    lam: float
    degree: int
    harmonic_id: str
    profile: SampledRadialFunction
    eigenvalue: float
    lambda_kappa: float
    harmonic: HHarmonic | None = None

    def eigen_residual(self):
        return eigen_residual(self.profile, dunkl_component_op(self.lambda_kappa, self.degree), self.eigenvalue)


def _radial_factor(lk, m, lam, r):
    r = np.asarray(r, dtype=float)
    return (lam ** (2 * m) * r ** m * bessel_psi(lk + m, lam * r)
            / (2.0 ** m * pochhammer(lk + 1.0, m)))


def dunkl_project(setting: DunklSetting, components, lam, r_grid: RadialGrid):
    """Projection of a component sum at spectral parameter lam (one entry per component)."""
    if lam <= 0:
        raise DomainError("projection parameter must be positive")
    lk = setting.lambda_kappa
    out = []
    for tc in components:
        m = tc.degree
        bm = float(np.real(tc.b.interpolate(lam)))
        prof = SampledRadialFunction(r_grid, bm * _radial_factor(lk, m, lam, r_grid.nodes))
        out.append(DunklProjection(float(lam), m, tc.component.harmonic_id, prof, -lam * lam, lk,
                                   tc.component.harmonic))
    return out


def _harmonic_at(comp: HarmonicComponent, x):
    """S_m at the direction of x (S_0 = 1 when no harmonic is attached)."""
    x = np.asarray(x, dtype=float)
    nrm = np.linalg.norm(x)
    if comp.harmonic is None:
        if comp.degree == 0:
            return 1.0
        raise DomainError("components of positive degree need an attached h-harmonic")
    if nrm == 0.0:
        return float(comp.harmonic(np.eye(x.size)[0])) if comp.degree == 0 else 0.0
    return float(comp.harmonic(x / nrm))


def _projection_at(setting, components, lam, x):
    """sum_m b_m(lam) radial factor(|x|) S_m(x') on an array of lam."""
    lk = setting.lambda_kappa
    x = np.asarray(x, dtype=float)
    rx = float(np.linalg.norm(x))
    out = np.zeros(np.shape(lam))
    for tc in components:
        m = tc.degree
        if m > 0 and rx == 0.0:
            continue
        bm = np.real(tc.b.interpolate(lam))
        out = out + bm * _radial_factor(lk, m, lam, rx) * _harmonic_at(tc.component, x)
    return out


def assemble_projection(setting, components, lam, x):
    """Value of the projection at a point x."""
    return float(_projection_at(setting, components, np.array([float(lam)]), x)[0])


def dunkl_spherical_mean(setting: DunklSetting, components, x, r_grid: RadialGrid, lambdas=None):
    """Spherical mean profile F_x(r): inverse Hankel transform (order
    lambda_kappa) of the projection at x, taken as a function of lam."""
    if not components:
        return SampledRadialFunction(r_grid, np.zeros(len(r_grid)))
    lam_grid = lambdas if lambdas is not None else components[0].b.grid
    vals = _projection_at(setting, components, lam_grid.nodes, x)
    G = SpectralSamples(lam_grid, vals, "hankel-measure", setting.lambda_kappa, {"x": tuple(np.ravel(x))})
    return hankel_inverse(G, setting.lambda_kappa, r_grid)


def component_plancherel(setting: DunklSetting, components):
    """Both sides of the componentwise Plancherel identity.

    Spectral: sum_m int |lam^m b_m|^2 lam^{2 lk + 1} dlam / c_{lk+m}.
    Radial:   sum_m int |f_m|^2 r^{2 lk + 1} dr / c_{lk+m}.
    """
    lk = setting.lambda_kappa
    lhs = rhs = 0.0
    for tc in components:
        pair = hankel(lk + tc.degree)
        lam = tc.b.grid.nodes
        lhs += tc.b.grid.integrate(np.abs(tc.b.values) ** 2 * pair.spectral_density(lam))
        g = _reduced_profile(tc.component)
        rhs += g.grid.integrate(g.values ** 2 * pair.radial_density(g.grid.nodes))
    return lhs, rhs


# -------------------------------------------------------------------- audit
def uncertainty_audit_thm13(setting: DunklSetting, components, theta: ThetaSpec, lambda_window,
                            vanish_radius, x_samples=None, shift=1.0, m_values=None):
    """Spectral-decay audit on the Dunkl side.

    ``components`` are transformed components whose profiles vanish on
    [0, l).  d(lam) is |projection at x| for sample points |x| < l; the
    Carleman diagnostics use the Bessel pair of order lambda_kappa with
    offset ``shift`` under the imposed envelope e^{-lam theta(lam)}.
    """
    from .symmetric_space import _audit, carleman_m_values

    l = float(vanish_radius)
    for tc in components:
        f = tc.component.radial_profile
        peak = np.max(np.abs(f.values)) if f.values.size else 0.0
        inside = f.grid.nodes < l
        if np.any(np.abs(f.values[inside]) > 1e-14 * max(peak, 1e-300)):
            raise DomainError(f"component {tc.component.harmonic_id} does not vanish on [0, {l})")
    if x_samples is None:
        x_samples = [np.eye(setting.n)[0] * s for s in np.linspace(0.0, 0.9 * l, 4)]
    xs = [np.asarray(x, dtype=float) for x in x_samples]
    m_values = carleman_m_values() if m_values is None else m_values
    lam_window = tuple(float(v) for v in lambda_window)
    if components:
        grid = components[0].b.grid
        if any(np.any(tc.component.radial_profile.values) for tc in components) and all(
                np.all(np.abs(tc.b.values) < 1e-300) for tc in components):
            raise DomainError("spectral data underflow across the whole window")
    else:
        from .transforms import lambda_grid

        grid = lambda_grid(lam_window[1])
    sel = (grid.nodes >= lam_window[0]) & (grid.nodes <= lam_window[1])
    lam = grid.nodes[sel]
    b0 = np.zeros(lam.size)
    for tc in components:
        if tc.degree == 0:
            b0 = b0 + np.real(tc.b.values)[sel]
    proj = np.array([_projection_at(setting, components, lam, x) for x in xs]).reshape(len(xs), lam.size)
    rx = np.array([np.linalg.norm(x) for x in xs])
    meta = {"n": setting.n, "kappa": ";".join(f"{k:g}" for k in setting.kappa) or "0",
            "lambda_kappa": setting.lambda_kappa, "vanish_radius": l, "shift": float(shift),
            "lambda_window": f"{lam_window[0]:g}:{lam_window[1]:g}"}
    return _audit(hankel(setting.lambda_kappa), lam, b0, proj, np.full(proj.shape, np.nan), rx, theta,
                  float(shift), m_values, meta)


@dataclass(frozen=True, eq=False)
class DunklWitness:
    """Paley-Wiener transfer of prod sinc(a_k lam) to Hankel order lambda_kappa.

    ``C_projection`` is the measured max |P_lam f(x)| e^{lam theta(lam)}
    for the radial witness, where P_lam f(x) = b_0(lam) psi(lam |x|).
    """

    box: object
    envelope: object
    profile: SampledRadialFunction
    support: object
    lam: np.ndarray
    projection: np.ndarray
    x_samples: np.ndarray
    C_projection: float

    @property
    def tail_mass(self):
        return self.support.tail_beyond(1.5 * self.box.total_support)


def dunkl_sharpness_witness(setting: DunklSetting, theta: ThetaSpec, N=64, support_budget=1.0,
                            lam_max=400.0, lambda_window=(1.0, 400.0), x_samples=(0.0, 0.5, 1.0, 2.0)):
    """Radial f of small support whose projections decay like e^{-lam theta(lam)}."""
    from .ingham import construct_box_product, decay_envelope, transfer_via_paley_wiener
    from .transforms import lambda_grid

    box, _ = construct_box_product(theta, N, support_budget)
    env = decay_envelope(box, theta, lambda_window[0], lambda_window[1])
    lg = lambda_grid(lam_max)
    fh = SpectralSamples(lg, box.transform(lg.nodes), "hankel-measure", setting.lambda_kappa,
                         {"support": box.total_support})
    g, rep = transfer_via_paley_wiener(fh, setting.lambda_kappa, nominal_support=box.total_support)
    sel = (lg.nodes >= lambda_window[0]) & (lg.nodes <= lambda_window[1])
    lam = lg.nodes[sel]
    xs = np.asarray(x_samples, dtype=float)
    proj = np.array([fh.values[sel] * bessel_psi(setting.lambda_kappa, lam * x) for x in xs])
    C = float(np.max(np.abs(proj) * np.exp(lam * theta(lam))[None, :]))
    return DunklWitness(box, env, g, rep, lam, proj, xs, C)
