"""Rank-one symmetric spaces reduced to Jacobi analysis: spherical
functions, K-type spherical functions, spectral projections, spherical
means and the spectral-decay uncertainty audit.

Only K-biinvariant (radial) profiles are represented; a point of the space
enters through its radial coordinate r.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .ingham import (
    ThetaSpec,
    carleman_verdict,
    classify_theta,
    envelope_log_norms,
)
from .numerics import (
    RadialGrid,
    SampledRadialFunction,
    SpectralSamples,
    eigen_residual,
    jacobi_op,
)
from .specfun import JacobiParams, KTypeIndex, jacobi_phi, kostant_Q, pochhammer
from .transforms import jacobi, jacobi_forward, jacobi_inverse

__all__ = [
    "RankOneSpace", "KTypeIndex", "ProjectionField", "space_from_multiplicities",
    "spherical_fn", "spherical_fn_delta", "spherical_transform", "project",
    "spherical_mean_profile", "AuditReport", "uncertainty_audit_thm11",
    "carleman_m_values", "SharpnessWitness", "sharpness_witness",
]


@dataclass(frozen=True)
class RankOneSpace:
    """Root multiplicities and the Jacobi parameters they induce.

    ``rho_space`` is the half-sum of positive roots with multiplicity,
    (m_gamma + 2 m_2gamma) / 2, which equals alpha + beta + 1.
    """

    m_gamma: int
    m_2gamma: int
    params: JacobiParams = field(init=False)
    rho_space: float = field(init=False)

    def __post_init__(self):
        if int(self.m_gamma) != self.m_gamma or self.m_gamma < 1:
            raise DomainError("m_gamma must be a positive integer")
        if int(self.m_2gamma) != self.m_2gamma or self.m_2gamma < 0:
            raise DomainError("m_2gamma must be a nonnegative integer")
        a = 0.5 * (self.m_gamma + self.m_2gamma - 1)
        b = 0.5 * (self.m_2gamma - 1)
        object.__setattr__(self, "params", JacobiParams(a, b))
        object.__setattr__(self, "rho_space", 0.5 * (self.m_gamma + 2 * self.m_2gamma))
        if self.rho_space != self.params.rho:
            raise DomainError("inconsistent rho")

    @property
    def alpha(self):
        return self.params.alpha

    @property
    def beta(self):
        return self.params.beta

    @property
    def rho(self):
        return self.rho_space


def space_from_multiplicities(m_gamma, m_2gamma):
    return RankOneSpace(int(m_gamma), int(m_2gamma))


def spherical_fn(space: RankOneSpace, lam, r):
    """Elementary spherical function Phi_lam(a_r) = phi_lam^{(alpha, beta)}(r)."""
    return jacobi_phi(space.params, lam, r)


def spherical_fn_delta(space: RankOneSpace, ktype, lam, r):
    """Spherical function of K-type (p, q):

    Q(i lam + rho) (alpha+1)_p^{-1} sinh^p r cosh^q r phi^{(alpha+p, beta+q)}_lam(r).

    Complex-valued because the Kostant factor is.
    """
    kt = ktype if isinstance(ktype, KTypeIndex) else KTypeIndex(*ktype)
    p = space.params
    shifted = JacobiParams(p.alpha + kt.p, p.beta + kt.q)
    r = np.asarray(r, dtype=float)
    q = kostant_Q(p, kt, lam)
    val = (q / pochhammer(p.alpha + 1.0, kt.p) * np.sinh(r) ** kt.p * np.cosh(r) ** kt.q
           * jacobi_phi(shifted, lam, r))
    return complex(val) if np.ndim(val) == 0 else np.asarray(val, dtype=complex)


def spherical_transform(space: RankOneSpace, f: SampledRadialFunction, lambdas) -> SpectralSamples:
    """Spherical transform of a radial profile (the Jacobi transform)."""
    return jacobi_forward(f, space.params, lambdas)


@dataclass(frozen=True, eq=False)
class ProjectionField:
    """P_lam f along a_r, an eigenfunction with eigenvalue -(lam^2 + rho^2)."""

    lam: float
    profile: SampledRadialFunction
    eigenvalue: float
    space: RankOneSpace

    def eigen_residual(self):
        return eigen_residual(self.profile, jacobi_op(self.space.params), self.eigenvalue)


def project(space: RankOneSpace, f_tilde: SpectralSamples, lam, r_grid: RadialGrid) -> ProjectionField:
    """P_lam f(a_r) = f~(lam) Phi_lam(a_r) for a radial f (f~ interpolated linearly)."""
    if lam <= 0:
        raise DomainError("projection parameter must be positive")
    value = f_tilde.interpolate(lam)
    prof = SampledRadialFunction(r_grid, np.real(value) * spherical_fn(space, lam, r_grid.nodes))
    return ProjectionField(float(lam), prof, -(lam * lam + space.rho ** 2), space)


def spherical_mean_profile(space: RankOneSpace, f_tilde: SpectralSamples, x_r, r_grid: RadialGrid):
    """Spherical mean F_x(r) = (1/2pi) int f~(lam) Phi_lam(x) Phi_lam(r) |c|^{-2} dlam."""
    phi_x = spherical_fn(space, f_tilde.grid.nodes, np.full(f_tilde.grid.nodes.shape, float(x_r)))
    G = f_tilde.with_values(np.real(f_tilde.values) * phi_x, x_r=float(x_r))
    return jacobi_inverse(G, space.params, r_grid)


# ------------------------------------------------------------------ audit
def carleman_m_values(m_max=40, m_far=1e12, n_far=60):
    """1..m_max followed by a geometric extension to m_far."""
    head = np.arange(1, m_max + 1, dtype=float)
    tail = np.unique(np.round(np.geomspace(m_max + 1, m_far, n_far)))
    return np.concatenate([head, tail])


@dataclass(frozen=True, eq=False)
class AuditReport:
    """Diagnostics of the decay-versus-vanishing dichotomy.

    Per-lambda rows (one block per sample radius x): lam, the transform,
    the kernel value at x (Phi_lam(x) on the symmetric-space side, nan when
    not separable), the projection P_lam f(x), d = |P_lam f(x)| and
    C = d e^{lam theta(lam)}.  Per-m rows: m, log ||L^m F|| under the
    imposed envelope and the Carleman partial sums over consecutive m.
    """

    lam: np.ndarray
    x_samples: np.ndarray
    transform: np.ndarray
    kernel_at_x: np.ndarray
    projection: np.ndarray
    d: np.ndarray
    C: np.ndarray
    best_constant: float
    m: np.ndarray
    log_norms: np.ndarray
    carleman: object
    classification: object
    obstruction: bool
    meta: dict

    m_track: int = 40

    @property
    def partial_sums(self):
        """Carleman partial sums for m = 1..m_track."""
        return np.asarray(self.carleman.partial_sums)[: self.m_track]

    def summary(self):
        cv = self.carleman
        ps = self.partial_sums
        return {
            "theta": self.meta.get("theta", ""),
            "theta_classification": self.classification.verdict,
            "best_constant": self.best_constant,
            "carleman_verdict": cv.verdict,
            "carleman_p": cv.p,
            "carleman_q": cv.q,
            "carleman_partial_sum": float(ps[-1]) if ps.size else 0.0,
            "carleman_terms_counted": int(ps.size),
            "carleman_trend_positive": bool(ps.size > 1 and ps[-1] > ps[-2]),
            "carleman_reason": cv.reason,
            "obstruction_mechanism": self.obstruction,
            **{k: v for k, v in self.meta.items() if k != "theta"},
        }


def _audit(pair, lam, transform, projection, kernel, x_radii, theta, shift, m_values, meta):
    """Shared audit body; ``projection`` has one row per sample radius."""
    projection = np.atleast_2d(projection)
    d = np.abs(projection)
    with np.errstate(over="ignore"):
        C = d * np.exp(lam * theta(lam))[None, :]
    cls = classify_theta(theta)
    m = np.asarray(m_values, dtype=float)
    meta = {"theta": theta.name, **meta}
    if not np.any(projection) and not np.any(transform):
        # zero input: nothing to bound, norms vanish identically
        ln = np.full(m.size, -np.inf)
        cv = carleman_verdict(ln, m_values=m, log_norms=True)
        return AuditReport(lam, x_radii, transform, kernel, projection, d, C, 0.0, m, ln, cv, cls,
                           False, meta)
    ln = envelope_log_norms(theta, pair, shift, m)
    cv = carleman_verdict(ln, m_values=m, log_norms=True)
    obstruction = cls.verdict == "divergent" and cv.verdict == "diverging"
    best = float(C.max()) if C.size else 0.0
    return AuditReport(lam, x_radii, transform, kernel, projection, d, C, best, m, ln, cv, cls,
                       obstruction, meta)


def uncertainty_audit_thm11(space: RankOneSpace, f: SampledRadialFunction, theta: ThetaSpec,
                            lambda_window, vanish_radius=None, x_samples=None, f_tilde=None,
                            m_values=None):
    """Spectral-decay audit for a radial f vanishing on [0, l).

    Reports d(lam) = |f~(lam) Phi_lam(x)| at sample points x < l, the best
    constant C with d <= C e^{-lam theta(lam)} on the window, Carleman
    diagnostics of ||Delta^m F_x|| under the imposed envelope
    |F~_x| = e^{-lam theta(lam)} (shift rho), and theta's classification.

    Raises
    ------
    DomainError
        If f does not vanish on [0, l) per its support hint.
    """
    l = vanish_radius if vanish_radius is not None else (f.support_hint[0] if f.support_hint else 0.0)
    if l > 0:
        inside = f.grid.nodes < l
        peak = np.max(np.abs(f.values)) if f.values.size else 0.0
        if np.any(np.abs(f.values[inside]) > 1e-14 * max(peak, 1e-300)):
            raise DomainError(f"f does not vanish on [0, {l})")
    if x_samples is None:
        x_samples = np.linspace(0.0, 0.9 * l, 4) if l > 0 else np.array([0.0])
    if f_tilde is None:
        from .transforms import lambda_grid

        f_tilde = jacobi_forward(f, space.params, lambda_grid(float(lambda_window[1])))
    if np.any(np.abs(f.values) > 0) and np.all(np.abs(f_tilde.values) < 1e-300):
        raise DomainError("spectral data underflow across the whole window")
    m_values = carleman_m_values() if m_values is None else m_values

    lam_nodes = f_tilde.grid.nodes
    sel = (lam_nodes >= lambda_window[0]) & (lam_nodes <= lambda_window[1])
    lam = lam_nodes[sel]
    ft = np.real(f_tilde.values)[sel]
    xs = np.atleast_1d(np.asarray(x_samples, dtype=float))
    kx = np.array([spherical_fn(space, lam, np.full(lam.shape, x)) for x in xs]).reshape(xs.size, lam.size)
    meta = {"space": f"({space.m_gamma},{space.m_2gamma})", "alpha": space.alpha, "beta": space.beta,
            "rho": space.rho, "vanish_radius": l, "shift": space.rho,
            "lambda_window": f"{lambda_window[0]:g}:{lambda_window[1]:g}"}
    return _audit(jacobi(space.params), lam, ft, ft[None, :] * kx, kx, xs, theta, space.rho,
                  m_values, meta)


# ------------------------------------------------------ sharpness witness
@dataclass(frozen=True, eq=False)
class SharpnessWitness:
    """A compactly supported radial f with f~(lam) = prod sinc(a_k lam).

    ``tail_mass`` is the fraction of ||f||^2 (Plancherel measure) beyond
    1.5 times the nominal support; ``C_projection`` is the measured
    max |P_lam f(x)| e^{lam theta(lam)} over the window and sample radii.
    """

    box: object
    envelope: object
    profile: SampledRadialFunction
    f_tilde: SpectralSamples
    tail_mass: float
    x_samples: np.ndarray
    lam: np.ndarray
    projection: np.ndarray
    C_projection: float


def sharpness_witness(space: RankOneSpace, theta: ThetaSpec, N=64, support_budget=1.0,
                      lam_max=400.0, lambda_window=(1.0, 400.0), x_samples=(0.0, 0.5, 1.0, 2.0)):
    """Projections bounded by C' e^{-lam theta(lam)} from the box construction.

    The even entire function prod sinc(a_k lam) is taken as spherical
    transform data; inverting it yields f, supported in the ball of radius
    sum a_k, and P_lam f(x) = f~(lam) Phi_lam(x) inherits the decay since
    |Phi_lam| <= 1.
    """
    from .ingham import construct_box_product, decay_envelope
    from .numerics import make_grid
    from .specfun import jacobi_weight
    from .transforms import lambda_grid

    box, _ = construct_box_product(theta, N, support_budget)
    env = decay_envelope(box, theta, lambda_window[0], lambda_window[1])
    S = box.total_support
    lg = lambda_grid(lam_max)
    ft = SpectralSamples(lg, box.transform(lg.nodes), "jacobi-plancherel", space.params, {"support": S})
    rg = make_grid(3.0 * S, 120, 10)
    f = jacobi_inverse(ft, space.params, rg)
    mass = rg.quad_weights * f.values ** 2 * jacobi_weight(space.params, rg.nodes)
    tail = float(mass[rg.nodes > 1.5 * S].sum() / mass.sum())
    sel = (lg.nodes >= lambda_window[0]) & (lg.nodes <= lambda_window[1])
    lam = lg.nodes[sel]
    xs = np.asarray(x_samples, dtype=float)
    proj = np.array([ft.values[sel] * spherical_fn(space, lam, np.full(lam.shape, x)) for x in xs])
    C = float(np.max(np.abs(proj) * np.exp(lam * theta(lam))[None, :]))
    return SharpnessWitness(box, env, f, ft, tail, xs, lam, proj, C)
