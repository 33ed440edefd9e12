"""Decay moduli, box-product constructions with prescribed transform decay,
Paley-Wiener transfer to the Hankel side, and Carleman / moment
quasi-analyticity diagnostics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .errors import BudgetError, ConfigError, DomainError, WindowError
from .numerics import (
    SampledRadialFunction,
    SpectralSamples,
    make_grid,
    make_uniform_grid,
)
from .specfun import hankel_constant
from .transforms import PairKind, hankel, hankel_inverse, log_spectral_power_norm, pair_of

__all__ = [
    "ThetaSpec", "builtin_theta", "tabulated_theta", "load_theta_table",
    "classify_theta", "ThetaClassification", "BoxProduct", "construct_box_product",
    "box_transform", "decay_envelope", "transfer_via_paley_wiener", "SupportReport",
    "MomentReport", "moment_report", "CarlemanVerdict", "carleman_verdict",
    "envelope_log_norms",
]

BUILTIN_THETAS = ("inv-sqrt", "inv-log", "log-log", "zero")


# ------------------------------------------------------------------ theta
@dataclass(frozen=True, eq=False)
class ThetaSpec:
    """A nonnegative, nonincreasing decay modulus theta on [0, inf).

    ``evaluator`` maps an array of t >= 0 to theta(t).  Construction
    samples theta on a geometric grid and rejects increasing or
    non-vanishing input.
    """

    name: str
    evaluator: Callable[[np.ndarray], np.ndarray]
    description: str = ""

    def __post_init__(self):
        t = np.concatenate([[0.0], np.geomspace(1e-3, 1e300, 601)])
        v = np.asarray(self.evaluator(t), dtype=float)
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise DomainError(f"theta '{self.name}' must be finite and nonnegative")
        inc = np.diff(v) > 1e-12 * np.maximum(np.abs(v[:-1]), 1e-300)
        if np.any(inc):
            i = int(np.argmax(inc))
            raise DomainError(f"theta '{self.name}' is not monotone: increases after t={t[i]:.3g}")
        if v[0] > 0 and v[-1] > 0.5 * v[0]:
            raise DomainError(f"theta '{self.name}' does not decay to 0")

    def __call__(self, t):
        return np.asarray(self.evaluator(np.asarray(t, dtype=float)), dtype=float)


def builtin_theta(name, scale=1.0):
    """Built-in moduli: inv-sqrt (1+t)^-1/2, inv-log 1/log(e+t),
    log-log 1/(log(e+t) log log(e^e+t)) and zero, times ``scale``."""
    ee = math.exp(math.e)
    table = {
        "inv-sqrt": lambda t: scale / np.sqrt(1.0 + t),
        "inv-log": lambda t: scale / np.log(math.e + t),
        "log-log": lambda t: scale / (np.log(math.e + t) * np.log(np.log(ee + t))),
        "zero": lambda t: np.zeros_like(np.asarray(t, dtype=float)),
    }
    if name not in table:
        raise ConfigError(f"unknown theta '{name}'; choose from {', '.join(BUILTIN_THETAS)}")
    return ThetaSpec(name, table[name], f"builtin {name} x {scale:g}")


def tabulated_theta(t, values, name="table"):
    """Piecewise log-log linear interpolation of a table; constant below the
    first node and power-law extrapolation of the last segment beyond."""
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.ndim != 1 or t.shape != v.shape or t.size < 2:
        raise DomainError("theta table needs matching columns with at least two rows")
    if np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise DomainError("theta table t column must be positive and increasing")
    if np.any(v <= 0):
        raise DomainError("theta table values must be positive")
    lt, lv = np.log(t), np.log(v)
    slope = (lv[-1] - lv[-2]) / (lt[-1] - lt[-2])

    def ev(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            lx = np.log(np.maximum(x, t[0]))
        out = np.interp(lx, lt, lv)
        beyond = lx > lt[-1]
        out = np.where(beyond, lv[-1] + slope * (lx - lt[-1]), out)
        with np.errstate(over="ignore"):
            return np.exp(out)

    return ThetaSpec(name, ev, f"table with {t.size} rows")


def load_theta_table(path):
    """Read a two-column CSV (t, theta) with optional header and # comments.

    Raises
    ------
    ConfigError
        With the offending line number for malformed rows.
    """
    rows = []
    seen_content = False
    with open(path, newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            first, seen_content = not seen_content, True
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 2:
                raise ConfigError(f"{path}:{lineno}: expected 2 columns, found {len(parts)}")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError:
                if first:
                    continue  # header line
                raise ConfigError(f"{path}:{lineno}: non-numeric entry {line!r}") from None
    if len(rows) < 2:
        raise ConfigError(f"{path}: need at least two data rows")
    t, v = np.array(rows).T
    try:
        return tabulated_theta(t, v, name=str(path))
    except DomainError as exc:
        raise ConfigError(f"{path}: {exc}") from None


@dataclass(frozen=True)
class ThetaClassification:
    """Verdict on int_1^inf theta(t) dt / t with its dyadic trace.

    ``block_edges_u`` are the u = log t block boundaries, ``increments`` the
    integral over each block and ``partial`` their running sums.
    """

    verdict: str
    block_edges_u: tuple
    increments: tuple
    partial: tuple
    tail_ratio: float
    tail_slope: float
    extrapolated: float


def _block_integral(theta, u0, u1, order=16, panels=8):
    g = make_grid(u1, panels, order, r_min=u0)
    return g.integrate(theta(np.exp(g.nodes)))


def classify_theta(theta: ThetaSpec, t_max=1e300) -> ThetaClassification:
    """Classify int_1^inf theta(t)/t dt as convergent, divergent or undetermined.

    In u = log t the integral is split into dyadic blocks [2^k, 2^{k+1}]
    (plus [0, 1]) up to log t_max.  Geometrically decaying block
    increments, or power-law decay steeper than k^-1.5, mean convergence;
    increments decaying no faster than about k^-1 mean divergence.  Aitken
    extrapolation of the partial sums estimates the limit on the convergent
    side and must be stable.
    """
    u_top = math.log(t_max)
    edges = [0.0, 1.0]
    while edges[-1] * 2 <= u_top:
        edges.append(edges[-1] * 2)
    inc = np.array([_block_integral(theta, a, b) for a, b in zip(edges[:-1], edges[1:])])
    part = np.cumsum(inc)
    d = inc[1:]  # dyadic blocks k = 0, 1, ...
    tail = d[-4:]
    if np.all(inc == 0):
        return ThetaClassification("convergent", tuple(edges), tuple(inc), tuple(part), 0.0, -np.inf, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = tail[1:] / tail[:-1]
        ratio = float(np.exp(np.mean(np.log(ratios)))) if np.all(tail > 0) else 0.0
        k = np.arange(1, d.size + 1, dtype=float)[-4:]
        slope = float(np.polyfit(np.log(k), np.log(tail), 1)[0]) if np.all(tail > 0) else -np.inf
    # Aitken on the last three partial sums
    s0, s1, s2 = part[-3:]
    den = s2 - 2 * s1 + s0
    aitken = s2 - (s2 - s1) ** 2 / den if den != 0 else s2
    s0b, s1b, s2b = part[-4:-1]
    denb = s2b - 2 * s1b + s0b
    aitken_prev = s2b - (s2b - s1b) ** 2 / denb if denb != 0 else s2b
    stable = abs(aitken - aitken_prev) <= 0.1 * max(abs(aitken), 1e-300)
    if slope >= -1.1:
        verdict, extrap = "divergent", math.inf
    elif (ratio < 0.8 or slope < -1.5) and stable:
        verdict, extrap = "convergent", float(aitken if np.isfinite(aitken) else part[-1])
    else:
        verdict, extrap = "undetermined", math.nan
    return ThetaClassification(verdict, tuple(edges), tuple(inc), tuple(part), ratio, slope, extrap)


# ------------------------------------------------------------ box product
@dataclass(frozen=True, eq=False)
class BoxProduct:
    """Half-lengths a_k of the normalized boxes and their sum."""

    lengths: np.ndarray
    calibration: float
    theta_name: str

    def __post_init__(self):
        a = np.asarray(self.lengths, dtype=float)
        if a.ndim != 1 or a.size < 1 or np.any(a <= 0):
            raise DomainError("box lengths must be positive")
        if np.any(np.diff(a) > 0):
            raise DomainError("box lengths must be nonincreasing")
        object.__setattr__(self, "lengths", a)

    @property
    def total_support(self):
        return float(self.lengths.sum())

    def transform(self, xi):
        return box_transform(self.lengths, xi)

    def certificate(self, xi):
        """Modulus theta_N(xi) with prod min(1, 1/(a_k xi)) = exp(-xi theta_N(xi))."""
        xi = np.asarray(xi, dtype=float)
        lb = np.log(np.maximum(1.0, np.multiply.outer(xi, self.lengths)))
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(xi > 0, lb.sum(axis=-1) / xi, 0.0)


def box_transform(lengths, xi):
    """prod_k sin(a_k xi)/(a_k xi) (closed form)."""
    xi = np.asarray(xi, dtype=float)
    out = np.ones(xi.shape)
    for a in np.asarray(lengths, dtype=float):
        out = out * np.sinc(a * xi / np.pi)
    return out


def _grid_step(n_boxes, xi_check):
    # each resampled averaging step costs ~ (xi h)^2 / 12 relative error
    return math.sqrt(12e-7 / max(1, n_boxes + 1)) / xi_check


def construct_box_product(theta: ThetaSpec, N, support_budget=1.0, calibration=None,
                          xi_check=100.0, h=None, require_convergent=True):
    """Compactly supported even function with transform prod sinc(a_k xi).

    Lengths follow a_k = theta(2^k) log 2 * calibration, k = 1..N.  By
    default the calibration is the largest value keeping sum a_k within
    ``support_budget``.  The function is built by iterated exact box
    averaging of a unit-mass hat on a uniform grid of step ``h``; boxes
    shorter than one grid step are merged into a single box of the same
    total half-length (their joint transform differs from the merged sinc by
    at most (A xi)^2 / 6 with A the merged length).

    Returns
    -------
    BoxProduct, SampledRadialFunction
        The lengths, and the profile on x >= 0.

    Raises
    ------
    DomainError
        If theta's log-integral is classified divergent (the construction
        cannot deliver that decay) and ``require_convergent`` is set.
    BudgetError
        If an explicit calibration overshoots the support budget.
    """
    if N < 1:
        raise DomainError("N must be positive")
    if require_convergent and classify_theta(theta).verdict == "divergent":
        raise DomainError(f"theta '{theta.name}' has a divergent log-integral; no compactly "
                          "supported function has that transform decay")
    k = np.arange(1, N + 1, dtype=float)
    base = theta(2.0 ** k) * math.log(2.0)
    if np.any(base <= 0):
        raise BudgetError("theta vanishes at a dyadic node; box lengths would be zero")
    if calibration is None:
        calibration = support_budget / base.sum()
    lengths = base * calibration
    if lengths.sum() > support_budget * (1 + 1e-12):
        raise BudgetError(f"dyadic sums {lengths.sum():.4g} exceed the support budget {support_budget:.4g}")
    box = BoxProduct(lengths, float(calibration), theta.name)
    h0 = h or _grid_step(N, xi_check) * min(1.0, box.total_support)
    # put the kinks of the first (largest) box exactly on grid nodes
    h = float(lengths[0] / math.ceil(lengths[0] / h0 - 1e-9))
    big = lengths[lengths >= h]
    small_total = float(lengths[lengths < h].sum())
    R = box.total_support
    n_half = int(math.ceil((R * 1.05 + 4 * h) / h))
    x_full = (np.arange(2 * n_half + 1) - n_half) * h
    v = np.zeros(2 * n_half + 1)
    v[n_half] = 1.0 / h
    # structural nonzero pattern, immune to underflow of the high-order
    # vanishing near the support edge
    mask = v.copy()
    reach = 0.0
    for a in list(big) + ([small_total] if small_total > 0 else []):
        v = kernels.box_average(v, h, float(a))
        mask = (kernels.box_average(mask, h, float(a)) > 0).astype(float)
        reach += a
        # the exact convolution vanishes beyond the accumulated half-width;
        # drop the interpolation spill there
        outside = np.abs(x_full) > reach + 1e-9 * h
        v[outside] = 0.0
        mask[outside] = 0.0
    x = x_full[n_half:]
    grid = make_uniform_grid(x[-1], x.size)
    support = float(x[np.nonzero(mask[n_half:])[0][-1]])
    prof = SampledRadialFunction(grid, np.maximum(v[n_half:], 0.0), (0.0, support))
    return box, prof


def measured_support(profile: SampledRadialFunction):
    """Support radius of a constructed profile.

    Uses the structural support recorded at construction when present,
    otherwise the last node holding a nonzero value.
    """
    if profile.support_hint is not None:
        return float(profile.support_hint[1])
    nz = np.nonzero(profile.values)[0]
    return float(profile.grid.nodes[nz[-1]]) if nz.size else 0.0


def profile_transform(profile: SampledRadialFunction, xi):
    """Fourier transform of the even function given on x >= 0 (trapezoid)."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    x, w, v = profile.grid.nodes, profile.grid.quad_weights, profile.values
    keep = v != 0
    x, wv = x[keep], (w * v)[keep]
    out = np.empty(xi.shape)
    step = max(1, 2_000_000 // max(1, x.size))
    for s in range(0, xi.size, step):
        out[s:s + step] = 2.0 * np.cos(np.outer(xi[s:s + step], x)) @ wv
    return out


@dataclass(frozen=True, eq=False)
class DecayEnvelope:
    """|fhat| against exp(-xi theta(xi)) on a xi grid.

    ``C_measured`` is max |fhat| e^{xi theta}; ``C_certified`` uses the
    bound prod min(1, 1/(a_k xi)) instead of |fhat| and so dominates it.
    """

    xi: np.ndarray
    abs_fhat: np.ndarray
    envelope: np.ndarray
    C_measured: float
    C_certified: float


def decay_envelope(box: BoxProduct, theta: ThetaSpec, xi_min=1.0, xi_max=1e3, n=20001):
    xi = np.geomspace(xi_min, xi_max, n)
    absf = np.abs(box.transform(xi))
    expo = xi * theta(xi)
    env = np.exp(-expo)
    cert = np.exp(-xi * box.certificate(xi) + expo)
    return DecayEnvelope(xi, absf, env, float(np.max(absf * np.exp(expo))), float(cert.max()))


# ------------------------------------------------------------ Paley-Wiener
@dataclass(frozen=True, eq=False)
class SupportReport:
    """Where the mass of g (in the order-alpha measure) sits.

    ``tail`` holds the fraction of ||g||^2 beyond each node of ``r``.
    """

    r: np.ndarray
    tail: np.ndarray
    r_9999: float
    nominal_support: float | None

    def tail_beyond(self, radius):
        return float(np.interp(radius, self.r, self.tail))


def support_report(g: SampledRadialFunction, alpha, nominal_support=None):
    dens = g.grid.nodes ** (2 * alpha + 1) / hankel_constant(alpha)
    mass = g.grid.quad_weights * g.values ** 2 * dens
    total = mass.sum()
    tail = (total - np.cumsum(mass)) / total if total > 0 else np.zeros_like(mass)
    tail = np.maximum(tail, 0.0)
    idx = np.searchsorted(-tail, -1e-4)
    r9999 = float(g.grid.nodes[min(idx, tail.size - 1)])
    return SupportReport(g.grid.nodes, tail, r9999, nominal_support)


def transfer_via_paley_wiener(fhat: SpectralSamples, alpha, r_grid=None, nominal_support=None,
                              strict=False):
    """Invert an even transform at Hankel order alpha and certify support.

    Parameters
    ----------
    fhat : SpectralSamples
        Values on a lambda grid (any weight kind; reinterpreted at order alpha).
    nominal_support : float, optional
        Expected support radius; the tail-mass check runs at 1.5 times it.
    strict : bool
        Raise WindowError when the tail mass there exceeds 1e-6.
    """
    nominal = nominal_support if nominal_support is not None else fhat.meta.get("support")
    if r_grid is None:
        r_hi = 3.0 * nominal if nominal else 10.0
        r_grid = make_grid(r_hi, 120, 10)
    F = SpectralSamples(fhat.grid, np.real(fhat.values), "hankel-measure", float(alpha), dict(fhat.meta))
    g = hankel_inverse(F, alpha, r_grid)
    rep = support_report(g, alpha, nominal)
    if strict and nominal and rep.tail_beyond(1.5 * nominal) > 1e-6:
        raise WindowError(f"tail mass {rep.tail_beyond(1.5 * nominal):.2e} beyond 1.5 x support exceeds 1e-6")
    return g, rep


# ----------------------------------------------------------------- Carleman
@dataclass(frozen=True)
class CarlemanVerdict:
    """Carleman diagnostics for norms n_m: terms n_m^{-1/(2m)}.

    ``p`` and ``q`` are the fitted exponents in
    log t_m = a - p log m - q log log m over the tail.
    """

    verdict: str
    m: tuple
    terms: tuple
    partial_sums: tuple
    p: float
    q: float
    trend: float
    shift_robust: bool
    reason: str


def _fit_exponents(m, log_t):
    m = np.asarray(m, dtype=float)
    sel = m >= 3
    if sel.sum() < 4:
        sel = np.ones_like(m, dtype=bool)
    lm = np.log(m[sel])
    A = np.column_stack([np.ones(lm.size), -lm, -np.log(np.maximum(lm, 1e-3))])
    # fit only the upper half so early transients do not dominate
    half = max(4, lm.size // 2)
    coef, *_ = np.linalg.lstsq(A[-half:], log_t[sel][-half:], rcond=None)
    coef_p, *_ = np.linalg.lstsq(A[-half:, :2], log_t[sel][-half:], rcond=None)
    return float(coef[1]), float(coef[2]), float(coef_p[1])


def _decide(p, q, p_only, eps, q_max):
    if not np.isfinite(p):
        return "inconclusive", "non-finite fit"
    if p_only < 1 - eps and p < 1 - eps:
        return "diverging", f"terms decay like m^-{p_only:.3f}, slower than 1/m"
    if p > 1 + eps and p_only > 1 + eps:
        return "converging", f"terms decay like m^-{p:.3f}, faster than 1/m"
    if abs(p - 1) <= eps:
        if q <= q_max:
            return "diverging", f"terms ~ 1/(m log^{q:.2f} m), at most log-critical"
        return "converging", f"terms ~ 1/(m log^{q:.2f} m), log-summable"
    return "inconclusive", f"fit exponents p={p:.3f} (power only {p_only:.3f}), q={q:.3f}"


def carleman_verdict(norms, m_values=None, log_norms=False, eps=0.08, q_max=1.25,
                     sum_threshold=1e3, robust_shift=3) -> CarlemanVerdict:
    """Carleman diagnostics for positive norms indexed by m.

    Parameters
    ----------
    norms : array_like
        ||L^m f|| (or log of it when ``log_norms``) at ``m_values``
        (default 1..len).  Zero norms give infinite terms.
    eps, q_max : float
        Width of the band around p = 1 and the largest log exponent still
        counted as divergent.
    sum_threshold : float
        A partial sum above this with positive trend is read as divergence.
    """
    vals = np.asarray(norms, dtype=float)
    m = np.arange(1, vals.size + 1, dtype=float) if m_values is None else np.asarray(m_values, dtype=float)
    if np.any(m <= 0) or np.any(np.diff(m) <= 0):
        raise DomainError("m values must be positive and increasing")
    with np.errstate(divide="ignore"):
        lg = vals if log_norms else np.log(vals)
    log_t = -lg / (2.0 * m)
    terms = np.exp(log_t)
    run = int(np.sum(np.cumprod(m == m[0] + np.arange(m.size))))
    consec = np.arange(m.size) < run
    partial = np.cumsum(terms[consec])
    if np.any(np.isinf(log_t) & (log_t > 0)):
        return CarlemanVerdict("diverging", tuple(m), tuple(terms), tuple(partial), 0.0, 0.0,
                               math.inf, True, "vanishing norms (vacuous divergence)")
    p, q, p_only = _fit_exponents(m, log_t)
    trend = float(terms[consec][-1]) if partial.size else 0.0
    verdict, reason = _decide(p, q, p_only, eps, q_max)
    if partial.size and partial[-1] > sum_threshold and trend > 0:
        verdict, reason = "diverging", f"partial sum {partial[-1]:.3g} exceeds {sum_threshold:g}"
    robust = True
    for j in range(1, robust_shift + 1):
        if m.size - j < 8:
            break
        pj, qj, pj_only = _fit_exponents(m[j:], log_t[j:])
        if _decide(pj, qj, pj_only, eps, q_max)[0] != verdict and "partial sum" not in reason:
            robust = False
    return CarlemanVerdict(verdict, tuple(m), tuple(terms), tuple(partial), p, q, trend, robust, reason)


# ------------------------------------------------------------------ moments
@dataclass(frozen=True, eq=False)
class MomentReport:
    """Moments M(2m) = int lam^{2m} |F| dnu and their Carleman diagnostics.

    ``bound_rhs[m]`` is C_j ||L^{m+j} f|| with C_j^2 = int (lam^2 + delta^2)^{-2j} dnu.
    """

    m: np.ndarray
    moments: np.ndarray
    carleman_partial_sums: np.ndarray
    verdict: str
    j: int
    delta: float
    C_j: float
    bound_rhs: np.ndarray
    bound_holds: np.ndarray
    carleman: CarlemanVerdict = field(repr=False, default=None)


def _log_c_j(pair: PairKind, j, delta):
    if pair.kind == "hankel":
        a = pair.alpha
        lb = math.lgamma(a + 1) + math.lgamma(2 * j - a - 1) - math.lgamma(2 * j)
        return 0.5 * ((2 * a + 2 - 4 * j) * math.log(delta) + lb - math.log(2.0)
                      - math.log(hankel_constant(a)))
    # Jacobi: integrate in u = log lam where the integrand decays at both ends
    def log_integrand(u):
        lam = np.exp(u)
        return -2 * j * _log_sq_plus(u, delta) + pair.log_spectral_density(lam) + u

    u = _window(log_integrand, -60.0, 690.0)
    g = make_grid(u[1], 200, 12, r_min=u[0])
    li = log_integrand(g.nodes)
    top = li.max()
    return 0.5 * (top + math.log(np.dot(g.quad_weights, np.exp(li - top))))


def moment_report(F: SpectralSamples, pair_kind: PairKind | None = None, M_max=15, delta=None) -> MomentReport:
    """Moments of the spectral measure |F| dnu with the norm cross-check."""
    pair = pair_kind or pair_of(F)
    delta = pair.natural_shift if delta is None else float(delta)
    lam = F.grid.nodes
    absF = np.abs(F.values)
    m = np.arange(0, M_max + 1)
    nz = (absF > 0) & (lam > 0)
    if nz.any():
        base = np.log(F.grid.quad_weights[nz]) + np.log(absF[nz]) + pair.log_spectral_density(lam[nz])
        terms = base[None, :] + 2 * m[:, None] * np.log(lam[nz])[None, :]
        top = terms.max(axis=1)
        log_mom = top + np.log(np.exp(terms - top[:, None]).sum(axis=1))
    else:
        log_mom = np.full(m.shape, -np.inf)
    moments = np.exp(log_mom)
    j = int(math.floor((pair.alpha + 1) / 2)) + 1
    log_cj = _log_c_j(pair, j, delta)
    log_norm = np.atleast_1d(log_spectral_power_norm(F, delta, m + j, pair))
    log_rhs = log_cj + log_norm
    slack = 1e-12 * np.maximum(1.0, np.abs(np.where(np.isfinite(log_rhs), log_rhs, 0.0)))
    holds = log_mom <= log_rhs + slack
    cv = carleman_verdict(log_mom[1:], m_values=m[1:], log_norms=True)
    return MomentReport(m, moments, np.asarray(cv.partial_sums), cv.verdict, j, delta,
                        math.exp(log_cj), np.exp(log_rhs), holds, cv)


# -------------------------------------------------- envelope norms at large m
def _window(log_f, u_lo, u_hi, drop=60.0, n=4001):
    """Interval around the maximum of log_f where it stays within ``drop``."""
    lo, hi = u_lo, u_hi
    for _ in range(6):
        u = np.linspace(lo, hi, n)
        v = log_f(u)
        i = int(np.nanargmax(v))
        keep = np.nonzero(v >= v[i] - drop)[0]
        a, b = keep[0], keep[-1]
        du = u[1] - u[0]
        new_lo, new_hi = u[max(a - 1, 0)], u[min(b + 1, n - 1)]
        if new_hi - new_lo > 0.5 * (hi - lo) or (b - a) > 200:
            lo, hi = new_lo, new_hi
            break
        lo, hi = max(u_lo, new_lo - du), min(u_hi, new_hi + du)
    return lo, hi


def _log_sq_plus(u, shift):
    """log(e^{2u} + shift^2) without overflow."""
    u = np.asarray(u, dtype=float)
    if shift == 0:
        return 2 * u
    ls = 2 * math.log(abs(shift))
    return np.logaddexp(2 * u, ls)


def envelope_log_norms(theta: ThetaSpec, pair: PairKind, shift, m_values, amplitude=1.0,
                       panels=40, order=12):
    """log ||L^m F|| for |F(lam)| = amplitude * exp(-lam theta(lam)).

    ``||L^m F||^2 = int (lam^2 + shift^2)^{2m} |F|^2 dnu``, integrated in
    u = log lam over the window where the log-integrand is within 60 of its
    peak (Laplace localization), so m may be as large as ~1e12.
    """
    out = []
    for m in np.atleast_1d(np.asarray(m_values, dtype=float)):
        def log_f(u, m=m):
            lam = np.exp(u)
            with np.errstate(over="ignore", invalid="ignore"):
                decay = np.where(np.isfinite(lam), 2 * lam * theta(lam), np.inf)
            return 2 * m * _log_sq_plus(u, shift) - decay + pair.log_spectral_density(lam) + u

        lo, hi = _window(log_f, -40.0, 690.0)
        g = make_grid(hi, panels, order, r_min=lo)
        v = log_f(g.nodes)
        top = v.max()
        out.append(0.5 * (top + math.log(np.dot(g.quad_weights, np.exp(v - top))))
                   + math.log(amplitude))
    return np.array(out)
