"""Radial grids, weighted quadrature, an adaptive Runge-Kutta integrator and
finite-difference radial operators.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, GridWarning, StepUnderflowError
from .specfun import JacobiParams, bessel_psi, jacobi_phi

__all__ = [
    "RadialGrid", "SampledRadialFunction", "SpectralSamples", "make_grid",
    "make_uniform_grid", "integrate", "ode_solve_ivp", "jacobi_phi_ode",
    "RadialOperator", "bessel_op", "jacobi_op", "dunkl_component_op",
    "apply_operator_fd", "eigen_residual", "fd_weights", "smooth_bump",
]


# ---------------------------------------------------------------- grids
@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Quadrature nodes and weights on [r_min, r_max].

    Attributes
    ----------
    nodes, quad_weights : ndarray
        Strictly increasing nodes and positive weights.
    scheme : str
        ``"gauss-legendre"`` (composite panels) or ``"trapezoid"``.
    order : int
        Points per panel for Gauss-Legendre grids, 2 for trapezoid.
    """

    nodes: np.ndarray
    quad_weights: np.ndarray
    scheme: str
    order: int
    r_min: float
    r_max: float

    def __post_init__(self):
        n, w = np.asarray(self.nodes, float), np.asarray(self.quad_weights, float)
        if n.shape != w.shape or n.ndim != 1:
            raise DomainError("nodes and weights must be 1-D arrays of equal length")
        if np.any(np.diff(n) <= 0):
            raise DomainError("grid nodes must be strictly increasing")
        if np.any(w <= 0):
            raise DomainError("quadrature weights must be positive")
        n.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "nodes", n)
        object.__setattr__(self, "quad_weights", w)

    def __len__(self):
        return self.nodes.shape[0]

    def integrate(self, values):
        return float(np.dot(self.quad_weights, values))


def _panel_edges(r_min, r_max, panels, refine_origin, grading):
    edges = np.linspace(r_min, r_max, panels + 1)
    if refine_origin > 0:
        first = edges[1]
        geo = r_min + (first - r_min) * grading ** np.arange(refine_origin, 0, -1)
        edges = np.concatenate([[r_min], geo, edges[1:]])
    return edges


def make_grid(r_max, panels, order, r_min=0.0, refine_origin=0, grading=0.25):
    """Composite Gauss-Legendre grid on [r_min, r_max].

    Parameters
    ----------
    r_max : float
    panels, order : int
        Number of equal panels and Gauss points per panel; each panel
        integrates polynomials of degree <= 2*order - 1 exactly.
    refine_origin : int, optional
        Split the first panel geometrically (ratio ``grading``) this many
        times; needed for weights like r^{2a+1} with 2a+1 non-integer.
    """
    if r_max <= r_min or panels < 1 or order < 1:
        raise DomainError("make_grid needs r_max > r_min and positive panels/order")
    x, w = np.polynomial.legendre.leggauss(order)
    edges = _panel_edges(float(r_min), float(r_max), int(panels), int(refine_origin), grading)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
    weights = (0.5 * (b - a) * w).ravel()
    return RadialGrid(nodes, weights, "gauss-legendre", int(order), float(r_min), float(r_max))


def make_uniform_grid(r_max, n, r_min=0.0):
    """Uniform trapezoid grid with n nodes including both end points."""
    if n < 2:
        raise DomainError("uniform grid needs at least two nodes")
    nodes = np.linspace(r_min, r_max, n)
    h = nodes[1] - nodes[0]
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    return RadialGrid(nodes, w, "trapezoid", 2, float(r_min), float(r_max))


def grid_from_nodes(nodes):
    """Trapezoid weights on arbitrary increasing nodes."""
    nodes = np.asarray(nodes, float)
    d = np.diff(nodes)
    w = np.zeros_like(nodes)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return RadialGrid(nodes, w, "trapezoid", 2, float(nodes[0]), float(nodes[-1]))


# ------------------------------------------------------- sampled functions
@dataclass(frozen=True, eq=False)
class SampledRadialFunction:
    """Function values on a radial grid, optionally with a support interval."""

    grid: RadialGrid
    values: np.ndarray
    support_hint: Optional[tuple] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.nodes.shape:
            raise DomainError("values must match the grid")
        if not np.all(np.isfinite(v)):
            raise DomainError("sampled values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if self.support_hint is not None:
            a, b = self.support_hint
            outside = (self.grid.nodes < a) | (self.grid.nodes > b)
            peak = np.max(np.abs(v)) if v.size else 0.0
            if np.any(np.abs(v[outside]) > 1e-14 * peak):
                raise DomainError(f"values are not negligible outside the support hint [{a}, {b}]")

    @classmethod
    def from_callable(cls, grid, fn, support_hint=None):
        return cls(grid, np.asarray(fn(grid.nodes), dtype=float), support_hint)

    @property
    def nodes(self):
        return self.grid.nodes

    def scaled(self, factor):
        return SampledRadialFunction(self.grid, self.values * factor, self.support_hint)


@dataclass(frozen=True, eq=False)
class SpectralSamples:
    """Transform values on a half-line lambda grid (evenness implicit).

    ``weight_kind`` is ``"hankel-measure"``, ``"jacobi-plancherel"`` or
    ``"custom"``; ``params`` carries the Bessel order or JacobiParams.
    """

    grid: RadialGrid
    values: np.ndarray
    weight_kind: str
    params: object = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != self.grid.nodes.shape:
            raise DomainError("spectral values must match the lambda grid")
        if not np.all(np.isfinite(v)):
            raise DomainError("spectral values must be finite")
        if self.weight_kind not in ("hankel-measure", "jacobi-plancherel", "custom"):
            raise DomainError(f"unknown weight kind {self.weight_kind!r}")
        object.__setattr__(self, "values", v)

    @property
    def lambda_nodes(self):
        return self.grid.nodes

    def interpolate(self, lam):
        """Linear interpolation of the values at lam inside the window."""
        g = self.grid
        lam_a = np.asarray(lam, dtype=float)
        if np.any(lam_a < g.r_min) or np.any(lam_a > g.r_max):
            raise DomainError(f"lambda outside the spectral window [{g.r_min}, {g.r_max}]")
        out = np.interp(lam_a, g.nodes, self.values)
        return float(out) if out.ndim == 0 else out

    def with_values(self, values, **meta):
        return SpectralSamples(self.grid, values, self.weight_kind, self.params, {**self.meta, **meta})


def smooth_bump(lo, hi):
    """C-infinity bump exp(1 - q_max / q), q = (r - lo)(hi - r), on (lo, hi).

    Peak value 1 at the midpoint; zero outside (lo, hi).
    """
    if not hi > lo:
        raise DomainError("bump needs lo < hi")
    q_max = (0.5 * (hi - lo)) ** 2

    def bump(r):
        r = np.asarray(r, dtype=float)
        inside = (r > lo) & (r < hi)
        q = np.where(inside, (r - lo) * (hi - r), 1.0)
        return np.where(inside, np.exp(1.0 - q_max / q), 0.0)

    return bump


def integrate(f: SampledRadialFunction, extra_weight: Optional[Callable] = None):
    """Sum of quad_weight * value * extra_weight(node)."""
    vals = f.values if extra_weight is None else f.values * extra_weight(f.grid.nodes)
    return f.grid.integrate(vals)


# -------------------------------------------------------- Dormand-Prince
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


@dataclass(frozen=True, eq=False)
class OdeTrajectory:
    """Accepted steps of :func:`ode_solve_ivp`; ``y`` has one row per node."""

    r: np.ndarray
    y: np.ndarray
    n_steps: int
    n_rejected: int


def _dp_step(rhs, r, y, h):
    k = np.empty((7, y.shape[0]))
    k[0] = rhs(r, y)
    for i in range(1, 7):
        yi = y + h * np.dot(_DP_A[i], k[:i])
        k[i] = rhs(r + _DP_C[i] * h, yi)
    y5 = y + h * np.dot(_DP_B5, k)
    err = h * np.dot(_DP_B5 - _DP_B4, k)
    return y5, err


def ode_trajectory(rhs, r_span, y0, tol=1e-10, t_eval=None, h0=None, max_steps=10 ** 6):
    """Dormand-Prince 5(4) integration of y' = rhs(r, y).

    Steps are clipped to land exactly on every point of ``t_eval``.  The
    local error per step is kept below ``tol * max(1, |y|)``.
    """
    r0, r1 = map(float, r_span)
    y = np.atleast_1d(np.asarray(y0, dtype=float)).copy()
    stops = np.unique(np.concatenate([np.asarray(t_eval if t_eval is not None else [], float), [r1]]))
    stops = stops[(stops > r0) & (stops <= r1)]
    h = h0 if h0 else max(1e-6, 1e-3 * (r1 - r0))
    rs, ys = [r0], [y.copy()]
    r = r0
    steps = rejected = 0
    si = 0
    while si < stops.shape[0]:
        target = stops[si]
        if steps + rejected > max_steps:
            raise StepUnderflowError("maximum number of steps exceeded")
        hh = min(h, target - r)
        y_new, err = _dp_step(rhs, r, y, hh)
        scale = tol * np.maximum(1.0, np.maximum(np.abs(y), np.abs(y_new)))
        en = float(np.max(np.abs(err) / scale))
        if en <= 1.0 and np.all(np.isfinite(y_new)):
            r = target if hh == target - r else r + hh
            y = y_new
            rs.append(r)
            ys.append(y.copy())
            steps += 1
            if r >= target:
                si += 1
        else:
            rejected += 1
        fac = 0.9 * en ** -0.2 if en > 0 else 5.0
        h = hh * min(5.0, max(0.2, fac))
        if h < 1e-14 * max(1.0, abs(r)):
            raise StepUnderflowError(f"step size underflow at r={r}")
    return OdeTrajectory(np.array(rs), np.array(ys), steps, rejected)


def ode_solve_ivp(rhs, r_span, y0, tol=1e-10, t_eval=None):
    """Adaptive embedded Runge-Kutta solution, first component sampled.

    Returns a :class:`SampledRadialFunction` on the accepted (or requested)
    nodes with trapezoid weights.
    """
    traj = ode_trajectory(rhs, r_span, y0, tol, t_eval)
    if t_eval is None:
        return SampledRadialFunction(grid_from_nodes(traj.r), traj.y[:, 0])
    t_eval = np.asarray(t_eval, dtype=float)
    idx = np.searchsorted(traj.r, t_eval)
    return SampledRadialFunction(grid_from_nodes(t_eval), traj.y[idx, 0])


def jacobi_phi_ode(p: JacobiParams, lam, r_eval, tol=1e-12, r0=1e-4):
    """Jacobi function by direct integration of its defining equation.

    The equation is launched at ``r0`` from the two-term Taylor expansion to
    step over the coth singularity at the origin.  Independent of the
    series used by :func:`inghamlab.specfun.jacobi_phi`.
    """
    r_eval = np.atleast_1d(np.asarray(r_eval, dtype=float))
    if np.any(r_eval < 0):
        raise DomainError("r must be nonnegative")
    a1, a2 = 2 * p.alpha + 1, 2 * p.beta + 1
    ev = lam * lam + p.rho * p.rho

    def rhs(r, y):
        return np.array([y[1], -(a1 / math.tanh(r) + a2 * math.tanh(r)) * y[1] - ev * y[0]])

    k = ev / (2.0 * p.alpha + 2.0)
    y0 = [1.0 - 0.5 * k * r0 * r0, -k * r0]
    out = np.ones_like(r_eval)
    far = r_eval > r0
    if far.any():
        traj = ode_trajectory(rhs, (r0, r_eval.max()), y0, tol, r_eval[far])
        out[far] = traj.y[np.searchsorted(traj.r, r_eval[far]), 0]
    small = ~far
    out[small] = 1.0 - 0.5 * k * r_eval[small] ** 2
    return out


# ------------------------------------------------- finite differences
def fd_weights(x0, xs, deriv):
    """Fornberg finite-difference weights at x0 from arbitrary nodes xs."""
    xs = np.asarray(xs, dtype=float)
    n = xs.shape[0]
    c = np.zeros((n, deriv + 1))
    c1, c4 = 1.0, xs[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, deriv)
        c2 = 1.0
        c5 = c4
        c4 = xs[i] - x0
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, deriv]


def _derivatives(x, f, width=7):
    n = x.shape[0]
    half = width // 2
    d1 = np.empty(n)
    d2 = np.empty(n)
    for i in range(n):
        lo = min(max(0, i - half), n - width)
        sl = slice(lo, lo + width)
        d1[i] = fd_weights(x[i], x[sl], 1) @ f[sl]
        d2[i] = fd_weights(x[i], x[sl], 2) @ f[sl]
    return d1, d2


@dataclass(frozen=True)
class RadialOperator:
    """Second-order radial operator u'' + A(r) u' + B(r) u.

    ``kind`` is ``bessel``, ``jacobi`` or ``dunkl-component``; ``shift`` is
    the spectral offset such that eigenvalues read -(lambda^2 + shift^2).
    """

    kind: str
    order: float
    shift: float = 0.0
    params: object = None
    m: int = 0

    def coefficients(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.kind == "jacobi":
                p = self.params
                a = (2 * p.alpha + 1) / np.tanh(r) + (2 * p.beta + 1) * np.tanh(r)
                return a, np.zeros_like(r)
            a = (2 * self.order + 1) / r
            b = -self.m * (self.m + 2 * self.order) / r ** 2 - self.shift ** 2
            return a, b


def bessel_op(alpha, a=0.0):
    """Delta_{alpha, a} = r^{-(2a+1)} d/dr r^{2a+1} d/dr - a^2."""
    return RadialOperator("bessel", float(alpha), float(a))


def jacobi_op(p: JacobiParams):
    """Jacobi operator with first-order coefficient (2a+1)coth r + (2b+1)tanh r."""
    return RadialOperator("jacobi", p.alpha, p.rho, p)


def dunkl_component_op(lam_kappa, m):
    """Radial part of the Dunkl Laplacian on degree-m h-harmonic components."""
    return RadialOperator("dunkl-component", float(lam_kappa), 0.0, None, int(m))


def _reference_eigenfunction(op, x):
    # lam chosen so the eigenfunction oscillates at a rate the grid should resolve
    lam = 1.0
    if op.kind == "jacobi":
        return jacobi_phi(op.params, lam, x), -(lam * lam + op.shift ** 2)
    psi = bessel_psi(op.order + op.m, lam * x)
    return x ** op.m * psi, -(lam * lam + op.shift ** 2)


def apply_operator_fd(f: SampledRadialFunction, op: RadialOperator, check=True):
    """Apply a radial operator by 7-point finite differences on f's nodes.

    Stencils are centred in the interior and one-sided at the ends (order
    about 5 for the second derivative on smooth data).  At r = 0 the
    removable singularity is replaced by its limit (2 order + 2) u''(0).
    Emits GridWarning when the same stencils fail to reproduce a reference
    eigenfunction to 1e-4.
    """
    x = f.grid.nodes
    if x.shape[0] < 7:
        raise DomainError("finite differences need at least 7 nodes")
    d1, d2 = _derivatives(x, f.values)
    at0 = x == 0.0
    a, b = op.coefficients(np.where(at0, 1.0, x))
    out = d2 + a * d1 + b * f.values
    if at0.any():
        if op.kind == "dunkl-component" and op.m > 0:
            out[at0] = 0.0
        else:
            zeroth = 0.0 if op.kind == "jacobi" else -op.shift ** 2
            out[at0] = (2 * op.order + 2) * d2[at0] + zeroth * f.values[at0]
    if check:
        ref, ev = _reference_eigenfunction(op, x)
        res = eigen_residual(SampledRadialFunction(f.grid, ref), op, ev, check=False)
        if res > 1e-4:
            warnings.warn(f"grid too coarse for finite differences (reference residual {res:.1e})",
                          GridWarning, stacklevel=2)
    return SampledRadialFunction(f.grid, out, None)


def eigen_residual(f: SampledRadialFunction, op: RadialOperator, eigenvalue, check=True):
    """max |L f - eigenvalue f| / max |eigenvalue f| over the nodes."""
    lf = apply_operator_fd(f, op, check=check).values
    scale = np.max(np.abs(eigenvalue * f.values))
    if scale == 0.0:
        return float(np.max(np.abs(lf)))
    return float(np.max(np.abs(lf - eigenvalue * f.values)) / scale)
