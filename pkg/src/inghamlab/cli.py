"""Command-line experiment runner.

``inghamlab list`` names the pipelines; ``inghamlab <pipeline> [flags]``
runs one; ``inghamlab run --config FILE`` takes the pipeline and its
parameters from an INI file (command-line flags override the file).
Outputs go to ``<outdir>/<pipeline>/<name>.csv`` plus ``report.txt``.

Exit codes: 0 success, 2 configuration or parse error, 3 numerical or
domain error raised by a module, 4 I/O error.
"""
from __future__ import annotations

import argparse
import configparser
import os
import sys
import time
import warnings
from dataclasses import replace
from pathlib import Path
from types import SimpleNamespace

import numpy as np

from . import __version__
from .errors import ConfigError, InghamError, NumericsWarning

PIPELINES = (
    "roundtrip", "plancherel", "eigencheck", "project", "spherical-mean",
    "ingham-construct", "pw-transfer", "carleman", "audit-thm11", "audit-thm13",
    "sharpness-witness",
)

DESCRIPTIONS = {
    "roundtrip": "forward + inverse transform of a test profile; L2 round-trip error",
    "plancherel": "both sides of the Plancherel identity for a test profile",
    "eigencheck": "finite-difference eigenfunction residuals of the radial kernels",
    "project": "spectral projections P_lam f on a symmetric space with FD eigenchecks",
    "spherical-mean": "spherical mean profile F_x and its transform consistency",
    "ingham-construct": "box-product function with prescribed transform decay",
    "pw-transfer": "Paley-Wiener transfer of the box product to Hankel orders",
    "carleman": "Carleman diagnostics of operator-power norms under a decay envelope",
    "audit-thm11": "decay-versus-vanishing audit on a rank-one symmetric space",
    "audit-thm13": "decay-versus-vanishing audit on the Dunkl side",
    "sharpness-witness": "convergent-side witness: projections obeying the decay bound",
}


def _floats(text):
    return [float(v) for v in str(text).replace(";", ",").split(",") if v.strip()]


def _ints(text):
    return [int(v) for v in str(text).replace(";", ",").split(",") if v.strip()]


# flag, type, help; every pipeline accepts every flag and ignores the unused
OPTIONS = (
    ("--outdir", str, "output root directory (default: inghamlab-out)"),
    ("--threads", int, "thread count for the compiled kernels (also INGHAMLAB_THREADS)"),
    ("--pair", str, "transform pair: jacobi or hankel"),
    ("--alpha", float, "Jacobi alpha, or the Hankel order"),
    ("--beta", float, "Jacobi beta"),
    ("--m-gamma", int, "root multiplicity m_gamma of the symmetric space"),
    ("--m-2gamma", int, "root multiplicity m_2gamma of the symmetric space"),
    ("--n", int, "Dunkl dimension"),
    ("--kappa", str, "Dunkl multiplicities on the coordinate roots, comma separated"),
    ("--degrees", str, "Dunkl component degrees for audit-thm13, comma separated"),
    ("--theta", str, "built-in theta: inv-sqrt, inv-log, log-log, zero"),
    ("--theta-table", str, "CSV file with columns t, theta (overrides --theta)"),
    ("--theta-scale", float, "multiplier applied to the built-in theta"),
    ("--N", int, "number of boxes in the construction"),
    ("--support-budget", float, "support budget of the box construction"),
    ("--profile", str, "test profile: gaussian or bump"),
    ("--bump-lo", float, "left end of the bump support"),
    ("--bump-hi", float, "right end of the bump support"),
    ("--r-max", float, "radial grid extent"),
    ("--panels", int, "Gauss-Legendre panels of the radial grid"),
    ("--order", int, "nodes per Gauss-Legendre panel"),
    ("--lam-min", float, "lower end of the spectral window"),
    ("--lam-max", float, "upper end of the spectral window"),
    ("--lams", str, "spectral parameters for eigencheck / project, comma separated"),
    ("--x", float, "sample radius for spherical means"),
    ("--vanish-radius", float, "radius l such that f vanishes on [0, l)"),
    ("--shift", float, "spectral offset of the operator (default: the pair's natural shift)"),
    ("--m-max", int, "largest power m tracked in Carleman partial sums"),
    ("--orders", str, "Hankel orders for pw-transfer, comma separated"),
)
_TYPES = {flag[2:].replace("-", "_"): typ for flag, typ, _ in OPTIONS}
_TYPES["pipeline"] = str

COMMON_DEFAULTS = {
    "outdir": "inghamlab-out", "threads": None, "pair": "jacobi", "alpha": 0.5, "beta": -0.5,
    "m_gamma": 2, "m_2gamma": 0, "n": 3, "kappa": "", "degrees": "0", "theta": "inv-log",
    "theta_table": None, "theta_scale": 1.0, "N": 64, "support_budget": 1.0, "profile": None,
    "bump_lo": 1.0, "bump_hi": 2.0, "r_max": None, "panels": None, "order": 10, "lam_min": 0.5,
    "lam_max": None, "lams": "0.5,1,2,5", "x": 0.5, "vanish_radius": 1.0, "shift": None,
    "m_max": 40, "orders": "0.5,1.5",
}
PIPELINE_DEFAULTS = {
    "ingham-construct": {"theta": "inv-sqrt"},
    "pw-transfer": {"theta": "inv-sqrt"},
    "sharpness-witness": {"theta": "inv-sqrt", "lam_min": 1.0},
}


# ------------------------------------------------------------------ parsing
def build_parser():
    parser = argparse.ArgumentParser(
        prog="inghamlab",
        description="Decay-versus-support experiments for Jacobi, Hankel and Dunkl transforms.",
        epilog="exit codes: 0 ok, 2 configuration error, 3 numerical/domain error, 4 I/O error",
    )
    parser.add_argument("--version", action="version", version=f"inghamlab {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.add_parser("list", help="list the pipelines")
    run = sub.add_parser("run", help="run the pipeline named in a config file")
    run.add_argument("pipeline", nargs="?", help="pipeline name (overrides the config)")
    _add_options(run)
    for name in PIPELINES:
        p = sub.add_parser(name, help=DESCRIPTIONS[name], description=DESCRIPTIONS[name])
        _add_options(p)
    return parser


def _add_options(p):
    p.add_argument("--config", help="INI file with key = value settings (section names are free)")
    for flag, typ, text in OPTIONS:
        p.add_argument(flag, type=typ, default=None, help=text,
                       dest=flag[2:].replace("-", "_"))


def read_config(path):
    """Flatten an INI file into a dict of typed values."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser()
    cp.optionxform = str  # N (boxes) and n (dimension) differ only by case
    try:
        with open(path) as fh:
            cp.read_string("[__top__]\n" + fh.read(), source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    out = {}
    for section in cp.sections():
        for key, raw in cp.items(section):
            k = key.strip().replace("-", "_")
            if k == "n_boxes":
                k = "N"
            if k not in _TYPES:
                raise ConfigError(f"{path}: unknown key '{key}' in [{section}]")
            try:
                out[k] = _TYPES[k](raw)
            except ValueError:
                raise ConfigError(f"{path}: bad value for '{key}': {raw!r}") from None
    return out


def resolve(pipeline, cli_values: dict, config: dict | None = None):
    """Merge defaults < config file < command line into an option namespace."""
    if pipeline not in PIPELINES:
        raise ConfigError(f"unknown pipeline '{pipeline}'; choose from: {', '.join(PIPELINES)}")
    vals = dict(COMMON_DEFAULTS)
    vals.update(PIPELINE_DEFAULTS.get(pipeline, {}))
    for src in (config or {}, cli_values):
        vals.update({k: v for k, v in src.items() if v is not None and k in COMMON_DEFAULTS})
    if vals["theta_table"] and not Path(vals["theta_table"]).is_file():
        raise ConfigError(f"theta table not found: {vals['theta_table']}")
    if vals["pair"] not in ("jacobi", "hankel"):
        raise ConfigError(f"--pair must be jacobi or hankel, got {vals['pair']!r}")
    try:
        vals["kappa_list"] = _floats(vals["kappa"])
        vals["degree_list"] = _ints(vals["degrees"])
        vals["lam_list"] = _floats(vals["lams"])
        vals["order_list"] = _floats(vals["orders"])
    except ValueError as exc:
        raise ConfigError(f"malformed list option: {exc}") from None
    return SimpleNamespace(pipeline=pipeline, **vals)


# ---------------------------------------------------------------- helpers
def _theta(opt):
    from .ingham import builtin_theta, load_theta_table

    if opt.theta_table:
        return load_theta_table(opt.theta_table)
    return builtin_theta(opt.theta, opt.theta_scale)


def _space(opt):
    from .symmetric_space import space_from_multiplicities

    return space_from_multiplicities(opt.m_gamma, opt.m_2gamma)


def _setting(opt):
    from .dunkl import make_setting

    return make_setting(opt.n, "Z2^d", opt.kappa_list)


def _bump_profile(lo, hi, panels=None, order=10):
    from .numerics import SampledRadialFunction, make_grid, smooth_bump

    g = make_grid(hi, panels or max(20, int(100 * (hi - lo))), order, r_min=lo)
    return SampledRadialFunction.from_callable(g, smooth_bump(lo, hi), (lo, hi))


def _test_profile(opt, pair):
    from .numerics import SampledRadialFunction, make_grid

    kind = opt.profile or ("gaussian" if pair.kind == "hankel" else "bump")
    if kind == "gaussian":
        g = make_grid(opt.r_max or 12.0, opt.panels or 150, opt.order, refine_origin=40)
        return SampledRadialFunction.from_callable(g, lambda r: np.exp(-0.5 * r * r)), kind
    if kind == "bump":
        return _bump_profile(opt.bump_lo, opt.bump_hi, opt.panels, opt.order), kind
    raise ConfigError(f"--profile must be gaussian or bump, got {kind!r}")


def _pair(opt):
    from .specfun import JacobiParams
    from .transforms import hankel, jacobi

    return hankel(opt.alpha) if opt.pair == "hankel" else jacobi(JacobiParams(opt.alpha, opt.beta))


def _carleman_columns(cv, log_norms, m_track):
    m = np.asarray(cv.m)
    partial = np.full(m.size, np.nan)
    ps = np.asarray(cv.partial_sums)[:m_track]
    partial[: ps.size] = ps
    return {"m": m, "log_norm": np.asarray(log_norms), "term": np.asarray(cv.terms),
            "partial_sum": partial}


# -------------------------------------------------------------- pipelines
def p_roundtrip(opt):
    from .transforms import lambda_grid, plancherel_check

    pair = _pair(opt)
    f, kind = _test_profile(opt, pair)
    lam_max = opt.lam_max or (12.0 if pair.kind == "hankel" else 200.0)
    rep = plancherel_check(f, pair, lambda_grid(lam_max))
    rec = {"pair": pair.kind, "alpha": pair.alpha, "beta": opt.beta if pair.kind == "jacobi" else "",
           "profile": kind, "n_radial": len(f.grid), **rep.as_record()}
    csvs = {"roundtrip": {"r": f.grid.nodes, "f": f.values, "roundtrip": rep.roundtrip.values},
            "spectrum": {"lambda": rep.forward.grid.nodes, "transform": rep.forward.values}}
    return rec, csvs


def p_plancherel(opt):
    from .transforms import lambda_grid, plancherel_check

    pair = _pair(opt)
    f, kind = _test_profile(opt, pair)
    lam_max = opt.lam_max or (12.0 if pair.kind == "hankel" else 200.0)
    rep = plancherel_check(f, pair, lambda_grid(lam_max))
    lam = rep.forward.grid.nodes
    dens = np.abs(rep.forward.values) ** 2 * pair.spectral_density(lam)
    rec = {"pair": pair.kind, "alpha": pair.alpha, "profile": kind, **rep.as_record()}
    csvs = {"plancherel": {"lambda": lam, "spectral_density": dens,
                           "cumulative": np.cumsum(rep.forward.grid.quad_weights * dens)}}
    return rec, csvs


def p_eigencheck(opt):
    from .numerics import SampledRadialFunction, bessel_op, eigen_residual, jacobi_op, make_uniform_grid
    from .specfun import bessel_psi, jacobi_phi

    pair = _pair(opt)
    grid = make_uniform_grid(opt.r_max or 4.0, 801)
    rows = []
    for lam in opt.lam_list:
        if pair.kind == "jacobi":
            v = jacobi_phi(pair.params, lam, grid.nodes)
            res = eigen_residual(SampledRadialFunction(grid, v), jacobi_op(pair.params),
                                 -(lam * lam + pair.params.rho ** 2))
        else:
            v = bessel_psi(pair.alpha, lam * grid.nodes)
            res = eigen_residual(SampledRadialFunction(grid, v), bessel_op(pair.alpha), -lam * lam)
        rows.append(res)
    rec = {"pair": pair.kind, "alpha": pair.alpha, "max_residual": max(rows), "tolerance": 1e-4,
           "pass": max(rows) <= 1e-4}
    return rec, {"eigencheck": {"lambda": opt.lam_list, "residual": rows}}


def p_project(opt):
    from .numerics import make_uniform_grid
    from .symmetric_space import project, spherical_transform
    from .transforms import lambda_grid

    space = _space(opt)
    f = _bump_profile(opt.bump_lo, opt.bump_hi)
    ft = spherical_transform(space, f, lambda_grid(opt.lam_max or 50.0))
    grid = make_uniform_grid(opt.r_max or 4.0, 801)
    lam_c, r_c, v_c, res = [], [], [], []
    for lam in opt.lam_list:
        P = project(space, ft, lam, grid)
        lam_c.append(np.full(len(grid), lam))
        r_c.append(grid.nodes)
        v_c.append(P.profile.values)
        res.append(P.eigen_residual())
    rec = {"space": f"({space.m_gamma},{space.m_2gamma})", "rho": space.rho,
           "max_residual": max(res), "pass": max(res) <= 1e-4}
    csvs = {"projections": {"lambda": np.concatenate(lam_c), "r": np.concatenate(r_c),
                            "value": np.concatenate(v_c)},
            "residuals": {"lambda": opt.lam_list, "eigenvalue": [-(l * l + space.rho ** 2) for l in opt.lam_list],
                          "residual": res}}
    return rec, csvs


def p_spherical_mean(opt):
    from .numerics import make_grid
    from .symmetric_space import spherical_fn, spherical_mean_profile, spherical_transform
    from .transforms import jacobi_forward, lambda_grid

    space = _space(opt)
    f = _bump_profile(opt.bump_lo, opt.bump_hi)
    ft = spherical_transform(space, f, lambda_grid(opt.lam_max or 200.0))
    r_hi = opt.r_max or (opt.bump_hi + opt.x + 1.0)
    Fx = spherical_mean_profile(space, ft, opt.x, make_grid(r_hi, opt.panels or 100, opt.order))
    sel = (ft.grid.nodes >= opt.lam_min) & (ft.grid.nodes <= 20.0)
    lam = ft.grid.nodes[sel]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NumericsWarning)
        lhs = jacobi_forward(Fx, space.params, lam).values
    rhs = ft.values[sel] * spherical_fn(space, lam, np.full(lam.shape, opt.x))
    rel = float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs)))
    rec = {"space": f"({space.m_gamma},{space.m_2gamma})", "x": opt.x, "consistency_rel_error": rel,
           "pass": rel <= 1e-3}
    csvs = {"spherical_mean": {"r": Fx.grid.nodes, "F_x": Fx.values},
            "consistency": {"lambda": lam, "transform_of_mean": lhs, "f_tilde_phi_x": rhs}}
    return rec, csvs


def p_ingham_construct(opt):
    from .ingham import classify_theta, construct_box_product, decay_envelope, measured_support

    theta = _theta(opt)
    cls = classify_theta(theta)
    box, prof = construct_box_product(theta, opt.N, opt.support_budget)
    env = decay_envelope(box, theta, 1.0, opt.lam_max or 1e3, n=2001)
    rec = {"theta": theta.name, "classification": cls.verdict, "N": opt.N,
           "total_support": box.total_support, "measured_support": measured_support(prof),
           "grid_step": prof.grid.nodes[1] - prof.grid.nodes[0], "calibration": box.calibration,
           "C_measured": env.C_measured, "C_certified": env.C_certified}
    csvs = {"boxes": {"k": np.arange(1, box.lengths.size + 1), "a_k": box.lengths},
            "profile": {"x": prof.grid.nodes, "f": prof.values},
            "envelope": {"xi": env.xi, "abs_fhat": env.abs_fhat, "envelope": env.envelope},
            "classification": {"u_lo": cls.block_edges_u[:-1], "u_hi": cls.block_edges_u[1:],
                               "increment": cls.increments, "partial": cls.partial}}
    return rec, csvs


def p_pw_transfer(opt):
    from .ingham import construct_box_product, transfer_via_paley_wiener
    from .numerics import SpectralSamples
    from .transforms import hankel_forward, lambda_grid

    theta = _theta(opt)
    box, _ = construct_box_product(theta, opt.N, opt.support_budget)
    S = box.total_support
    lg = lambda_grid(opt.lam_max or 400.0)
    fh = SpectralSamples(lg, box.transform(lg.nodes), "custom", None, {"support": S})
    rec = {"theta": theta.name, "N": opt.N, "total_support": S}
    csvs = {}
    check = np.linspace(0.0, 50.0, 101)
    for a in opt.order_list:
        g, rep = transfer_via_paley_wiener(fh, a, nominal_support=S)
        back = hankel_forward(g, a, check).values
        ref = box.transform(check)
        tag = f"{a:g}"
        rec[f"tail_mass_1.5S_order_{tag}"] = rep.tail_beyond(1.5 * S)
        rec[f"r_9999_order_{tag}"] = rep.r_9999
        rec[f"roundtrip_rel_order_{tag}"] = float(np.max(np.abs(back - ref)) / np.max(np.abs(ref)))
        csvs[f"transfer_order_{tag}"] = {"r": g.grid.nodes, "g": g.values, "tail_mass": rep.tail}
    rec["pass"] = all(v <= 1e-6 for k, v in rec.items() if k.startswith("tail_mass"))
    return rec, csvs


def p_carleman(opt):
    from .ingham import carleman_verdict, classify_theta, envelope_log_norms
    from .symmetric_space import carleman_m_values

    theta = _theta(opt)
    pair = _pair(opt)
    shift = pair.natural_shift if opt.shift is None else opt.shift
    m = carleman_m_values(opt.m_max)
    ln = envelope_log_norms(theta, pair, shift, m)
    cv = carleman_verdict(ln, m_values=m, log_norms=True)
    ps = np.asarray(cv.partial_sums)[: opt.m_max]
    rec = {"theta": theta.name, "classification": classify_theta(theta).verdict, "pair": pair.kind,
           "alpha": pair.alpha, "shift": shift, "verdict": cv.verdict, "p": cv.p, "q": cv.q,
           "reason": cv.reason, f"partial_sum_m{opt.m_max}": float(ps[-1]),
           "shift_robust": cv.shift_robust}
    return rec, {"carleman": _carleman_columns(cv, ln, opt.m_max)}


def _audit_csvs(rep, label):
    nx, nl = rep.projection.shape
    lam_cols = {
        "x": np.repeat(rep.x_samples, nl), "lambda": np.tile(rep.lam, nx),
        "transform": np.tile(rep.transform, nx), label: np.ravel(rep.kernel_at_x),
        "projection": np.ravel(rep.projection), "d": np.ravel(rep.d), "C": np.ravel(rep.C),
    }
    return {"lambda": lam_cols, "carleman": _carleman_columns(rep.carleman, rep.log_norms, rep.m_track)}


def p_audit_thm11(opt):
    from .symmetric_space import spherical_transform, uncertainty_audit_thm11
    from .transforms import lambda_grid

    space = _space(opt)
    theta = _theta(opt)
    l = opt.vanish_radius
    f = _bump_profile(l, l + 1.0)
    lam_max = opt.lam_max or 200.0
    ft = spherical_transform(space, f, lambda_grid(lam_max))
    rep = uncertainty_audit_thm11(space, f, theta, (opt.lam_min, lam_max), vanish_radius=l, f_tilde=ft,
                                  m_values=_m_values(opt))
    rep = replace(rep, m_track=opt.m_max)
    return rep.summary(), _audit_csvs(rep, "phi_x")


def _m_values(opt):
    from .symmetric_space import carleman_m_values

    return carleman_m_values(opt.m_max)


def p_audit_thm13(opt):
    from .dunkl import HarmonicComponent, builtin_harmonics, component_transform, uncertainty_audit_thm13
    from .numerics import SampledRadialFunction
    from .transforms import lambda_grid

    setting = _setting(opt)
    theta = _theta(opt)
    l = opt.vanish_radius
    base = _bump_profile(l, l + 1.0)
    lam_max = opt.lam_max or 200.0
    lg = lambda_grid(lam_max)
    comps = []
    for m in opt.degree_list:
        if m > 2:
            raise ConfigError("built-in h-harmonics cover degrees 0-2")
        S = builtin_harmonics(setting, m)[0]
        prof = SampledRadialFunction(base.grid, base.values * base.grid.nodes ** m, base.support_hint)
        comps.append(component_transform(setting, HarmonicComponent(m, S.label, prof, S), lg))
    shift = 1.0 if opt.shift is None else opt.shift
    rep = uncertainty_audit_thm13(setting, comps, theta, (opt.lam_min, lam_max), l, shift=shift,
                                  m_values=_m_values(opt))
    rep = replace(rep, m_track=opt.m_max)
    csvs = _audit_csvs(rep, "kernel_at_x")
    csvs["components"] = {
        "m": np.concatenate([np.full(len(tc.component.radial_profile.grid), tc.degree) for tc in comps]),
        "harmonic_id": np.concatenate([np.full(len(tc.component.radial_profile.grid), tc.component.harmonic_id)
                                       for tc in comps]),
        "node": np.concatenate([tc.component.radial_profile.grid.nodes for tc in comps]),
        "value": np.concatenate([tc.component.radial_profile.values for tc in comps]),
    }
    return rep.summary(), csvs


def p_sharpness_witness(opt):
    from .dunkl import dunkl_sharpness_witness
    from .symmetric_space import sharpness_witness

    theta = _theta(opt)
    space = _space(opt)
    setting = _setting(opt)
    lam_max = opt.lam_max or 400.0
    window = (opt.lam_min, lam_max)
    wj = sharpness_witness(space, theta, opt.N, opt.support_budget, lam_max, window)
    wd = dunkl_sharpness_witness(setting, theta, opt.N, opt.support_budget, lam_max, window)
    env = wj.envelope
    rec = {"theta": theta.name, "N": opt.N, "total_support": wj.box.total_support,
           "C_measured": env.C_measured, "C_certified": env.C_certified,
           "space": f"({space.m_gamma},{space.m_2gamma})", "jacobi_tail_mass_1.5S": wj.tail_mass,
           "C_projection_jacobi": wj.C_projection, "lambda_kappa": setting.lambda_kappa,
           "dunkl_tail_mass_1.5S": wd.tail_mass, "C_projection_dunkl": wd.C_projection,
           "finite_constants": bool(np.isfinite([env.C_measured, wj.C_projection, wd.C_projection]).all())}

    def proj_cols(w):
        nx, nl = w.projection.shape
        return {"x": np.repeat(w.x_samples, nl), "lambda": np.tile(w.lam, nx),
                "projection": np.ravel(w.projection),
                "bound": np.tile(np.exp(-w.lam * theta(w.lam)), nx) * w.C_projection}

    csvs = {"envelope": {"xi": env.xi, "abs_fhat": env.abs_fhat, "envelope": env.envelope},
            "projections_jacobi": proj_cols(wj), "projections_dunkl": proj_cols(wd)}
    return rec, csvs


RUNNERS = {
    "roundtrip": p_roundtrip, "plancherel": p_plancherel, "eigencheck": p_eigencheck,
    "project": p_project, "spherical-mean": p_spherical_mean, "ingham-construct": p_ingham_construct,
    "pw-transfer": p_pw_transfer, "carleman": p_carleman, "audit-thm11": p_audit_thm11,
    "audit-thm13": p_audit_thm13, "sharpness-witness": p_sharpness_witness,
}


# ------------------------------------------------------------------ driver
def list_pipelines():
    width = max(map(len, PIPELINES))
    return "\n".join(f"{name:<{width}}  {DESCRIPTIONS[name]}" for name in PIPELINES)


def run(opt):
    """Run a resolved configuration and write its artifacts; returns the output directory."""
    from . import io

    if opt.threads:
        os.environ["INGHAMLAB_THREADS"] = str(opt.threads)
        from ._backend import apply_thread_limit

        apply_thread_limit()
    t0 = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NumericsWarning)
        record, csvs = RUNNERS[opt.pipeline](opt)
    out = Path(opt.outdir) / opt.pipeline
    stamp = f"pipeline={opt.pipeline}"
    for name, cols in csvs.items():
        io.write_csv(out / f"{name}.csv", cols, stamp)
    msgs = sorted({f"{w.category.__name__}: {w.message}" for w in caught
                   if issubclass(w.category, NumericsWarning)})
    full = {"pipeline": opt.pipeline, **record, "warnings": len(msgs),
            "runtime_s": round(time.perf_counter() - t0, 3)}
    for i, m in enumerate(msgs):
        full[f"warning_{i + 1}"] = m
    io.write_report(out / "report.txt", full, stamp)
    return out, full


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse: 0 for --help, 2 for usage errors
        return int(exc.code or 0)
    if args.command in (None, "list"):
        print(list_pipelines())
        return 0
    try:
        cli_values = {k: v for k, v in vars(args).items() if k not in ("command", "config", "pipeline")}
        config = read_config(args.config) if args.config else {}
        if args.command == "run":
            pipeline = args.pipeline or config.get("pipeline")
            if not pipeline:
                raise ConfigError("run needs a pipeline name (argument or 'pipeline' key)")
        else:
            pipeline = args.command
        opt = resolve(pipeline, cli_values, config)
        out, record = run(opt)
    except ConfigError as exc:
        print(f"inghamlab: configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"inghamlab: I/O error: {exc}", file=sys.stderr)
        return 4
    except (InghamError, ValueError, ArithmeticError) as exc:
        print(f"inghamlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    print(f"{pipeline}: wrote {out}")
    for k, v in record.items():
        if not k.startswith("warning_"):
            print(f"  {k} = {v}")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
