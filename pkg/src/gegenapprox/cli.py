"""Command-line experiment driver.

Subcommands: expand, convergence, bounds, indexset, selftest.  Every CSV
starts with '#'-prefixed lines echoing the resolved configuration, so a
file describes how it was produced.  Exit codes: 0 success, 2 config
error, 3 resource-cap error, 4 numerical failure.
"""

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import bounds as bd
from .functions import builtin_function
from .indexsets import ResourceCapError, enumerate_set, parse_q
from .oracles import ToleranceNotReached
from .polycore import DomainError
from .transform import (GridSpec, compute_coefficients, default_normalization, fit_slope,
                        sup_error)

EXIT_OK, EXIT_CONFIG, EXIT_RESOURCE, EXIT_NUMERIC = 0, 2, 3, 4

DEFAULTS = {
    "function": "f1",
    "lambda": 0.5,
    "q": "2",
    "N": 20.0,
    "N_range": "8:40:4",
    "dim": 2,
    "quad_order": None,
    "epsilon": None,
    "shrink": bd.DEFAULT_SHRINK,
    "normalized": False,
    "assumption": 2,
    "rho": None,
    "grid_points": 501,
    "samples": 100_000,
    "seed": 0x5EED,
    "out": None,
}


class ConfigError(ValueError):
    pass


# --- config ------------------------------------------------------------------

def parse_n_range(spec):
    """'8:40:4' (inclusive) or '8,12,20' -> ascending list of N."""
    spec = str(spec).strip()
    if ":" in spec:
        parts = [float(p) for p in spec.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ConfigError(f"N-range must be start:stop:step, got {spec!r}")
        start, stop, step = parts
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        vals = [start + i * step for i in range(count)]
    else:
        vals = [float(p) for p in spec.split(",") if p.strip()]
    if not vals or any(b <= a for a, b in zip(vals, vals[1:])):
        raise ConfigError(f"N-range must be non-empty and ascending, got {spec!r}")
    return vals


def resolve_config(args):
    """Defaults, then the JSON config file, then explicit flags."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None and val is not False:
            cfg[key] = val
    try:
        cfg["lambda"] = float(cfg["lambda"])
        cfg["q"] = str(cfg["q"])
        parse_q(cfg["q"])
        cfg["dim"] = int(cfg["dim"])
        cfg["N"] = float(cfg["N"])
        cfg["seed"] = int(cfg["seed"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if cfg["lambda"] < 0:
        raise ConfigError("lambda must be >= 0")
    return cfg


def make_function(cfg):
    try:
        return builtin_function(cfg["function"], d=cfg["dim"])
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from exc


def normalization_for(cfg):
    lam = cfg["lambda"]
    if cfg["normalized"]:
        if lam != 0.5:
            raise ConfigError("--normalized applies to lambda = 1/2 only")
        return "legendre_normalized"
    return default_normalization(lam)


def grid_for(cfg):
    return GridSpec(points=int(cfg["grid_points"]), samples=int(cfg["samples"]), seed=cfg["seed"])


def header_lines(command, cfg, extra=None):
    lines = [f"command: {command}",
             "config: " + json.dumps(cfg, sort_keys=True, default=str)]
    for key, val in (extra or {}).items():
        lines.append(f"{key}: {val}")
    return lines


def _fmt(x):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return repr(float(x))


def write_rows(header, columns, rows):
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def emit(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    folder = os.path.dirname(path)
    if folder:
        os.makedirs(folder, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


# --- experiments -------------------------------------------------------------

def convergence_rows(f, lam, q, Ns, normalization=None, grid=None, quad_order=None,
                     shrink=bd.DEFAULT_SHRINK, epsilon=None):
    """(N, |Lambda|, sup error, Theorem 4.1 bound or nan) for each N."""
    d = f.dimension
    ctx = None
    if f.singular_h2 is not None:
        ctx = bd.working_context(f, lam, shrink=shrink, epsilon=epsilon)
    rows = []
    for N in Ns:
        iset = enumerate_set(q, N, d)
        tab = compute_coefficients(f, lam, iset, quad_order=quad_order, normalization=normalization)
        err = sup_error(f, tab, grid)
        pred = math.nan
        if ctx is not None:
            try:
                pred = bd.error_bound_thm41(ctx, lam, q, d, N, f=f).bound
            except DomainError:
                pred = math.nan
        rows.append((float(N), len(iset), err, pred))
    return rows


def convergence_slope(rows):
    """Least-squares slope of log10(error) against N."""
    Ns = [r[0] for r in rows]
    return fit_slope(Ns, np.log10([r[2] for r in rows]))


def loglog_slope(rows):
    Ns = [r[0] for r in rows]
    return fit_slope(np.log10(Ns), np.log10([r[2] for r in rows]))


def bound_for(kind, ctx, lam, k, f, normalized):
    if kind == "T":
        return bd.cheb_T_bound_a2(ctx, k, f=f) if ctx.mode == "region_Dh" else bd.cheb_T_bound_a1(ctx, k, f=f)
    if kind == "U":
        return bd.cheb_U_bound_a2(ctx, k, f=f) if ctx.mode == "region_Dh" else bd.cheb_U_bound_a1(ctx, k, f=f)
    if kind == "legendre":
        return bd.legendre_bounds(ctx, k, normalized=normalized, f=f)
    if ctx.mode == "region_Dh":
        return bd.coeff_bound_a2(ctx, lam, k, f=f)
    return bd.coeff_bound_a1(ctx, lam, k, f=f)


def bound_kind(lam):
    if lam == 0:
        return "T"
    if lam == 1:
        return "U"
    if lam == 0.5:
        return "legendre"
    return "gegenbauer"


def polyellipse_for(f, shrink=bd.DEFAULT_SHRINK):
    """Equal radii rho_j with d h_j^2 = (shrink h_max)^2, inside the singular set."""
    if f.singular_h2 is None:
        raise ConfigError(f"{f.name}: supply --rho for the polyellipse bound")
    hj = shrink * math.sqrt(f.singular_h2 / f.dimension)
    return bd.polyellipse_context((bd.rho_from_h(hj),) * f.dimension)


def bounds_rows(f, lam, iset, normalized=False, assumption=2, rho=None, shrink=bd.DEFAULT_SHRINK,
                epsilon=None, quad_order=None):
    """(k, measured |a_k|, bound, bound/|a_k|) for every k of the set."""
    normalization = "legendre_normalized" if normalized else None
    tab = compute_coefficients(f, lam, iset, quad_order=quad_order, normalization=normalization)
    if assumption == 1:
        ctx = bd.polyellipse_context(rho) if rho else polyellipse_for(f, shrink)
    else:
        ctx = bd.working_context(f, lam, shrink=shrink, epsilon=epsilon)
    kind = bound_kind(lam)
    rows = []
    for k, a in zip(tab.keys.tolist(), tab.values):
        b = bound_for(kind, ctx, lam, tuple(k), f, normalized)
        meas = abs(float(a))
        rows.append((k, meas, b, b / meas if meas > 0 else math.inf))
    return ctx, kind, rows


# --- commands ----------------------------------------------------------------

def cmd_expand(cfg):
    f = make_function(cfg)
    lam = cfg["lambda"]
    iset = enumerate_set(cfg["q"], cfg["N"], cfg["dim"])
    tab = compute_coefficients(f, lam, iset, quad_order=cfg["quad_order"],
                               normalization=normalization_for(cfg))
    header = header_lines("expand", cfg, {"normalization": tab.normalization,
                                          "quad_order": tab.meta["quad_order"],
                                          "terms": len(tab)})
    text = tab.to_csv(header)
    emit(text, cfg["out"])
    if cfg["out"] and cfg["dim"] == 2:
        emit(contour_script(os.path.basename(cfg["out"])), cfg["out"] + ".plot.py")
    return text


def contour_script(csv_name):
    """Companion plotting script; it is written out, never imported here."""
    return f'''# Contours of log10|a_k| at levels -1..-16 for {csv_name}
import numpy as np
import matplotlib.pyplot as plt

data = np.genfromtxt("{csv_name}", delimiter=",", comments="#", names=True)
k1, k2, lg = data["k_1"].astype(int), data["k_2"].astype(int), data["log10abs"]
grid = np.full((k1.max() + 1, k2.max() + 1), np.nan)
grid[k1, k2] = lg
plt.contour(np.arange(grid.shape[0]), np.arange(grid.shape[1]), grid.T, levels=np.arange(-16, 0))
plt.xlabel("k_1")
plt.ylabel("k_2")
plt.gca().set_aspect("equal")
plt.savefig("{csv_name}.png", dpi=150)
'''


def cmd_convergence(cfg):
    f = make_function(cfg)
    lam = cfg["lambda"]
    Ns = parse_n_range(cfg["N_range"])
    grid = grid_for(cfg)
    rows = convergence_rows(f, lam, cfg["q"], Ns, normalization=normalization_for(cfg), grid=grid,
                            quad_order=cfg["quad_order"], shrink=cfg["shrink"], epsilon=cfg["epsilon"])
    extra = {"grid": grid.describe(f.dimension),
             "gamma": bd.gamma_factor(cfg["q"], f.dimension)}
    if f.singular_h2 is not None:
        ctx = bd.working_context(f, lam, shrink=cfg["shrink"], epsilon=cfg["epsilon"])
        extra["rho"] = repr(f.analyticity.rho)
        extra["rho_bound"] = repr(ctx.rho)
        extra["h_bound"] = repr(ctx.h)
        extra["epsilon_bound"] = repr(ctx.epsilon)
        extra["predicted_slope_log10"] = repr(-math.log10(f.analyticity.rho) / extra["gamma"])
    if len(rows) >= 2:
        extra["fitted_slope_log10"] = repr(convergence_slope(rows))
    text = write_rows(header_lines("convergence", cfg, extra),
                      ["N", "terms", "sup_error", "predicted_bound"], rows)
    emit(text, cfg["out"])
    return text


def cmd_bounds(cfg):
    f = make_function(cfg)
    lam = cfg["lambda"]
    iset = enumerate_set(cfg["q"], cfg["N"], cfg["dim"])
    rho = None
    if cfg["rho"] is not None:
        rho = [float(r) for r in str(cfg["rho"]).split(",")]
        if len(rho) == 1:
            rho = rho * cfg["dim"]
    ctx, kind, rows = bounds_rows(f, lam, iset, normalized=cfg["normalized"],
                                  assumption=int(cfg["assumption"]), rho=rho, shrink=cfg["shrink"],
                                  epsilon=cfg["epsilon"], quad_order=cfg["quad_order"])
    extra = {"bound": kind, "context": repr(ctx),
             "min_ratio": repr(min(r[3] for r in rows)) if rows else "nan"}
    cols = [f"k_{j + 1}" for j in range(cfg["dim"])] + ["measured", "bound", "ratio"]
    out_rows = [list(k) + [m, b, r] for k, m, b, r in rows]
    text = write_rows(header_lines("bounds", cfg, extra), cols, out_rows)
    emit(text, cfg["out"])
    return text


def cmd_indexset(cfg):
    iset = enumerate_set(cfg["q"], cfg["N"], cfg["dim"])
    sub = {k: cfg[k] for k in ("q", "N", "dim")}
    text = iset.to_csv(header_lines("indexset", sub, {"members": len(iset)}))
    emit(text, cfg["out"])
    return text


def selftest_checks():
    """Quick end-to-end checks; yields (name, ok)."""
    from .polycore import eval_at_one, eval_poly, gauss_rule, norm_constant
    from .indexsets import lq_norm
    from .oracles import cauchy_q, cheb_closed_form

    yield "U_3(0.5) = -1", abs(eval_poly(1, 3, 0.5) + 1) < 1e-13
    yield "C_4^(0)(1) = 1/2", abs(eval_at_one(0, 4) - 0.5) < 1e-15
    yield "h_3^(0) = pi/2", abs(norm_constant(0, 3) - math.pi / 2) < 1e-15
    yield "Gauss-Legendre weights sum to 2", abs(gauss_rule(0.5, 5).weights.sum() - 2) < 1e-13
    yield "||(1,1,1)||_(1/2) = 9", abs(lq_norm((1, 1, 1), 0.5) - 9) < 1e-12
    yield "|Lambda_30^1| = 496", len(enumerate_set(1, 30, 2)) == 496
    yield "f1 rho", abs(builtin_function("f1").analyticity.rho - 1.931851652578136) < 1e-14
    z = 0.5 * (2.0 * np.exp(0.7j) + np.exp(-0.7j) / 2.0)
    yield "Q_n^(1) closed form", abs(cauchy_q(1, 6, z) - cheb_closed_form("U", 6, z)) < 1e-10
    yield "qn_bound(2, 1, 5) = 2^-6", abs(bd.qn_bound(2, 1, 5) - 2 ** -6) < 1e-16
    f = builtin_function("poly_test")
    tab = compute_coefficients(f, 0.5, enumerate_set(math.inf, 5, 2))
    big = {k: v for k, v in tab.entries.items() if abs(v) > 1e-13}
    yield "poly_test has one coefficient", list(big) == [(2, 3)] and abs(big[(2, 3)] - 1) < 1e-13
    f1 = builtin_function("f1")
    e10 = sup_error(f1, compute_coefficients(f1, 0.5, enumerate_set(2, 10, 2)))
    e20 = sup_error(f1, compute_coefficients(f1, 0.5, enumerate_set(2, 20, 2)))
    yield "f1 error decreases N=10 -> 20", e20 < e10


def cmd_selftest(cfg):
    lines, ok_all = [], True
    for name, ok in selftest_checks():
        ok_all &= bool(ok)
        lines.append(f"{'PASS' if ok else 'FAIL'}  {name}")
    text = "\n".join(lines) + "\n"
    emit(text, cfg["out"])
    if not ok_all:
        raise FloatingPointError("selftest failed")
    return text


COMMANDS = {
    "expand": cmd_expand,
    "convergence": cmd_convergence,
    "bounds": cmd_bounds,
    "indexset": cmd_indexset,
    "selftest": cmd_selftest,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="gegenapprox", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON file with any of the flag values; flags win")
        p.add_argument("--function", help="built-in: f1, f2, runge(h), poly_test, const, x1, finite_reg(s)")
        p.add_argument("--lambda", dest="lambda", type=float, help="family parameter (0 = Chebyshev T)")
        p.add_argument("--q", help="l^q exponent: positive real, fraction like 1/2, or inf")
        p.add_argument("--N", type=float, help="index-set radius")
        p.add_argument("--N-range", dest="N_range", help="start:stop:step or comma list")
        p.add_argument("--dim", type=int)
        p.add_argument("--quad-order", dest="quad_order", type=int)
        p.add_argument("--epsilon", type=float, help="epsilon of the region D_(h,eps)")
        p.add_argument("--shrink", type=float, help="h = shrink * h_max for the bounds")
        p.add_argument("--normalized", action="store_true", default=None,
                       help="normalized Legendre coefficients (lambda = 1/2)")
        p.add_argument("--assumption", type=int, choices=(1, 2))
        p.add_argument("--rho", help="polyellipse radii for --assumption 1, comma separated")
        p.add_argument("--grid-points", dest="grid_points", type=int)
        p.add_argument("--samples", type=int)
        p.add_argument("--seed", type=lambda s: int(s, 0))
        p.add_argument("--out", help="output CSV path (stdout when omitted)")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        COMMANDS[args.command](cfg)
    except (ConfigError, DomainError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ResourceCapError, MemoryError) as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (FloatingPointError, ToleranceNotReached, RuntimeError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
