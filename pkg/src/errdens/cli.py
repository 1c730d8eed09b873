"""Command line interface: ``errdens {estimate,simulate,rates,diagnose}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .bandwidth import (
    BandwidthPlan,
    Rule,
    optimal_b0,
    rate_report,
    residual_plan,
    silverman_b1,
)
from .density import DEFAULT_GRID_SIZE, EmptyTrimSetError, default_grid, feasible_density
from .regression import TrimBox, loo_nadaraya_watson, trim_mask
from .serialize import curve_csv, dumps_json, load_csv, table_csv
from .simulation import (
    DELTA,
    emit_density_curves,
    get_model,
    normality_diagnostic,
    resolve_threads,
    run_monte_carlo,
)

log = logging.getLogger(__name__)

COMMANDS = ("estimate", "simulate", "rates", "diagnose")


@dataclass
class RunConfig:
    command: str
    input_path: Path | None = None
    model: str | None = None
    n: int | None = None
    d: int | None = None
    reps: int | None = None
    c0: float | None = None
    seed: int | None = None
    e_points: list[float] | None = None
    grid_size: int | None = None
    delta: float = DELTA
    b0_override: float | None = None
    b1_override: float | None = None
    sigma: float = 1.0
    mode: str = "standard"
    sigma_source: str = "errors"
    output_path: Path | None = None
    output_format: str = "json"
    threads: int | None = None


def _points(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _add_common(p):
    p.add_argument("--output", "-o", dest="output_path", type=Path)
    p.add_argument("--format", dest="output_format", choices=("json", "csv"), default="json")


def _add_bandwidths(p, c0_default=1.0):
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--c0", type=float, default=None,
                     help=f"first-step formula multiplier in (0, 1] (default {c0_default})")
    grp.add_argument("--b0", dest="b0_override", type=_positive_float,
                     help="explicit first-step bandwidth; excludes --c0")
    p.add_argument("--b1", dest="b1_override", type=_positive_float)


def build_parser():
    parser = argparse.ArgumentParser(prog="errdens", description=__doc__)
    parser.add_argument("--version", action="version", version=f"errdens {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate the error density from a CSV sample")
    p.add_argument("--input", dest="input_path", type=Path, required=True)
    _add_bandwidths(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--grid", dest="grid_size", type=int, default=None)
    g.add_argument("--points", dest="e_points", type=_points)
    p.add_argument("--delta", type=float, default=DELTA,
                   help="trim margin as a fraction of each covariate's observed range")
    _add_common(p)

    p = sub.add_parser("simulate", help="Monte Carlo bias/variance/MSE tables")
    p.add_argument("--model", required=True, choices=("sine1d", "trivariate"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--reps", type=int, default=300)
    p.add_argument("--c0", type=float, default=1.0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--points", dest="e_points", type=_points, default=[-1.0, 0.0, 1.0])
    p.add_argument("--grid", dest="grid_size", type=int, default=None,
                   help="also emit mean density curves on this many points over [-4, 4]")
    p.add_argument("--mode", choices=("standard", "oracle_regression"), default="standard")
    p.add_argument("--sigma-source", choices=("errors", "residuals"), default="errors")
    p.add_argument("--delta", type=float, default=DELTA)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads, 0 for all CPUs (default: $ERRDENS_THREADS or 1)")
    _add_common(p)

    p = sub.add_parser("rates", help="rate exponents, AMSE and R_n proxies")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sigma", type=_positive_float, default=1.0,
                   help="error scale for the Silverman bandwidth")
    _add_bandwidths(p)
    _add_common(p)

    p = sub.add_parser("diagnose", help="bandwidth assumption checks and normality diagnostic")
    p.add_argument("--model", required=True, choices=("sine1d", "trivariate"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--reps", type=int, default=500)
    p.add_argument("--e", dest="e_points", type=_points, default=[1.0])
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--delta", type=float, default=DELTA)
    _add_bandwidths(p)
    _add_common(p)
    return parser


_LIST_FLAGS = ("--points", "--e")


def _attach_negative_lists(argv):
    # argparse reads "-1,0,1" as an option; glue such values onto their flag
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if tok in _LIST_FLAGS and nxt and nxt.startswith("-") and nxt[1:2] in "0123456789.":
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def parse_config(argv=None) -> RunConfig:
    argv = sys.argv[1:] if argv is None else list(argv)
    ns = build_parser().parse_args(_attach_negative_lists(argv))
    return RunConfig(**{k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__})


def _version_block():
    return {"errdens": __version__, "numpy": np.__version__, "scipy": scipy.__version__}


def _plan(cfg, n, d, sigma):
    c0 = 1.0 if cfg.c0 is None else cfg.c0
    if cfg.b0_override is not None:
        b1 = cfg.b1_override if cfg.b1_override is not None else silverman_b1(sigma, n)
        return BandwidthPlan(cfg.b0_override, b1, Rule.EXPLICIT)
    b1 = cfg.b1_override if cfg.b1_override is not None else silverman_b1(sigma, n)
    b0, branch = optimal_b0(n, d, b1, c0)
    rule = Rule.FORMULA if cfg.b1_override is None else Rule.EXPLICIT
    return BandwidthPlan(b0, b1, rule, c0=c0, branch=branch)


def _estimate(cfg):
    data = load_csv(cfg.input_path)
    if cfg.b0_override is None and cfg.b1_override is None:
        plan, sigma = residual_plan(data, 1.0 if cfg.c0 is None else cfg.c0)
    elif cfg.b0_override is not None and cfg.b1_override is None:
        fit = loo_nadaraya_watson(data, cfg.b0_override)
        sigma = float(np.std(fit.residuals[fit.defined_mask], ddof=1))
        plan = _plan(cfg, data.n, data.d, sigma)
    else:
        sigma = None
        plan = _plan(cfg, data.n, data.d, 1.0)
    fit = loo_nadaraya_watson(data, plan.b0)
    lo, hi = data.X.min(axis=0), data.X.max(axis=0)
    margin = cfg.delta * (hi - lo)
    box = TrimBox(lo + margin, hi - margin)
    mask = trim_mask(data, box)
    if cfg.e_points is not None:
        grid = np.asarray(cfg.e_points, dtype=float)
    else:
        used = fit.residuals[mask & fit.defined_mask]
        if used.size == 0:
            raise EmptyTrimSetError("empty trim set: no usable observations")
        grid = default_grid(used, plan.b1, size=cfg.grid_size or DEFAULT_GRID_SIZE)
    curve = feasible_density(fit, mask, grid, plan.b1)
    doc = {
        "config": cfg,
        "bandwidths": {**dumps_dict(plan), "residual_sd": sigma},
        "results": {
            "n": data.n,
            "d": data.d,
            "n_used": curve.n_used,
            "n_excluded": curve.n_excluded,
            "n_undefined_fits": fit.n_undefined,
            "trim_box": {"lower": box.lower, "upper": box.upper},
            "integral": curve.integral() if grid.size > 1 else None,
            "curve": {"e": curve.grid, "f_hat": curve.values},
        },
        "diagnostics": None,
        "version": _version_block(),
    }
    return doc, curve_csv(curve.grid, {"f_hat": curve.values})


def dumps_dict(obj):
    return json.loads(dumps_json(obj))


def _simulate(cfg):
    model = get_model(cfg.model)
    threads = resolve_threads(cfg.threads)
    report = run_monte_carlo(
        model, cfg.n, cfg.reps, cfg.c0, cfg.e_points, cfg.seed, cfg.mode,
        sigma_source=cfg.sigma_source, delta=cfg.delta, threads=threads,
    )
    b0_ref, branch = optimal_b0(cfg.n, model.d, silverman_b1(1.0, cfg.n), cfg.c0)
    results = {
        "model": report.model,
        "n": report.n,
        "reps": report.reps,
        "mode": report.mode,
        "seed": report.seed,
        "excluded_replicates": report.excluded,
        "rows": report.rows,
    }
    text = table_csv(report.rows)
    if cfg.grid_size:
        curves = emit_density_curves(
            model, cfg.n, cfg.reps, cfg.c0, np.linspace(-4, 4, cfg.grid_size), cfg.seed,
            delta=cfg.delta, threads=threads,
        )
        results["curves"] = {
            "e": curves.grid, "f_hat": curves.feasible,
            "f_tilde": curves.oracle, "f_true": curves.true,
        }
        text = curve_csv(curves.grid, {"f_hat": curves.feasible, "f_tilde": curves.oracle,
                                       "f_true": curves.true})
    bandwidths = {
        "rule": Rule.FORMULA.value,
        "c0": cfg.c0,
        "branch": branch.value,
        "b1_per_replicate": report.b1_used,
        "b0_per_replicate": report.b0_used,
        "b1_mean": float(report.b1_used.mean()),
        "b0_mean": float(report.b0_used.mean()),
        "b0_at_unit_sigma": b0_ref,
    }
    doc = {"config": cfg, "bandwidths": bandwidths, "results": results,
           "diagnostics": None, "version": _version_block()}
    return doc, text


def _rates(cfg):
    plan = _plan(cfg, cfg.n, cfg.d, cfg.sigma)
    report = rate_report(cfg.n, cfg.d, plan.b0, plan.b1)
    doc = {
        "config": cfg,
        "bandwidths": plan,
        "results": {
            "b1_star_exponent": report.b1_star_exponent,
            "rate_exponent": report.rate_exponent,
            "amse_proxy": report.amse_value,
            "rn_remainder": report.rn_value,
        },
        "diagnostics": report.assumption_flags,
        "version": _version_block(),
    }
    return doc, None


def _diagnose(cfg):
    model = get_model(cfg.model)
    plan = _plan(cfg, cfg.n, model.d, 1.0)
    report = rate_report(cfg.n, model.d, plan.b0, plan.b1)
    if len(cfg.e_points) != 1:
        raise ValueError("diagnose takes a single evaluation point")
    e = cfg.e_points[0]
    diag = normality_diagnostic(model, cfg.n, cfg.reps, e, plan.b0, plan.b1, cfg.seed,
                                delta=cfg.delta)
    results = {
        "e": e,
        "center": diag.center,
        "variance": diag.variance,
        "z_mean": diag.mean,
        "z_sd": diag.sd,
        "ks_distance": diag.ks_distance,
        "ks_pvalue": diag.ks_pvalue,
        "z": diag.z,
    }
    doc = {"config": cfg, "bandwidths": plan, "results": results,
           "diagnostics": report.assumption_flags, "version": _version_block()}
    return doc, None


_HANDLERS = {"estimate": _estimate, "simulate": _simulate, "rates": _rates, "diagnose": _diagnose}


def run(cfg: RunConfig, stdout=None) -> int:
    """Execute one command and write its artifact. Returns the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    try:
        doc, csv_text = _HANDLERS[cfg.command](cfg)
        if cfg.output_format == "csv":
            if csv_text is None:
                raise ValueError(f"{cfg.command} has no CSV output; use --format json")
            text = csv_text
        else:
            text = dumps_json(doc) + "\n"
        if cfg.output_path is not None:
            cfg.output_path.write_text(text, encoding="utf-8")
        else:
            stdout.write(text)
    except (ValueError, OSError, RuntimeError) as exc:
        err = {"error": {"type": type(exc).__name__, "message": str(exc), "command": cfg.command}}
        sys.stderr.write(json.dumps(err) + "\n")
        return 1
    return 0


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    sys.exit(run(parse_config(argv)))


if __name__ == "__main__":
    main()
