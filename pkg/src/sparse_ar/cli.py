"""Command-line interface: simulate / fit / select / forecast / mc.

Exit codes: 0 success, 1 usage or config error, 2 data error, 3 convergence
error.  Diagnostics go to stderr; results go to the declared output files
(and nothing else is written).
"""

from __future__ import annotations

import argparse
import os
import secrets
import sys

import numpy as np

from . import dataio
from .ar_core import simulate
from .errors import (
    ConfigError,
    ConvergenceError,
    DegenerateDataError,
    InvalidInputError,
    ModelError,
    SparseArError,
)
from .estimator import TuningGrid, fit_mle, fit_pcmle, tune
from .forecast import difference, evaluate_horizons
from .innovations import gaussian, student_t
from .montecarlo import run_experiment
from .penalty import lasso, scad
from .selection import fpe_select

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CONVERGENCE = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so we control exit codes."""

    def error(self, message):
        raise _UsageError(message)


def _parse_lambda_grid(spec: str) -> tuple[float, ...]:
    """Either a single value 'x' or a geometric grid 'lo:hi:count'."""
    parts = spec.split(":")
    try:
        if len(parts) == 1:
            value = float(parts[0])
            if value <= 0:
                raise ValueError
            return (value,)
        if len(parts) == 3:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
            from .estimator import geometric_grid

            return geometric_grid(lo, hi, count)
    except (ValueError, InvalidInputError) as exc:
        raise _UsageError(f"bad --lambda-grid {spec!r}: expected X or LO:HI:COUNT") from exc
    raise _UsageError(f"bad --lambda-grid {spec!r}: expected X or LO:HI:COUNT")


def _innovation_from_args(args):
    if args.innovation == "gaussian":
        return gaussian(args.sigma)
    if args.df is None:
        raise _UsageError("--innovation student_t requires --df")
    return student_t(args.df)


def _default_threads() -> int:
    env = os.environ.get("SPARSE_AR_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise _UsageError(f"SPARSE_AR_THREADS must be an integer, got {env!r}")
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sparse-ar", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="simulate a causal AR(p) series to CSV")
    p_sim.add_argument("--model", required=True, help="model TOML file")
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--burn-in", type=int, default=1000)
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--out", required=True)

    p_fit = sub.add_parser("fit", help="conditional MLE or SCAD/LASSO PCMLE from CSV")
    p_fit.add_argument("--input", required=True)
    p_fit.add_argument("--order", type=int, required=True)
    p_fit.add_argument("--innovation", choices=["gaussian", "student_t"], default="gaussian")
    p_fit.add_argument("--sigma", type=float, default=1.0)
    p_fit.add_argument("--df", type=float, default=None)
    p_fit.add_argument("--penalty", choices=["scad", "lasso", "none"], default="none")
    p_fit.add_argument("--lambda-grid", default=None, help="X or LO:HI:COUNT (geometric)")
    p_fit.add_argument("--a", type=float, default=2.1, help="SCAD second tuning parameter")
    p_fit.add_argument("--split", type=float, default=0.8, help="tuning holdout split fraction")
    p_fit.add_argument("--difference", type=int, choices=[0, 1], default=0,
                       help="fit on first differences of the input")
    p_fit.add_argument("--out", required=True)

    p_sel = sub.add_parser("select", help="FPE order selection")
    p_sel.add_argument("--input", required=True)
    p_sel.add_argument("--pmax", type=int, required=True)
    p_sel.add_argument("--difference", type=int, choices=[0, 1], default=0)
    p_sel.add_argument("--out", required=True)

    p_fc = sub.add_parser("forecast", help="k-step rolling forecasts and MAE/RMSE scores")
    p_fc.add_argument("--input", required=True, help="full series CSV (in-sample + holdout)")
    p_fc.add_argument("--fit", required=True, help="fit JSON with the coefficients")
    p_fc.add_argument("--difference", type=int, choices=[0, 1], default=0,
                      help="coefficients describe the differenced series")
    p_fc.add_argument("--holdout", type=int, required=True, help="number of holdout points m")
    p_fc.add_argument("--steps", default="1", help="comma-separated forecast horizons")
    p_fc.add_argument("--out", required=True)

    p_mc = sub.add_parser("mc", help="Monte Carlo replication experiment from a design TOML")
    p_mc.add_argument("--design", required=True)
    p_mc.add_argument("--out-dir", required=True)
    p_mc.add_argument("--threads", type=int, default=None)

    return parser


def _cmd_simulate(args) -> int:
    model = dataio.load_model(args.model)
    seed = args.seed
    if seed is None:
        seed = secrets.randbits(63)
        print(f"no --seed given; using entropy seed {seed}", file=sys.stderr)
    series = simulate(model, args.n, args.burn_in, seed)
    dataio.save_series(args.out, series)
    return EXIT_OK


def _cmd_fit(args) -> int:
    if args.order < 1:
        raise _UsageError("--order must be at least 1")
    series = dataio.load_series(args.input)
    if args.difference:
        series = difference(series)
    innovation = _innovation_from_args(args)
    if args.penalty == "none":
        result = fit_mle(series, args.order, innovation)
    else:
        if args.lambda_grid is None:
            raise _UsageError(f"--penalty {args.penalty} requires --lambda-grid")
        lambdas = _parse_lambda_grid(args.lambda_grid)
        if len(lambdas) == 1:
            pen = scad(lambdas[0], args.a) if args.penalty == "scad" else lasso(lambdas[0])
            result = fit_pcmle(series, args.order, innovation, pen)
        else:
            a_values = (args.a,) if args.penalty == "scad" else None
            grid = TuningGrid(lambdas, a_values, args.split)
            result = tune(series, args.order, innovation, args.penalty, grid)
    dataio.save_fit(args.out, result)
    return EXIT_OK


def _cmd_select(args) -> int:
    if args.pmax < 1:
        raise _UsageError("--pmax must be at least 1")
    series = dataio.load_series(args.input)
    if args.difference:
        series = difference(series)
    selection = fpe_select(series, args.pmax)
    dataio.save_selection(args.out, selection)
    return EXIT_OK


def _cmd_forecast(args) -> int:
    series = dataio.load_series(args.input)
    coefficients = dataio.load_fit_coefficients(args.fit)
    try:
        steps = [int(s) for s in args.steps.split(",") if s.strip()]
    except ValueError:
        raise _UsageError(f"bad --steps {args.steps!r}: expected comma-separated integers")
    if not steps or any(k < 1 for k in steps):
        raise _UsageError("--steps must contain positive integers")
    if args.holdout < max(steps):
        raise _UsageError("--holdout must be at least the largest forecast step")
    n_insample = series.size - args.holdout
    report = evaluate_horizons(
        series,
        coefficients,
        n_insample,
        steps,
        args.holdout,
        use_differences=bool(args.difference),
        method="",
    )
    dataio.save_forecast_report(args.out, report)
    return EXIT_OK


def _cmd_mc(args) -> int:
    design = dataio.load_design(args.design)
    threads = args.threads if args.threads is not None else _default_threads()
    if threads < 1:
        raise _UsageError("--threads must be at least 1")
    summary = run_experiment(design, threads=threads)
    out = dataio.write_outputs(args.out_dir, summary)
    total_failures = sum(cell.failures for cell in summary.cells)
    print(f"wrote {out}/raw.csv, summary.csv, curve.csv"
          f" ({total_failures} non-converged fits)", file=sys.stderr)
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "fit": _cmd_fit,
    "select": _cmd_select,
    "forecast": _cmd_forecast,
    "mc": _cmd_mc,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (InvalidInputError, ModelError, DegenerateDataError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SparseArError as exc:  # any future subclass: treat as data error
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
