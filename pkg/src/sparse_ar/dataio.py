"""File formats: TOML configs, CSV series and tables, JSON results.

Configs reject unknown keys (fail fast on typos).  CSV floats are written
with ``repr``, the shortest round-trip representation, so identical numbers
always produce identical bytes — the determinism guarantees elsewhere rely
on this.
"""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .ar_core import ArModel, as_series
from .errors import ConfigError, InvalidInputError
from .estimator import FitResult, TuningGrid, geometric_grid
from .forecast import ForecastReport
from .innovations import InnovationFamily, gaussian, student_t
from .montecarlo import (
    CoefficientTerm,
    CurvePoint,
    ExperimentDesign,
    McSummary,
    ModelPattern,
)
from .selection import OrderSelection


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _require_keys(table: dict, allowed: set[str], where: str):
    unknown = set(table) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


def _load_toml(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed TOML in {path}: {exc}") from exc


def _innovation_from_table(table: dict, where: str) -> InnovationFamily:
    _require_keys(table, {"family", "sigma", "df"}, where)
    family = table.get("family")
    if family == "gaussian":
        return gaussian(float(table.get("sigma", 1.0)))
    if family == "student_t":
        if "df" not in table:
            raise ConfigError(f"{where}: student_t requires df")
        return student_t(float(table["df"]))
    raise ConfigError(f"{where}: innovation family must be 'gaussian' or 'student_t'")


# -- AR model files ------------------------------------------------------


def load_model(path) -> ArModel:
    """Model TOML: keys order, coefficients, innovation.{family, sigma|df}."""
    data = _load_toml(path)
    _require_keys(data, {"order", "coefficients", "innovation"}, "model file")
    try:
        order = int(data["order"])
        coeffs = [float(v) for v in data["coefficients"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"model file {path}: bad order/coefficients") from exc
    if len(coeffs) != order:
        raise ConfigError(f"model file {path}: order {order} != {len(coeffs)} coefficients")
    innovation = _innovation_from_table(data.get("innovation", {}), "model innovation")
    return ArModel(np.asarray(coeffs), innovation)


# -- series CSV ----------------------------------------------------------


def save_series(path, values):
    x = as_series(values)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x"])
        for v in x:
            writer.writerow([_fmt(v)])


def load_series(path) -> np.ndarray:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except FileNotFoundError as exc:
        raise InvalidInputError(f"series file not found: {path}") from exc
    if not rows or rows[0] != ["x"]:
        raise InvalidInputError(f"series file {path} must have a single 'x' header column")
    try:
        values = [float(row[0]) for row in rows[1:] if row]
    except (ValueError, IndexError) as exc:
        raise InvalidInputError(f"series file {path} contains a non-numeric row") from exc
    return as_series(values)


# -- fit JSON -------------------------------------------------------------


def fit_to_dict(fit: FitResult) -> dict:
    return {
        "method": fit.method,
        "estimates": [float(v) for v in fit.estimates],
        "support": list(fit.support),
        "std_errors": [float(v) for v in fit.std_errors],
        "lambda_used": fit.lambda_used,
        "a_used": fit.a_used,
        "diagnostics": {
            "iterations": fit.diagnostics.iterations,
            "grad_norm": fit.diagnostics.grad_norm,
            "converged": fit.diagnostics.converged,
            "holdout_loglik": fit.diagnostics.holdout_loglik,
        },
    }


def save_fit(path, fit: FitResult):
    with open(path, "w") as fh:
        json.dump(fit_to_dict(fit), fh, indent=2)
        fh.write("\n")


def load_fit_coefficients(path) -> np.ndarray:
    try:
        with open(path) as fh:
            data = json.load(fh)
        return np.asarray([float(v) for v in data["estimates"]])
    except FileNotFoundError as exc:
        raise InvalidInputError(f"fit file not found: {path}") from exc
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"fit file {path} is not a valid fit JSON") from exc


def save_selection(path, selection: OrderSelection):
    payload = {
        "chosen_order": selection.chosen_order,
        "orders": list(selection.orders),
        "fpe": [float(v) for v in selection.criteria],
        "sigma2": [float(v) for v in selection.sigma2],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def save_forecast_report(path, report: ForecastReport):
    payload = {
        "method": report.method,
        "m": report.m,
        "horizons": list(report.horizons),
        "scores": [
            {
                "k": s.k,
                "mae": s.mae,
                "rmse": s.rmse,
                "mae_conventional": s.mae_conventional,
                "rmse_conventional": s.rmse_conventional,
                "n_terms": s.n_terms,
            }
            for s in report.scores
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


# -- experiment design TOML ----------------------------------------------


def _grid_from_table(table: dict, where: str, need_a: bool) -> TuningGrid:
    _require_keys(table, {"lambda", "a", "split_fraction"}, where)
    lam_spec = table.get("lambda")
    if isinstance(lam_spec, dict):
        _require_keys(lam_spec, {"lo", "hi", "count"}, f"{where}.lambda")
        lams = geometric_grid(float(lam_spec["lo"]), float(lam_spec["hi"]), int(lam_spec["count"]))
    elif isinstance(lam_spec, list):
        lams = tuple(float(v) for v in lam_spec)
    else:
        raise ConfigError(f"{where}: lambda must be an array or {{lo, hi, count}}")
    a_values = None
    if need_a:
        a_spec = table.get("a", [2.1])
        if not isinstance(a_spec, list):
            a_spec = [a_spec]
        a_values = tuple(float(v) for v in a_spec)
    split = float(table.get("split_fraction", 0.8))
    return TuningGrid(lams, a_values, split)


def load_design(path) -> ExperimentDesign:
    """Experiment TOML mirroring :class:`ExperimentDesign`; unknown keys rejected."""
    data = _load_toml(path)
    _require_keys(
        data,
        {"master_seed", "replications", "sample_sizes", "methods", "burn_in", "model",
         "innovation", "tuning"},
        "design file",
    )
    try:
        master_seed = int(data["master_seed"])
        replications = int(data["replications"])
        sample_sizes = tuple(int(v) for v in data["sample_sizes"])
        methods = tuple(str(v) for v in data["methods"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"design file {path}: missing or malformed top-level keys") from exc

    model_table = data.get("model", {})
    _require_keys(model_table, {"order", "terms"}, "design model")
    try:
        order = int(model_table["order"])
        terms = tuple(
            CoefficientTerm(int(t["lag"]), float(t["base"]), float(t.get("n_power", 0.0)))
            for t in model_table.get("terms", [])
        )
        for t in model_table.get("terms", []):
            _require_keys(t, {"lag", "base", "n_power"}, "design model term")
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"design file {path}: malformed model table") from exc
    pattern = ModelPattern(order, terms)

    innovation = _innovation_from_table(data.get("innovation", {}), "design innovation")

    tuning = data.get("tuning", {})
    _require_keys(tuning, {"split_fraction", "scad", "lasso"}, "design tuning")
    split = float(tuning.get("split_fraction", 0.8))
    scad_grid = lasso_grid = None
    if "scad" in tuning:
        table = dict(tuning["scad"])
        table.setdefault("split_fraction", split)
        scad_grid = _grid_from_table(table, "tuning.scad", need_a=True)
    if "lasso" in tuning:
        table = dict(tuning["lasso"])
        table.setdefault("split_fraction", split)
        lasso_grid = _grid_from_table(table, "tuning.lasso", need_a=False)

    try:
        return ExperimentDesign(
            pattern=pattern,
            innovation=innovation,
            sample_sizes=sample_sizes,
            replications=replications,
            methods=methods,
            master_seed=master_seed,
            scad_grid=scad_grid,
            lasso_grid=lasso_grid,
            burn_in=int(data.get("burn_in", 1000)),
        )
    except InvalidInputError as exc:
        raise ConfigError(f"design file {path}: {exc}") from exc


# -- Monte Carlo CSV outputs ----------------------------------------------


def write_raw_csv(path, summary: McSummary):
    order = summary.design.pattern.order
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["n", "replication", "seed", "method", "converged", "lambda", "a"]
            + [f"est_{j}" for j in range(1, order + 1)]
        )
        for rec in summary.records:
            est = [_fmt(v) for v in rec.estimates] if rec.estimates is not None else [""] * order
            writer.writerow(
                [rec.n, rec.replication, rec.seed, rec.method, _fmt(rec.converged),
                 _fmt(rec.lambda_used), _fmt(rec.a_used)] + est
            )


def write_summary_csv(path, summary: McSummary):
    """Long-format key/value summary; one row per statistic."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "n", "key", "value"])
        writer.writerow(["*", "*", "master_seed", summary.design.master_seed])
        writer.writerow(["*", "*", "replications", summary.design.replications])
        writer.writerow(["*", "*", "innovation", summary.design.innovation.label()])
        writer.writerow(
            ["*", "*", "satisfies_assumptions_2", _fmt(summary.assumptions2_satisfied)]
        )
        for cell in summary.cells:
            rows = [
                ("failures", cell.failures),
                ("zero_prob_all_zero_lags", cell.all_zero_probability),
                ("zero_prob_all_wilson_low", cell.all_zero_wilson[0]),
                ("zero_prob_all_wilson_high", cell.all_zero_wilson[1]),
                ("l2_median", cell.l2_median),
                ("l2_mean", cell.l2_mean),
            ]
            for stat in cell.lag_stats:
                rows.extend(
                    [
                        (f"zero_prob_lag{stat.lag}", stat.zero_probability),
                        (f"wilson_low_lag{stat.lag}", stat.wilson_low),
                        (f"wilson_high_lag{stat.lag}", stat.wilson_high),
                        (f"avg_bias_lag{stat.lag}", stat.average_bias),
                        (f"true_lag{stat.lag}", stat.true_value),
                    ]
                )
            for key, value in rows:
                writer.writerow([cell.method, cell.n, key, _fmt(value)])


def write_curve_csv(path, points: tuple[CurvePoint, ...]):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "n", "lag", "probability"])
        for pt in points:
            writer.writerow([pt.method, pt.n, pt.lag, _fmt(pt.probability)])


def write_outputs(out_dir, summary: McSummary):
    """Write raw.csv, summary.csv, curve.csv into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_raw_csv(out / "raw.csv", summary)
    write_summary_csv(out / "summary.csv", summary)
    from .montecarlo import probability_curve

    write_curve_csv(out / "curve.csv", probability_curve(summary))
    return out
