"""Sparse AR(p) estimation by SCAD/LASSO penalized conditional maximum likelihood.

The package covers the full workflow: causal AR simulation with Gaussian or
Student-t innovations, exact conditional likelihood with analytic derivatives,
one-step LLA penalized fits with data-driven tuning, sandwich standard errors,
FPE order selection, rolling forecast evaluation, and a reproducible Monte
Carlo harness.
"""

from .ar_core import (
    ArModel,
    AutocovKernel,
    as_series,
    check_causality,
    sample_autocov,
    simulate,
    theoretical_autocov,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DegenerateDataError,
    InvalidInputError,
    ModelError,
    SparseArError,
)
from .estimator import (
    FitDiagnostics,
    FitResult,
    TuningGrid,
    fit_mle,
    fit_pcmle,
    geometric_grid,
    sandwich_se,
    solve_weighted_l1,
    tune,
)
from .forecast import (
    ForecastReport,
    ForecastScore,
    difference,
    evaluate_horizons,
    forecast_k,
    forecast_path,
    rolling_origin_forecasts,
    score_forecasts,
    undifference,
)
from .innovations import InnovationFamily, gaussian, student_t
from .likelihood import ConditionalLikelihood
from .montecarlo import (
    CoefficientTerm,
    ExperimentDesign,
    McSummary,
    ModelPattern,
    derive_seed,
    probability_curve,
    run_experiment,
    two_proportion_z,
    wilson_interval,
)
from .penalty import PenaltySpec, lasso, scad
from .selection import OrderSelection, fpe_select

__version__ = "0.1.0"

__all__ = [
    "ArModel",
    "AutocovKernel",
    "CoefficientTerm",
    "ConditionalLikelihood",
    "ConfigError",
    "ConvergenceError",
    "DegenerateDataError",
    "ExperimentDesign",
    "FitDiagnostics",
    "FitResult",
    "ForecastReport",
    "ForecastScore",
    "InnovationFamily",
    "InvalidInputError",
    "McSummary",
    "ModelError",
    "ModelPattern",
    "OrderSelection",
    "PenaltySpec",
    "SparseArError",
    "TuningGrid",
    "as_series",
    "check_causality",
    "derive_seed",
    "difference",
    "evaluate_horizons",
    "fit_mle",
    "fit_pcmle",
    "forecast_k",
    "forecast_path",
    "fpe_select",
    "gaussian",
    "geometric_grid",
    "lasso",
    "probability_curve",
    "rolling_origin_forecasts",
    "run_experiment",
    "sample_autocov",
    "sandwich_se",
    "scad",
    "score_forecasts",
    "simulate",
    "solve_weighted_l1",
    "student_t",
    "theoretical_autocov",
    "tune",
    "two_proportion_z",
    "undifference",
    "wilson_interval",
]
