"""k-step AR forecasting, first differencing, and forecast scoring.

The MAE/RMSE formulas here are intentionally unusual: each term carries its
own denominator |X(N+s)| taken at the forecast origin, and the RMSE applies
the square root inside the sum,

    MAE  = sum_{s=0}^{m-k} |F(N+s+k) - X(N+s+k)| / (m |X(N+s)|),
    RMSE = sum_{s=0}^{m-k} { [F(N+s+k) - X(N+s+k)]^2 / (m X(N+s)^2) }^{1/2}.

They are implemented verbatim (a consequence: RMSE = sqrt(m) * MAE), and the
conventional mean-absolute and root-mean-square errors are reported alongside
under separate names.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ar_core import as_series
from .errors import DegenerateDataError, InvalidInputError


def _check_coefficients(coefficients) -> np.ndarray:
    phi = np.asarray(coefficients, dtype=float)
    if phi.ndim != 1 or phi.size < 1 or not np.all(np.isfinite(phi)):
        raise InvalidInputError("coefficient vector must be 1-D, non-empty, finite")
    return phi


def forecast_path(coefficients, history, k: int) -> np.ndarray:
    """Forecasts for horizons 1..k, feeding forecasts back for missing lags."""
    phi = _check_coefficients(coefficients)
    hist = as_series(history)
    p = phi.size
    if hist.size < p:
        raise InvalidInputError("history must contain at least p observations")
    if k < 1:
        raise InvalidInputError("forecast horizon k must be at least 1")
    buf = np.concatenate([hist[-p:], np.zeros(k)])
    for h in range(k):
        window = buf[h : h + p][::-1]  # (X_{t+h-1}, ..., X_{t+h-p})
        buf[p + h] = phi @ window
    return buf[p:].copy()


def forecast_k(coefficients, history, k: int) -> float:
    """The k-step-ahead point forecast (innovation mean zero)."""
    return float(forecast_path(coefficients, history, k)[-1])


def difference(series) -> np.ndarray:
    """First differences d_t = X_{t+1} - X_t (length N - 1)."""
    x = as_series(series)
    if x.size < 2:
        raise InvalidInputError("differencing needs at least two observations")
    return np.diff(x)


def undifference(diff_series, anchor: float) -> np.ndarray:
    """Exact inverse of :func:`difference` given the first original value."""
    d = np.asarray(diff_series, dtype=float)
    if d.ndim != 1 or d.size < 1 or not np.all(np.isfinite(d)):
        raise InvalidInputError("differenced series must be 1-D, non-empty, finite")
    if not np.isfinite(anchor):
        raise InvalidInputError("anchor must be finite")
    out = np.empty(d.size + 1)
    out[0] = anchor
    # Sequential reconstruction reproduces the original values exactly
    # whenever the sums are representable.
    for i, delta in enumerate(d):
        out[i + 1] = out[i] + delta
    return out


def rolling_origin_forecasts(
    coefficients, actuals, n_insample: int, k: int, m: int, use_differences: bool = False
) -> np.ndarray:
    """F(N+s+k) for s = 0..m-k, rolling the origin through the holdout.

    Each origin N+s uses the actual observed values up to that point as
    history (no recursive multi-origin chaining).  With ``use_differences``
    the coefficients describe the first-differenced series: the k-step path
    of differences is forecast and summed onto the origin value, converting
    back to the original scale.
    """
    phi = _check_coefficients(coefficients)
    x = as_series(actuals)
    if k < 1 or m < k:
        raise InvalidInputError("need 1 <= k <= m")
    if n_insample < phi.size + (1 if use_differences else 0):
        raise InvalidInputError("in-sample block shorter than the model order")
    if x.size < n_insample + m:
        raise InvalidInputError("actuals must cover the in-sample block plus m holdout points")

    out = np.empty(m - k + 1)
    for s in range(m - k + 1):
        history = x[: n_insample + s]
        if use_differences:
            steps = forecast_path(phi, np.diff(history), k)
            out[s] = history[-1] + steps.sum()
        else:
            out[s] = forecast_k(phi, history, k)
    return out


@dataclass(frozen=True)
class ForecastScore:
    """Evaluation of k-step forecasts over one holdout block."""

    k: int
    m: int
    n_terms: int
    mae: float
    rmse: float
    mae_conventional: float
    rmse_conventional: float


@dataclass(frozen=True)
class ForecastReport:
    method: str
    m: int
    scores: tuple[ForecastScore, ...]

    @property
    def horizons(self) -> tuple[int, ...]:
        return tuple(s.k for s in self.scores)


def score_forecasts(
    actuals, coefficients, n_insample: int, k: int, m: int, use_differences: bool = False
) -> ForecastScore:
    """Evaluate rolling k-step forecasts with the origin-denominated formulas."""
    x = as_series(actuals)
    forecasts = rolling_origin_forecasts(coefficients, x, n_insample, k, m, use_differences)
    s_range = np.arange(m - k + 1)
    origins = x[n_insample + s_range - 1]
    targets = x[n_insample + s_range + k - 1]
    zero = np.flatnonzero(origins == 0.0)
    if zero.size:
        raise DegenerateDataError(
            f"zero denominator X(N+s) at origin index {n_insample + int(zero[0])}"
        )
    err = forecasts - targets
    mae = float(np.sum(np.abs(err) / (m * np.abs(origins))))
    rmse = float(np.sum(np.sqrt(err**2 / (m * origins**2))))
    return ForecastScore(
        k=k,
        m=m,
        n_terms=int(s_range.size),
        mae=mae,
        rmse=rmse,
        mae_conventional=float(np.mean(np.abs(err))),
        rmse_conventional=float(np.sqrt(np.mean(err**2))),
    )


def evaluate_horizons(
    actuals, coefficients, n_insample: int, ks, m: int, use_differences: bool = False, method: str = ""
) -> ForecastReport:
    scores = tuple(
        score_forecasts(actuals, coefficients, n_insample, int(k), m, use_differences)
        for k in ks
    )
    return ForecastReport(method=method, m=m, scores=scores)
