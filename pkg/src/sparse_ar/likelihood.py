"""Conditional log-likelihood of an AR(p) model and its derivatives.

For observations X_1..X_N the conditional log-likelihood given the first p
values is

    L(theta) = sum_{t=p+1}^{N} log g(X_t - sum_j phi_j X_{t-j}),

with analytic gradient  dL/dphi_j = -sum_t (g'/g)(r_t) X_{t-j}  and Hessian
d2L/dphi_j dphi_i = sum_t (g'/g)'(r_t) X_{t-j} X_{t-i}, where r_t is the
residual at time t.

The penalized objective is Q(theta) = L(theta) - N * sum_j p(|phi_j|) with N
the full sample length (the effective sum has N - p terms; for fixed p the
distinction is asymptotically irrelevant, but the full-N convention is used
exactly).
"""

from __future__ import annotations

from functools import cached_property

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .ar_core import as_series
from .errors import InvalidInputError
from .innovations import InnovationFamily
from .penalty import PenaltySpec


class ConditionalLikelihood:
    """Immutable evaluation context for L(theta) on a fixed series.

    The lagged design is kept as a strided view into the series, so memory
    stays O(N) regardless of the order.  All evaluation methods are pure;
    sums use numpy's pairwise summation, which makes repeated evaluations
    bit-reproducible.
    """

    def __init__(self, series, order: int, innovation: InnovationFamily):
        x = as_series(series)
        if order < 1:
            raise InvalidInputError("order must be at least 1")
        if x.size <= order:
            raise InvalidInputError("need more observations than the order (N > p)")
        self._x = x
        self.order = int(order)
        self.innovation = innovation
        # Row i holds (X_{t-1}, ..., X_{t-p}) for target t = p + i (0-based
        # target index); windows are reversed views, no copy.
        windows = sliding_window_view(x, self.order)
        self._lags = windows[:-1, ::-1]
        self._targets = x[self.order :]

    @property
    def series(self) -> np.ndarray:
        return self._x

    @property
    def n_total(self) -> int:
        return int(self._x.size)

    @property
    def n_effective(self) -> int:
        return int(self._targets.size)

    @property
    def lag_matrix(self) -> np.ndarray:
        return self._lags

    @property
    def targets(self) -> np.ndarray:
        return self._targets

    @cached_property
    def gram(self) -> np.ndarray:
        """Lagged-design Gram matrix D'D (p x p)."""
        g = self._lags.T @ self._lags
        return (g + g.T) / 2.0

    @cached_property
    def crossproduct(self) -> np.ndarray:
        """D'y for the lag regression."""
        return self._lags.T @ self._targets

    def _check_theta(self, theta) -> np.ndarray:
        arr = np.asarray(theta, dtype=float)
        if arr.ndim != 1 or arr.size != self.order:
            raise InvalidInputError(
                f"coefficient vector must have length {self.order}, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("coefficients must be finite")
        return arr

    def residuals(self, theta) -> np.ndarray:
        theta = self._check_theta(theta)
        return self._targets - self._lags @ theta

    def log_lik(self, theta) -> float:
        return float(np.sum(self.innovation.log_density(self.residuals(theta))))

    def gradient(self, theta) -> np.ndarray:
        s = self.innovation.score(self.residuals(theta))
        return -(self._lags.T @ s)

    def hessian(self, theta) -> np.ndarray:
        w = self.innovation.score_derivative(self.residuals(theta))
        h = self._lags.T @ (w[:, None] * self._lags)
        return (h + h.T) / 2.0

    def score_contributions(self, theta) -> np.ndarray:
        """Per-term gradient rows s_t with sum_t s_t = gradient(theta)."""
        s = self.innovation.score(self.residuals(theta))
        return -(s[:, None] * self._lags)

    def penalized_objective(self, theta, pen: PenaltySpec) -> float:
        theta = self._check_theta(theta)
        return self.log_lik(theta) - self.n_total * float(np.sum(pen.value(theta)))
