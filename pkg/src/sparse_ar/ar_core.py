"""Causal AR(p) models: representation, simulation, autocovariances.

The zero-mean AR(p) process is ``X_t = phi_1 X_{t-1} + ... + phi_p X_{t-p} + Z_t``
with i.i.d. innovations Z.  Causality (all roots of the AR polynomial outside
the unit circle) is checked through the spectral radius of the companion
matrix, which is better conditioned than polynomial root finding for moderate
orders.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import toeplitz
from scipy.signal import lfilter

from .errors import InvalidInputError, ModelError
from .innovations import InnovationFamily

# Margin below 1 required of the companion spectral radius; models with roots
# on (or numerically at) the unit circle are rejected as non-stationary.
CAUSALITY_MARGIN = 1e-8

DEFAULT_BURN_IN = 1000


def as_series(values) -> np.ndarray:
    """Validate a 1-D series of finite observations; returns a read-only copy."""
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise InvalidInputError("series must be one-dimensional")
    if arr.size < 1:
        raise InvalidInputError("series must contain at least one observation")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("series values must be finite")
    arr.flags.writeable = False
    return arr


def companion_matrix(coefficients) -> np.ndarray:
    phi = np.asarray(coefficients, dtype=float)
    p = phi.size
    mat = np.zeros((p, p))
    mat[0, :] = phi
    if p > 1:
        mat[1:, :-1] = np.eye(p - 1)
    return mat


def check_causality(coefficients) -> tuple[bool, float]:
    """Decide causality of the AR polynomial 1 - phi_1 z - ... - phi_p z^p.

    Returns
    -------
    (causal, rho) : tuple of bool and float
        ``rho`` is the spectral radius of the companion matrix; the model is
        accepted as causal when ``rho < 1 - CAUSALITY_MARGIN``.
    """
    phi = np.asarray(coefficients, dtype=float)
    if phi.ndim != 1 or phi.size == 0:
        raise InvalidInputError("coefficient vector must be non-empty and one-dimensional")
    if not np.all(np.isfinite(phi)):
        raise InvalidInputError("coefficients must be finite")
    if not np.any(phi):
        return True, 0.0
    rho = float(np.max(np.abs(np.linalg.eigvals(companion_matrix(phi)))))
    return rho < 1.0 - CAUSALITY_MARGIN, rho


@dataclass(frozen=True)
class ArModel:
    """A causal AR(p) model paired with an innovation family.

    Construction fails with :class:`ModelError` if the coefficient vector is
    not causal, so every live instance satisfies the stationarity contract.
    """

    coefficients: np.ndarray
    innovation: InnovationFamily

    def __post_init__(self):
        phi = np.array(self.coefficients, dtype=float)
        if phi.ndim != 1 or phi.size < 1:
            raise InvalidInputError("AR order must be at least 1")
        causal, rho = check_causality(phi)
        if not causal:
            raise ModelError(f"AR coefficients are not causal (spectral radius {rho:.6g})")
        phi.flags.writeable = False
        object.__setattr__(self, "coefficients", phi)

    @property
    def order(self) -> int:
        return int(self.coefficients.size)


def simulate(model: ArModel, n: int, burn_in: int = DEFAULT_BURN_IN, seed=None) -> np.ndarray:
    """Simulate n observations of the stationary process.

    The recursion starts from p zero states and the first ``burn_in`` values
    are discarded to wash out the transient (geometric decay under causality
    makes the default ample for spectral radii up to ~0.99).  Identical
    ``(model, n, burn_in, seed)`` gives bit-identical output.
    """
    if n < 1:
        raise InvalidInputError("sample count n must be at least 1")
    if burn_in < 0:
        raise InvalidInputError("burn_in must be nonnegative")
    z = model.innovation.sample(n + burn_in, seed)
    x = lfilter([1.0], np.r_[1.0, -model.coefficients], z)
    return x[burn_in:].copy()


@dataclass(frozen=True)
class AutocovKernel:
    """Autocovariances gamma(0..horizon) of a stationary process."""

    gammas: np.ndarray
    horizon: int

    def __post_init__(self):
        g = np.array(self.gammas, dtype=float)
        if g.ndim != 1 or g.size != self.horizon + 1:
            raise InvalidInputError("gammas must hold horizon + 1 values")
        if not np.all(np.isfinite(g)):
            raise InvalidInputError("autocovariances must be finite")
        if g[0] < 0:
            raise InvalidInputError("gamma(0) must be nonnegative")
        if np.any(np.abs(g[1:]) > g[0] * (1.0 + 1e-12) + 1e-300):
            raise InvalidInputError("|gamma(h)| cannot exceed gamma(0)")
        g.flags.writeable = False
        object.__setattr__(self, "gammas", g)

    def __getitem__(self, h: int) -> float:
        return float(self.gammas[h])

    def toeplitz(self) -> np.ndarray:
        return toeplitz(self.gammas)


def theoretical_autocov(model: ArModel, horizon: int) -> AutocovKernel:
    """Exact autocovariances from the Yule-Walker equations.

    Solves the (p+1)-dimensional linear system for gamma(0..p) and extends to
    larger lags with the recursion gamma(h) = sum_j phi_j gamma(h-j).
    """
    if horizon < 0:
        raise InvalidInputError("horizon must be nonnegative")
    sigma2 = model.innovation.variance()
    if not np.isfinite(sigma2):
        raise ModelError("innovation variance is not finite")
    phi = model.coefficients
    p = model.order

    system = np.zeros((p + 1, p + 1))
    rhs = np.zeros(p + 1)
    rhs[0] = sigma2
    for h in range(p + 1):
        system[h, h] += 1.0
        for j in range(1, p + 1):
            system[h, abs(h - j)] -= phi[j - 1]
    head = np.linalg.solve(system, rhs)

    gam = np.empty(max(horizon, p) + 1)
    gam[: p + 1] = head
    for h in range(p + 1, horizon + 1):
        gam[h] = phi @ gam[h - p : h][::-1]
    return AutocovKernel(gam[: horizon + 1], horizon)


def sample_autocov(series, horizon: int) -> AutocovKernel:
    """Non-centered sample autocovariances with divisor N.

    gamma_hat(h) = (1/N) sum_{i=1}^{N-h} X_i X_{i+h}.  The process has zero
    mean by assumption, so no centering is applied; the divisor N (not N-h)
    keeps the implied Toeplitz matrix positive semidefinite.
    """
    x = as_series(series)
    n = x.size
    if horizon >= n:
        raise InvalidInputError("horizon must be smaller than the series length")
    if horizon < 0:
        raise InvalidInputError("horizon must be nonnegative")
    gam = np.array([x[: n - h] @ x[h:] for h in range(horizon + 1)]) / n
    return AutocovKernel(gam, horizon)
