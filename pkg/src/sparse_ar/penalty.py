"""SCAD and LASSO penalty functions with first and second derivatives.

SCAD with tuning parameters (lambda, a), a > 2:

    p(u) = lambda * u                                    for u <= lambda
         = (a*lambda*u - u^2/2 - lambda^2/2) / (a - 1)   for lambda < u < a*lambda
         = (a + 1) * lambda^2 / 2                        for u >= a*lambda

    p'(u) = lambda                  for u <= lambda
          = (a*lambda - u)+/(a-1)   for u > lambda

    p''(u) = -1/(a-1) strictly inside (lambda, a*lambda), 0 elsewhere.

LASSO is p(u) = lambda * u with constant derivative lambda.

Knot conventions: the second derivative uses strict inequalities (0 at the
knots); the first derivative takes the left branch at u = lambda, though both
branches agree there.  Optimizers can land exactly on knots, so the
conventions are pinned down here rather than left to chance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

SCAD = "scad"
LASSO = "lasso"

# Table-oriented default for the second SCAD parameter; the 3.7 of the wider
# SCAD literature is available but not the default here.
DEFAULT_SCAD_A = 2.1


def _abs_input(phi):
    arr = np.asarray(phi, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("penalty argument must be finite")
    return arr


def _nonneg_input(phi):
    arr = _abs_input(phi)
    if np.any(arr < 0):
        raise InvalidInputError("penalty derivatives are defined on |phi| >= 0")
    return arr


def _match(value, template):
    if np.isscalar(template) or getattr(template, "ndim", 1) == 0:
        return float(value)
    return value


@dataclass(frozen=True)
class PenaltySpec:
    """Penalty p_lambda(|phi|): SCAD(lam, a) or LASSO(lam)."""

    kind: str
    lam: float
    a: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.lam) or self.lam < 0:
            raise InvalidInputError("lambda must be nonnegative and finite")
        if self.kind == SCAD:
            if self.a is None or not math.isfinite(self.a) or self.a <= 2:
                raise InvalidInputError("SCAD requires a > 2")
        elif self.kind == LASSO:
            if self.a is not None:
                raise InvalidInputError("LASSO takes no second tuning parameter")
        else:
            raise InvalidInputError(f"unknown penalty kind {self.kind!r}")

    def value(self, phi):
        """p_lambda(|phi|); accepts any sign, scalar or array."""
        u = np.abs(_abs_input(phi))
        lam = self.lam
        if self.kind == LASSO:
            return _match(lam * u, phi)
        a = self.a
        mid = (a * lam * u - u**2 / 2.0 - lam**2 / 2.0) / (a - 1.0)
        out = np.where(
            u <= lam, lam * u, np.where(u < a * lam, mid, (a + 1.0) * lam**2 / 2.0)
        )
        return _match(out, phi)

    def derivative(self, phi):
        """p'_lambda(u) for u = |phi| >= 0; raises on negative input."""
        u = _nonneg_input(phi)
        lam = self.lam
        if self.kind == LASSO:
            return _match(np.full_like(u, lam), phi)
        a = self.a
        out = np.where(u <= lam, lam, np.maximum(a * lam - u, 0.0) / (a - 1.0))
        return _match(out, phi)

    def second_derivative(self, phi):
        """p''_lambda(u) for u >= 0; zero at the knots by convention."""
        u = _nonneg_input(phi)
        lam = self.lam
        if self.kind == LASSO:
            return _match(np.zeros_like(u), phi)
        a = self.a
        inside = (u > lam) & (u < a * lam)
        out = np.where(inside, -1.0 / (a - 1.0), 0.0)
        return _match(out, phi)

    def weights(self, pilot) -> np.ndarray:
        """Tangent slopes p'(|pilot_j|) used by the one-step LLA surrogate."""
        return np.atleast_1d(np.asarray(self.derivative(np.abs(_abs_input(pilot)))))

    def max_nonzero_derivative(self, coefficients) -> float:
        """a_N = max{ p'(|phi_j|) : phi_j != 0 } over a true coefficient vector."""
        arr = _abs_input(coefficients)
        nz = np.abs(arr[arr != 0.0])
        if nz.size == 0:
            return 0.0
        return float(np.max(self.derivative(nz)))

    def bias_vanishes(self, coefficients) -> bool:
        """True when the penalty exerts no pull on any nonzero coefficient.

        For SCAD this happens exactly when min |phi_j| over the nonzero
        coefficients is >= a*lambda; for LASSO only when lambda == 0.
        """
        return self.max_nonzero_derivative(coefficients) == 0.0


def scad(lam: float, a: float = DEFAULT_SCAD_A) -> PenaltySpec:
    return PenaltySpec(SCAD, lam, a)


def lasso(lam: float) -> PenaltySpec:
    return PenaltySpec(LASSO, lam)
