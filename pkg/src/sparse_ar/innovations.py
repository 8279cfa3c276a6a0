"""Innovation distributions for AR processes.

Two families are supported: Gaussian with scale ``sigma`` and Student-t with
``df`` degrees of freedom.  The Student-t family is used in raw
(unstandardized) form, so its variance is ``df / (df - 2)`` rather than 1;
this matters when converting between innovation scale and process variance.

Each family exposes the log density, the score ``g'(z)/g(z)``, the derivative
of the score (i.e. the second derivative of ``log g``), a reproducible
sampler, and the information constant ``C(g) = E[(g'(Z)/g(Z))^2]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import InvalidInputError

GAUSSIAN = "gaussian"
STUDENT_T = "student_t"

_LOG_2PI = math.log(2.0 * math.pi)


def _as_finite_array(z):
    arr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("innovation argument must be finite")
    return arr


def _match(value, template):
    """Return a scalar if the input was scalar, else the array."""
    if np.isscalar(template) or getattr(template, "ndim", 1) == 0:
        return float(value)
    return value


@dataclass(frozen=True)
class InnovationFamily:
    """Descriptor for an innovation density ``g``.

    Parameters
    ----------
    family : str
        Either ``"gaussian"`` or ``"student_t"``.
    sigma : float, optional
        Scale of the Gaussian family (must be ``None`` for Student-t).
    df : float, optional
        Degrees of freedom of the Student-t family (must be ``None`` for
        Gaussian).
    """

    family: str
    sigma: float | None = None
    df: float | None = None

    def __post_init__(self):
        if self.family == GAUSSIAN:
            if self.df is not None:
                raise InvalidInputError("gaussian family takes no df")
            if self.sigma is None or not math.isfinite(self.sigma) or self.sigma <= 0:
                raise InvalidInputError("gaussian scale sigma must be positive and finite")
        elif self.family == STUDENT_T:
            if self.sigma is not None:
                raise InvalidInputError("student_t family takes no sigma")
            if self.df is None or not math.isfinite(self.df) or self.df <= 0:
                raise InvalidInputError("student_t df must be positive and finite")
        else:
            raise InvalidInputError(f"unknown innovation family {self.family!r}")

    # -- basic moments -------------------------------------------------

    def variance(self) -> float:
        """Var(Z); infinite for Student-t with df <= 2."""
        if self.family == GAUSSIAN:
            return self.sigma**2
        if self.df > 2:
            return self.df / (self.df - 2.0)
        return math.inf

    @property
    def has_finite_variance(self) -> bool:
        return math.isfinite(self.variance())

    @property
    def satisfies_assumptions_2(self) -> bool:
        """Full regularity (finite fourth moment plus score-moment bounds).

        Gaussian always qualifies; Student-t requires df > 4.
        """
        if self.family == GAUSSIAN:
            return True
        return self.df > 4

    # -- density and derivatives ---------------------------------------

    def log_density(self, z):
        """log g(z), finite for every finite z (both families have full support)."""
        arr = _as_finite_array(z)
        if self.family == GAUSSIAN:
            out = -0.5 * _LOG_2PI - math.log(self.sigma) - arr**2 / (2.0 * self.sigma**2)
        else:
            df = self.df
            const = (
                math.lgamma((df + 1.0) / 2.0)
                - math.lgamma(df / 2.0)
                - 0.5 * math.log(df * math.pi)
            )
            out = const - 0.5 * (df + 1.0) * np.log1p(arr**2 / df)
        return _match(out, z)

    def score(self, z):
        """g'(z)/g(z), the derivative of log g."""
        arr = _as_finite_array(z)
        if self.family == GAUSSIAN:
            out = -arr / self.sigma**2
        else:
            df = self.df
            out = -(df + 1.0) * arr / (df + arr**2)
        return _match(out, z)

    def score_derivative(self, z):
        """(g'/g)'(z) = (g''g - (g')^2)/g^2, the second derivative of log g."""
        arr = _as_finite_array(z)
        if self.family == GAUSSIAN:
            out = np.full_like(arr, -1.0 / self.sigma**2)
        else:
            df = self.df
            out = -(df + 1.0) * (df - arr**2) / (df + arr**2) ** 2
        return _match(out, z)

    # -- information constant ------------------------------------------

    def information_constant(self) -> float:
        """C(g) = E[(g'(Z)/g(Z))^2].

        Closed form 1/sigma^2 for the Gaussian family; adaptive quadrature on
        the whole line otherwise (absolute tolerance 1e-10).  For Student-t the
        integral requires df > 2 under the assumptions this package exposes.
        """
        if self.family == GAUSSIAN:
            return 1.0 / self.sigma**2
        if self.df <= 2:
            raise InvalidInputError("information constant requires student_t df > 2")

        def integrand(z):
            return self.score(z) ** 2 * math.exp(self.log_density(z))

        value, _ = integrate.quad(integrand, -np.inf, np.inf, epsabs=1e-12, epsrel=1e-12)
        return value

    # -- sampling --------------------------------------------------------

    def sample(self, n: int, seed) -> np.ndarray:
        """Draw n i.i.d. innovations; identical seed gives identical output.

        ``seed`` may be an integer or a ``numpy.random.Generator``.
        """
        if n < 0:
            raise InvalidInputError("sample count must be nonnegative")
        rng = np.random.default_rng(seed)
        if self.family == GAUSSIAN:
            return self.sigma * rng.standard_normal(n)
        return rng.standard_t(self.df, n)

    def label(self) -> str:
        if self.family == GAUSSIAN:
            return f"gaussian(sigma={self.sigma:g})"
        return f"student_t(df={self.df:g})"


def gaussian(sigma: float = 1.0) -> InnovationFamily:
    return InnovationFamily(GAUSSIAN, sigma=sigma)


def student_t(df: float) -> InnovationFamily:
    return InnovationFamily(STUDENT_T, df=df)
