"""Exception hierarchy shared across the package."""


class SparseArError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(SparseArError):
    """An argument violates a documented precondition."""


class ModelError(SparseArError):
    """The AR model itself is unusable (non-causal, infinite innovation variance)."""


class DegenerateDataError(SparseArError):
    """The data cannot support the requested computation (singular design, zero denominator)."""


class ConvergenceError(SparseArError):
    """An iterative solver failed to converge.

    Carries the last iterate so callers can inspect or report it.
    """

    def __init__(self, message, last_estimates=None, iterations=0):
        super().__init__(message)
        self.last_estimates = last_estimates
        self.iterations = iterations


class ConfigError(SparseArError):
    """A configuration file is malformed or contains unknown keys."""
