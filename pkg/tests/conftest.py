import numpy as np
import pytest

from sparse_ar.montecarlo import CoefficientTerm, ModelPattern


def pacf_to_ar(partials) -> np.ndarray:
    """Durbin-Levinson map from partial autocorrelations in (-1, 1) to a
    causal AR coefficient vector; every output passes the causality check."""
    phi: list[float] = []
    for k, kappa in enumerate(partials, start=1):
        prev = phi
        phi = [prev[j] - kappa * prev[k - 2 - j] for j in range(k - 1)] + [kappa]
    return np.asarray(phi)


def random_causal_coefficients(rng, order, max_pacf=0.8) -> np.ndarray:
    return pacf_to_ar(rng.uniform(-max_pacf, max_pacf, size=order))


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


@pytest.fixture(scope="session")
def model8_pattern():
    """The sparse AR(5) with 0.2 at lags 1, 3, 5."""
    return ModelPattern(
        5, (CoefficientTerm(1, 0.2), CoefficientTerm(3, 0.2), CoefficientTerm(5, 0.2))
    )


@pytest.fixture(scope="session")
def model9_pattern():
    """AR(5) whose lag 3 and lag 5 coefficients shrink like N^(-3/4)."""
    return ModelPattern(
        5,
        (
            CoefficientTerm(1, 0.2),
            CoefficientTerm(3, 1.0, -0.75),
            CoefficientTerm(5, 0.5, -0.75),
        ),
    )
