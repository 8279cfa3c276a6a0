import math

import numpy as np
import pytest
from scipy import integrate

from sparse_ar import gaussian, student_t
from sparse_ar.errors import InvalidInputError

ALL_FAMILIES = [gaussian(1.0), gaussian(2.0), student_t(5.0), student_t(2.0)]


def test_gaussian_log_density_at_mode():
    assert gaussian(1.0).log_density(0.0) == pytest.approx(-0.5 * math.log(2 * math.pi), abs=1e-15)


def test_student_t_log_density_at_zero():
    expected = math.log(math.gamma(3.0) / (math.gamma(2.5) * math.sqrt(5 * math.pi)))
    assert student_t(5.0).log_density(0.0) == pytest.approx(expected, abs=1e-14)


def test_gaussian_sigma2_log_density_matches_normalized_density():
    fam = gaussian(2.0)
    # quadrature oracle: the implied density must integrate to one, so the
    # closed form can be checked against the normalized exponential directly
    total, _ = integrate.quad(lambda z: math.exp(fam.log_density(z)), -np.inf, np.inf)
    assert total == pytest.approx(1.0, abs=1e-10)
    assert fam.log_density(1.0) == pytest.approx(
        -0.5 * math.log(2 * math.pi * 4.0) - 1.0 / 8.0, abs=1e-10
    )


@pytest.mark.parametrize("fam", ALL_FAMILIES, ids=lambda f: f.label())
def test_density_integrates_to_one(fam):
    total, _ = integrate.quad(lambda z: math.exp(fam.log_density(z)), -np.inf, np.inf)
    assert total == pytest.approx(1.0, abs=1e-8)


def test_score_closed_forms():
    assert gaussian(1.0).score(0.7) == pytest.approx(-0.7, abs=1e-15)
    assert student_t(5.0).score(0.0) == 0.0
    assert gaussian(1.0).score_derivative(3.3) == -1.0
    assert gaussian(2.0).score_derivative(-1.1) == -0.25
    assert student_t(5.0).score_derivative(0.0) == pytest.approx(-6.0 / 5.0, abs=1e-15)


@pytest.mark.parametrize("fam", ALL_FAMILIES, ids=lambda f: f.label())
def test_score_matches_finite_difference_of_log_density(fam):
    h = 1e-6
    for z in [0.3, -1.7, 2.4, 0.0, 5.1]:
        fd = (fam.log_density(z + h) - fam.log_density(z - h)) / (2 * h)
        assert fam.score(z) == pytest.approx(fd, rel=1e-6, abs=1e-9)


@pytest.mark.parametrize("fam", ALL_FAMILIES, ids=lambda f: f.label())
def test_score_derivative_matches_finite_difference_of_score(fam, rng):
    h = 1e-6
    for z in rng.uniform(-4, 4, size=20):
        fd = (fam.score(z + h) - fam.score(z - h)) / (2 * h)
        assert fam.score_derivative(z) == pytest.approx(fd, rel=1e-6, abs=1e-8)


def test_information_constant_gaussian():
    assert gaussian(1.0).information_constant() == pytest.approx(1.0, abs=1e-12)
    assert gaussian(2.0).information_constant() == pytest.approx(0.25, abs=1e-12)


def test_information_constant_student_t_quadrature():
    # Location Fisher information of t_df is (df+1)/(df+3); the quadrature
    # path must reproduce it without being told.
    for df in (5.0, 7.0, 12.0):
        assert student_t(df).information_constant() == pytest.approx(
            (df + 1) / (df + 3), abs=1e-9
        )


def test_information_constant_requires_df_above_two():
    with pytest.raises(InvalidInputError):
        student_t(2.0).information_constant()


def test_sampling_is_deterministic_per_seed():
    fam = student_t(5.0)
    a = fam.sample(1000, 42)
    b = fam.sample(1000, 42)
    c = fam.sample(1000, 43)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_gaussian_sample_variance():
    n = 1_000_000
    z = gaussian(1.0).sample(n, 7)
    se = math.sqrt(2.0 / (n - 1))  # SE of the sample variance under normality
    assert abs(z.var(ddof=1) - 1.0) < 5 * se


def test_student_t_sample_variance():
    n = 1_000_000
    df = 5.0
    z = student_t(df).sample(n, 11)
    target = df / (df - 2)  # raw t, not standardized to unit variance
    mu4 = 3 * df**2 / ((df - 2) * (df - 4))
    se = math.sqrt((mu4 - target**2) / n)
    assert abs(z.var(ddof=1) - target) < 5 * se


@pytest.mark.parametrize("fam", [gaussian(1.0), gaussian(2.0), student_t(5.0)],
                         ids=lambda f: f.label())
def test_score_has_mean_zero(fam):
    z = fam.sample(1_000_000, 3)
    s = fam.score(z)
    assert abs(s.mean()) < 5 * s.std() / math.sqrt(z.size)


@pytest.mark.parametrize("fam", [gaussian(1.0), student_t(5.0)], ids=lambda f: f.label())
def test_score_derivative_mean_is_minus_information(fam):
    z = fam.sample(1_000_000, 5)
    sd = fam.score_derivative(z)
    cg = fam.information_constant()
    assert abs(sd.mean() + cg) <= 5 * sd.std() / math.sqrt(z.size) + 1e-12


def test_assumptions_2_flag():
    assert gaussian(1.0).satisfies_assumptions_2
    assert student_t(5.0).satisfies_assumptions_2
    assert student_t(4.5).satisfies_assumptions_2
    assert not student_t(4.0).satisfies_assumptions_2
    assert not student_t(2.0).satisfies_assumptions_2


def test_variance_values():
    assert gaussian(2.0).variance() == 4.0
    assert student_t(5.0).variance() == pytest.approx(5.0 / 3.0)
    assert math.isinf(student_t(2.0).variance())
    assert not student_t(2.0).has_finite_variance


def test_invalid_parameters_rejected():
    with pytest.raises(InvalidInputError):
        gaussian(0.0)
    with pytest.raises(InvalidInputError):
        gaussian(-1.0)
    with pytest.raises(InvalidInputError):
        student_t(0.0)
    with pytest.raises(InvalidInputError):
        gaussian(1.0).log_density(np.inf)
    with pytest.raises(InvalidInputError):
        student_t(5.0).score(np.nan)


def test_vectorized_evaluation_matches_scalars():
    fam = student_t(5.0)
    z = np.array([-2.0, 0.0, 1.5])
    assert np.allclose(fam.log_density(z), [fam.log_density(v) for v in z])
    assert np.allclose(fam.score(z), [fam.score(v) for v in z])
    assert np.allclose(fam.score_derivative(z), [fam.score_derivative(v) for v in z])
