import math

import numpy as np
import pytest

from sparse_ar import (
    ArModel,
    ConditionalLikelihood,
    gaussian,
    lasso,
    scad,
    simulate,
    student_t,
    theoretical_autocov,
)
from sparse_ar.errors import InvalidInputError

from conftest import random_causal_coefficients

MODEL8 = np.array([0.2, 0.0, 0.2, 0.0, 0.2])


def _simulated_ctx(phi, fam, n, seed):
    model = ArModel(np.asarray(phi), fam)
    x = simulate(model, n, seed=seed)
    return ConditionalLikelihood(x, len(phi), fam)


def test_loglik_reduces_to_marginal_normal_for_zero_coefficients():
    fam = gaussian(1.0)
    x = fam.sample(400, 21)
    ctx = ConditionalLikelihood(x, 1, fam)
    expected = float(np.sum(-0.5 * math.log(2 * math.pi) - x[1:] ** 2 / 2.0))
    assert ctx.log_lik(np.zeros(1)) == pytest.approx(expected, rel=1e-13)


def test_loglik_matches_compensated_summation():
    ctx = _simulated_ctx(MODEL8, gaussian(1.0), 3000, 4)
    theta = MODEL8 + 0.01
    terms = ctx.innovation.log_density(ctx.residuals(theta))
    assert ctx.log_lik(theta) == pytest.approx(math.fsum(terms), rel=1e-12)


def test_loglik_is_pure():
    ctx = _simulated_ctx(MODEL8, student_t(5.0), 500, 8)
    theta = np.full(5, 0.1)
    assert ctx.log_lik(theta) == ctx.log_lik(theta)


@pytest.mark.parametrize("fam", [gaussian(1.0), gaussian(1.7), student_t(5.0)],
                         ids=lambda f: f.label())
def test_gradient_matches_central_differences(fam, rng):
    for trial in range(6):
        p = int(rng.integers(1, 6))
        phi = random_causal_coefficients(rng, p, max_pacf=0.6)
        ctx = _simulated_ctx(phi, fam, 200, 100 + trial)
        theta = phi + rng.normal(0, 0.05, size=p)
        grad = ctx.gradient(theta)
        for j in range(p):
            h = 1e-6 * (1.0 + abs(theta[j]))
            e = np.zeros(p)
            e[j] = h
            fd = (ctx.log_lik(theta + e) - ctx.log_lik(theta - e)) / (2 * h)
            assert grad[j] == pytest.approx(fd, rel=1e-6, abs=1e-6)


@pytest.mark.parametrize("fam", [gaussian(1.0), student_t(5.0)], ids=lambda f: f.label())
def test_hessian_matches_central_differences_of_gradient(fam, rng):
    for trial in range(4):
        p = int(rng.integers(1, 5))
        phi = random_causal_coefficients(rng, p, max_pacf=0.6)
        ctx = _simulated_ctx(phi, fam, 200, 200 + trial)
        theta = phi + rng.normal(0, 0.05, size=p)
        hess = ctx.hessian(theta)
        assert np.array_equal(hess, hess.T)
        for j in range(p):
            h = 1e-6 * (1.0 + abs(theta[j]))
            e = np.zeros(p)
            e[j] = h
            fd = (ctx.gradient(theta + e) - ctx.gradient(theta - e)) / (2 * h)
            assert np.allclose(hess[:, j], fd, rtol=1e-5, atol=1e-4 * ctx.n_effective)


def test_gaussian_hessian_is_scaled_gram_matrix():
    fam = gaussian(2.0)
    ctx = _simulated_ctx(MODEL8, fam, 600, 17)
    theta = np.full(5, 0.05)
    expected = -(ctx.lag_matrix.T @ ctx.lag_matrix) / 4.0
    assert np.allclose(ctx.hessian(theta), (expected + expected.T) / 2.0, rtol=1e-12)


def test_gradient_zero_when_all_lags_vanish():
    fam = gaussian(1.0)
    ctx = ConditionalLikelihood(np.array([0.0, 0.0, 0.0, 1.3]), 3, fam)
    assert np.array_equal(ctx.gradient(np.array([0.4, -0.2, 0.1])), np.zeros(3))


def test_score_contributions_sum_to_gradient():
    ctx = _simulated_ctx(MODEL8, student_t(5.0), 300, 5)
    theta = np.full(5, 0.12)
    assert np.allclose(ctx.score_contributions(theta).sum(axis=0), ctx.gradient(theta),
                       rtol=1e-10, atol=1e-10)


def test_penalized_objective_with_zero_lambda_is_loglik():
    ctx = _simulated_ctx(MODEL8, gaussian(1.0), 400, 6)
    theta = np.full(5, 0.1)
    assert ctx.penalized_objective(theta, scad(0.0, 2.1)) == ctx.log_lik(theta)
    assert ctx.penalized_objective(theta, lasso(0.0)) == ctx.log_lik(theta)


def test_penalized_objective_at_zero_vector():
    ctx = _simulated_ctx(MODEL8, gaussian(1.0), 400, 7)
    zero = np.zeros(5)
    assert ctx.penalized_objective(zero, scad(0.08, 2.1)) == ctx.log_lik(zero)


def test_penalized_objective_against_independent_piecewise_sum():
    # Table-style coefficients; the penalty sum is rebuilt with scalar
    # arithmetic, independent of the penalty module
    ctx = _simulated_ctx(MODEL8, gaussian(1.0), 1000, 9)
    theta = np.array([0.2015, 0.0, 0.2139, 0.0, 0.1705])
    lam, a = 0.08, 2.1

    def branch(u):
        u = abs(u)
        if u <= lam:
            return lam * u
        if u < a * lam:
            return (a * lam * u - u**2 / 2 - lam**2 / 2) / (a - 1)
        return (a + 1) * lam**2 / 2

    expected = ctx.log_lik(theta) - ctx.n_total * sum(branch(v) for v in theta)
    assert ctx.penalized_objective(theta, scad(lam, a)) == pytest.approx(expected, rel=1e-14)


def test_dimension_mismatch_raises():
    ctx = _simulated_ctx(MODEL8, gaussian(1.0), 100, 3)
    with pytest.raises(InvalidInputError):
        ctx.log_lik(np.zeros(4))
    with pytest.raises(InvalidInputError):
        ctx.gradient(np.array([np.inf] * 5))


def test_requires_more_data_than_order():
    with pytest.raises(InvalidInputError):
        ConditionalLikelihood(np.ones(5), 5, gaussian(1.0))


def test_per_term_average_converges_to_expected_log_density():
    # strong-law oracle: average log-likelihood per term at the truth tends
    # to E log g(Z)
    fam = student_t(5.0)
    model = ArModel(MODEL8, fam)
    x = simulate(model, 200_000, seed=31)
    ctx = ConditionalLikelihood(x, 5, fam)
    per_term = ctx.log_lik(MODEL8) / ctx.n_effective
    z = fam.sample(1_000_000, 77)
    lg = fam.log_density(z)
    tol = 6 * lg.std() * (ctx.n_effective**-0.5 + z.size**-0.5)
    assert abs(per_term - lg.mean()) < tol


def test_truth_dominates_other_parameters_on_average():
    # E l_t(theta_0) >= E l_t(theta): check the sample analogue at large N
    fam = gaussian(1.0)
    model = ArModel(MODEL8, fam)
    x = simulate(model, 100_000, seed=13)
    ctx = ConditionalLikelihood(x, 5, fam)
    base = ctx.log_lik(MODEL8)
    for shift in ([0.3, 0, 0, 0, 0], [0, 0.1, 0, 0, 0], [-0.1, 0.05, 0, 0.05, -0.1]):
        assert ctx.log_lik(MODEL8 + np.asarray(shift)) < base


def test_gradient_clt_covariance():
    # cov(grad / sqrt(N)) at the truth approaches C(g) * Gamma
    fam = gaussian(1.0)
    model = ArModel(MODEL8, fam)
    kernel = theoretical_autocov(model, 4)
    gamma = kernel.toeplitz()
    cg = fam.information_constant()
    n = 2000
    reps = 200
    grads = np.empty((reps, 5))
    for r in range(reps):
        x = simulate(model, n, seed=5000 + r)
        ctx = ConditionalLikelihood(x, 5, fam)
        grads[r] = ctx.gradient(MODEL8) / math.sqrt(n)
    emp = np.cov(grads, rowvar=False)
    assert np.all(np.abs(emp - cg * gamma) < 0.25 * cg * kernel[0])


@pytest.mark.parametrize("fam", [gaussian(1.0), student_t(5.0)], ids=lambda f: f.label())
def test_hessian_over_n_converges_to_information(fam):
    model = ArModel(MODEL8, fam)
    kernel = theoretical_autocov(model, 4)
    target = -fam.information_constant() * kernel.toeplitz()
    n = 10_000
    tol = 0.05 * kernel[0] * fam.information_constant()
    hits = 0
    for seed in range(20):
        x = simulate(model, n, seed=900 + seed)
        ctx = ConditionalLikelihood(x, 5, fam)
        if np.max(np.abs(ctx.hessian(MODEL8) / n - target)) < tol:
            hits += 1
    assert hits >= 18  # 90% of seeds
