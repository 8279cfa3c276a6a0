"""Conditional MLE, one-step LLA penalized estimation, tuning, standard errors.

The penalized fit follows the one-step local linear approximation: a pilot
unpenalized MLE theta_tilde supplies tangent weights w_j = p'(|theta_tilde_j|),
and the weighted-l1 problem

    maximize  L(theta) - N * sum_j w_j |phi_j|

is solved exactly.  Soft-thresholding inside the coordinate solver is what
produces exact (bit-zero) zeros; nothing is truncated after the fact.

Tuning follows a chronological split: fit on the first fraction of the
series, score each candidate by the unpenalized conditional likelihood on the
remaining block (conditioning lags taken from the end of the training block),
then refit at the winner on the full series.  Ties prefer the larger lambda.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .ar_core import as_series
from .errors import ConvergenceError, DegenerateDataError, InvalidInputError
from .innovations import InnovationFamily
from .likelihood import ConditionalLikelihood
from .penalty import LASSO, SCAD, PenaltySpec, lasso, scad

NEWTON_MAX_ITER = 100
PROX_NEWTON_MAX_ITER = 200
MAX_COORDINATE_SWEEPS = 10_000
MAX_STEP_HALVINGS = 50
KKT_TOL = 1e-8
# Gradient-norm convergence for the unpenalized MLE, scaled by the effective
# sample size.
GRAD_TOL_PER_TERM = 1e-8

METHOD_MLE = "mle"


@dataclass(frozen=True)
class FitDiagnostics:
    iterations: int
    grad_norm: float
    converged: bool
    holdout_loglik: float | None = None


@dataclass(frozen=True)
class FitResult:
    """Outcome of a (penalized) conditional maximum likelihood fit.

    ``support`` holds the 1-based lags with nonzero estimates; ``std_errors``
    has one entry per lag and is exactly 0 off the support.
    """

    estimates: np.ndarray
    support: tuple[int, ...]
    std_errors: np.ndarray
    lambda_used: float | None
    a_used: float | None
    method: str
    diagnostics: FitDiagnostics

    @property
    def order(self) -> int:
        return int(self.estimates.size)


@dataclass(frozen=True)
class TuningGrid:
    """Candidate (lambda, a) values plus the chronological split fraction."""

    lambdas: tuple[float, ...]
    a_values: tuple[float, ...] | None = None
    split_fraction: float = 0.8

    def __post_init__(self):
        lams = tuple(float(v) for v in self.lambdas)
        if len(lams) == 0:
            raise InvalidInputError("lambda grid must be non-empty")
        if any(not math.isfinite(v) or v <= 0 for v in lams):
            raise InvalidInputError("lambda grid values must be positive and finite")
        object.__setattr__(self, "lambdas", lams)
        if self.a_values is not None:
            avs = tuple(float(v) for v in self.a_values)
            if len(avs) == 0 or any(not math.isfinite(v) or v <= 2 for v in avs):
                raise InvalidInputError("a grid values must be finite and > 2")
            object.__setattr__(self, "a_values", avs)
        if not 0.0 < self.split_fraction < 1.0:
            raise InvalidInputError("split fraction must lie strictly between 0 and 1")


def geometric_grid(lo: float, hi: float, count: int) -> tuple[float, ...]:
    """Geometric lambda grid from lo to hi inclusive."""
    if lo <= 0 or hi < lo or count < 1:
        raise InvalidInputError("need 0 < lo <= hi and count >= 1")
    if count == 1:
        return (float(lo),)
    return tuple(np.geomspace(lo, hi, count))


def _support_lags(theta: np.ndarray) -> tuple[int, ...]:
    return tuple(int(j + 1) for j in np.flatnonzero(theta != 0.0))


def _objective_resolution(value: float) -> float:
    """Smallest objective improvement distinguishable in double precision."""
    return 64.0 * np.finfo(float).eps * (1.0 + abs(value))


def _kkt_violation(grad: np.ndarray, theta: np.ndarray, thresholds: np.ndarray) -> float:
    """Max subgradient violation of  max L(theta) - sum_j tau_j |theta_j|."""
    on = theta != 0.0
    viol_on = np.abs(grad[on] - thresholds[on] * np.sign(theta[on]))
    viol_off = np.maximum(np.abs(grad[~on]) - thresholds[~on], 0.0)
    pieces = np.concatenate([viol_on, viol_off])
    return float(pieces.max()) if pieces.size else 0.0


def _damped_cholesky(neg_hessian: np.ndarray):
    """Cholesky of -H, adding ridge damping until positive definite.

    Returns (factor, damping).  Raises ConvergenceError if no reasonable
    damping makes the curvature positive definite.
    """
    p = neg_hessian.shape[0]
    scale = max(1.0, float(np.abs(np.diag(neg_hessian)).max()))
    tau = 0.0
    for _ in range(60):
        try:
            factor = cho_factor(neg_hessian + tau * np.eye(p), lower=True)
            return factor, tau
        except LinAlgError:
            tau = max(tau * 10.0, 1e-10 * scale)
    raise ConvergenceError("curvature is not negative definite even after damping")


def _quadratic_l1_argmax(neg_hessian, grad, center, thresholds, tol, max_sweeps):
    """Coordinate maximizer of the local model

        m(z) = grad'(z - center) - (1/2)(z - center)' A (z - center)
               - sum_j tau_j |z_j|,      A = neg_hessian (PD after damping).

    Exact soft-threshold updates; zeros come out as bit-zeros.
    """
    a = neg_hessian
    diag = np.diag(a).copy()
    z = center.astype(float).copy()
    p = z.size
    for sweep in range(max_sweeps):
        # Fresh smooth-part gradient at z each sweep; incremental updates
        # within a sweep would drift below the 1e-8 stationarity target.
        v = grad - a @ (z - center)
        if _kkt_violation(v, z, thresholds) <= tol:
            return z, sweep
        moved = False
        for j in range(p):
            rho = v[j] + diag[j] * z[j]
            soft = max(abs(rho) - thresholds[j], 0.0)
            # positive zero, not -0.0: zeros are contractually bit-zero
            new = math.copysign(soft, rho) / diag[j] if soft > 0.0 else 0.0
            if new != z[j]:
                v -= a[:, j] * (new - z[j])
                z[j] = new
                moved = True
        if not moved:
            # No coordinate can improve; remaining violation is below what
            # double precision resolves on this problem.
            return z, sweep + 1
    raise ConvergenceError(
        "coordinate descent did not reach stationarity", last_estimates=z, iterations=max_sweeps
    )


def _mle_start(ctx: ConditionalLikelihood) -> np.ndarray:
    """Least-squares (conditional Yule-Walker) start for the Newton solve."""
    theta, _, rank, _ = np.linalg.lstsq(ctx.lag_matrix, ctx.targets, rcond=None)
    if rank < ctx.order:
        raise DegenerateDataError("singular normal equations (degenerate series)")
    return theta


def _newton_mle(ctx: ConditionalLikelihood, max_iter: int = NEWTON_MAX_ITER):
    """Damped Newton ascent of the conditional log-likelihood."""
    theta = _mle_start(ctx)
    tol = GRAD_TOL_PER_TERM * ctx.n_effective
    value = ctx.log_lik(theta)
    for iteration in range(max_iter):
        grad = ctx.gradient(theta)
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm < tol:
            return theta, FitDiagnostics(iteration, grad_norm, True)
        factor, _ = _damped_cholesky(-ctx.hessian(theta))
        direction = cho_solve(factor, grad)
        if grad @ direction <= 0.0:
            direction = grad  # fall back to steepest ascent
        predicted = 0.5 * float(grad @ direction)
        if predicted <= _objective_resolution(value):
            # Improvement underflows the float resolution of the objective;
            # take the full Newton step, which still shrinks the gradient.
            theta = theta + direction
            value = ctx.log_lik(theta)
            continue
        step = 1.0
        for _ in range(MAX_STEP_HALVINGS):
            candidate = theta + step * direction
            cand_value = ctx.log_lik(candidate)
            if cand_value > value:
                theta, value = candidate, cand_value
                break
            step /= 2.0
        else:
            raise ConvergenceError(
                "Newton step failed to increase the likelihood",
                last_estimates=theta,
                iterations=iteration,
            )
    grad_norm = float(np.linalg.norm(ctx.gradient(theta)))
    if grad_norm < tol:
        return theta, FitDiagnostics(max_iter, grad_norm, True)
    raise ConvergenceError(
        "maximum Newton iterations reached", last_estimates=theta, iterations=max_iter
    )


def _check_sample_size(x: np.ndarray, order: int):
    if order < 1:
        raise InvalidInputError("order must be at least 1")
    if x.size <= 3 * order:
        raise InvalidInputError("need N > 3p observations for a stable fit")


def fit_mle(series, order: int, innovation: InnovationFamily, *, compute_se: bool = True) -> FitResult:
    """Unpenalized conditional MLE.

    For Gaussian innovations this coincides with the least-squares solution of
    the lag regression (the likelihood is exactly quadratic); for Student-t it
    is a damped Newton ascent seeded by least squares.
    """
    x = as_series(series)
    _check_sample_size(x, order)
    ctx = ConditionalLikelihood(x, order, innovation)
    theta, diag = _newton_mle(ctx)
    support = _support_lags(theta)
    ses = np.zeros(order)
    if compute_se and support:
        ses_support = sandwich_se(ctx, _bare_fit(theta, support, METHOD_MLE, diag), None)
        ses[np.asarray(support) - 1] = ses_support
    return FitResult(theta, support, ses, None, None, METHOD_MLE, diag)


def _bare_fit(theta, support, method, diag, lam=None, a=None) -> FitResult:
    return FitResult(theta, support, np.zeros(theta.size), lam, a, method, diag)


def solve_weighted_l1(
    ctx: ConditionalLikelihood,
    weights,
    theta_init,
    *,
    tol: float = KKT_TOL,
    max_outer: int = PROX_NEWTON_MAX_ITER,
    max_sweeps: int = MAX_COORDINATE_SWEEPS,
) -> np.ndarray:
    """Maximize L(theta) - N * sum_j w_j |theta_j| for fixed weights w >= 0.

    Proximal Newton: the likelihood is replaced by its second-order expansion
    at the current iterate and the quadratic-plus-l1 subproblem is solved by
    exact coordinate descent.  For Gaussian innovations the expansion is the
    exact objective, so the first outer step already solves the lasso on the
    lag design.  Convergence is declared when every coordinate satisfies the
    subgradient condition within ``tol``.
    """
    theta, _ = _solve_weighted_l1(ctx, weights, theta_init, tol, max_outer, max_sweeps)
    return theta


def _solve_weighted_l1(ctx, weights, theta_init, tol, max_outer, max_sweeps):
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size != ctx.order:
        raise InvalidInputError("weights must have one entry per coefficient")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise InvalidInputError("weights must be nonnegative and finite")
    theta = np.asarray(theta_init, dtype=float).copy()
    if theta.size != ctx.order or not np.all(np.isfinite(theta)):
        raise InvalidInputError("theta_init must be finite and of matching length")

    thresholds = ctx.n_total * w
    penalty_term = lambda t: float(thresholds @ np.abs(t))
    objective = lambda t: ctx.log_lik(t) - penalty_term(t)

    value = objective(theta)
    gaussian_exact = ctx.innovation.family == "gaussian"
    for outer in range(1, max_outer + 1):
        grad = ctx.gradient(theta)
        if _kkt_violation(grad, theta, thresholds) <= tol:
            return theta, outer - 1
        factor_matrix = -ctx.hessian(theta)
        _, tau = _damped_cholesky(factor_matrix)
        model_curv = factor_matrix + tau * np.eye(ctx.order)
        inner_tol = tol * 0.5
        z, _ = _quadratic_l1_argmax(model_curv, grad, theta, thresholds, inner_tol, max_sweeps)
        if gaussian_exact and tau == 0.0:
            # Quadratic model is the exact objective: accept the solve.
            theta = z
            value = objective(theta)
            continue
        direction = z - theta
        predicted = (
            grad @ direction
            - 0.5 * direction @ (model_curv @ direction)
            - (penalty_term(z) - penalty_term(theta))
        )
        if predicted <= _objective_resolution(value):
            # Model improvement below float resolution: polish with the full
            # step instead of demanding a strictly larger objective.
            theta = z
            value = objective(theta)
            continue
        step = 1.0
        for _ in range(MAX_STEP_HALVINGS):
            candidate = theta + step * direction
            cand_value = objective(candidate)
            if cand_value > value:
                theta, value = candidate, cand_value
                break
            step /= 2.0
        else:
            if _kkt_violation(ctx.gradient(theta), theta, thresholds) <= tol:
                return theta, outer
            raise ConvergenceError(
                "proximal Newton step failed to improve the penalized objective",
                last_estimates=theta,
                iterations=outer,
            )
    if _kkt_violation(ctx.gradient(theta), theta, thresholds) <= tol:
        return theta, max_outer
    raise ConvergenceError(
        "weighted-l1 solver did not converge", last_estimates=theta, iterations=max_outer
    )


def fit_pcmle(
    series, order: int, innovation: InnovationFamily, pen: PenaltySpec, *, compute_se: bool = True
) -> FitResult:
    """One-step LLA penalized conditional MLE.

    Pilot MLE -> tangent weights p'(|pilot_j|) -> exact weighted-l1 solve.
    """
    x = as_series(series)
    _check_sample_size(x, order)
    ctx = ConditionalLikelihood(x, order, innovation)
    pilot, _ = _newton_mle(ctx)
    return _pcmle_on_ctx(ctx, pilot, pen, compute_se=compute_se)


def _pcmle_on_ctx(ctx, pilot, pen, *, compute_se=True, holdout_loglik=None) -> FitResult:
    w = pen.weights(pilot)
    theta, outer_iters = _solve_weighted_l1(
        ctx, w, pilot, KKT_TOL, PROX_NEWTON_MAX_ITER, MAX_COORDINATE_SWEEPS
    )
    grad_norm = _kkt_violation(ctx.gradient(theta), theta, ctx.n_total * w)
    diag = FitDiagnostics(outer_iters, grad_norm, True, holdout_loglik)
    support = _support_lags(theta)
    method = f"{pen.kind}_pcmle"
    ses = np.zeros(ctx.order)
    if compute_se and support:
        fit = _bare_fit(theta, support, method, diag, pen.lam, pen.a)
        ses[np.asarray(support) - 1] = sandwich_se(ctx, fit, pen)
    return FitResult(theta, support, ses, pen.lam, pen.a, method, diag)


def _candidate_penalties(kind: str, grid: TuningGrid):
    """Deterministic candidate order: lambda descending, then a ascending.

    The first strict maximum wins, so ties in the holdout score resolve
    toward the larger (sparser) lambda.
    """
    lams = sorted(grid.lambdas, reverse=True)
    if kind == SCAD:
        a_values = grid.a_values if grid.a_values is not None else (2.1,)
        return [scad(lam, a) for lam in lams for a in sorted(a_values)]
    if kind == LASSO:
        return [lasso(lam) for lam in lams]
    raise InvalidInputError(f"unknown penalty kind {kind!r}")


def tune(series, order: int, innovation: InnovationFamily, kind: str, grid: TuningGrid) -> FitResult:
    """Select (lambda, a) on a chronological holdout and refit on the full series.

    The first ``split_fraction`` of the sample trains each candidate; the
    unpenalized conditional log-likelihood of the fitted coefficients on the
    remaining block is the selection score.  The first p holdout terms
    condition on the last p training observations, so every holdout point is
    scored and nothing looks ahead.
    """
    x = as_series(series)
    _check_sample_size(x, order)
    n = x.size
    split = int(math.floor(grid.split_fraction * n))
    if split <= 3 * order or (n - split) <= 3 * order:
        raise InvalidInputError("degenerate train/holdout split for this order")

    train_ctx = ConditionalLikelihood(x[:split], order, innovation)
    holdout_ctx = ConditionalLikelihood(x[split - order :], order, innovation)
    pilot, _ = _newton_mle(train_ctx)

    best = None
    best_score = -math.inf
    for pen in _candidate_penalties(kind, grid):
        w = pen.weights(pilot)
        theta, _ = _solve_weighted_l1(
            train_ctx, w, pilot, KKT_TOL, PROX_NEWTON_MAX_ITER, MAX_COORDINATE_SWEEPS
        )
        score = holdout_ctx.log_lik(theta)
        if score > best_score:
            best, best_score = pen, score

    full_ctx = ConditionalLikelihood(x, order, innovation)
    full_pilot, _ = _newton_mle(full_ctx)
    return _pcmle_on_ctx(full_ctx, full_pilot, best, holdout_loglik=best_score)


def sandwich_se(ctx: ConditionalLikelihood, fit: FitResult, pen: PenaltySpec | None) -> np.ndarray:
    """Sandwich standard errors on the support coordinates.

    With H the likelihood Hessian at the estimate restricted to the support,
    Sigma the diagonal p'(|phi_j|)/|phi_j|, and G the outer product of
    per-term gradient contributions, the covariance estimate is

        (H - N Sigma)^{-1} G (H - N Sigma)^{-1}.

    For SCAD fits whose support coefficients sit beyond a*lambda the Sigma
    term vanishes and this reduces to the plain information sandwich.
    """
    if not fit.support:
        raise InvalidInputError("standard errors require a non-empty support")
    idx = np.asarray(fit.support, dtype=int) - 1
    theta = np.asarray(fit.estimates, dtype=float)
    h = ctx.hessian(theta)[np.ix_(idx, idx)]
    contributions = ctx.score_contributions(theta)[:, idx]
    meat = contributions.T @ contributions
    bracket = h.copy()
    if pen is not None:
        active = np.abs(theta[idx])
        bracket -= ctx.n_total * np.diag(pen.derivative(active) / active)
    try:
        inv = np.linalg.inv(bracket)
    except np.linalg.LinAlgError as exc:
        raise DegenerateDataError("singular sandwich bracket matrix") from exc
    cov = inv @ meat @ inv.T
    variances = np.clip(np.diag(cov), 0.0, None)
    return np.sqrt(variances)
