"""Replication harness: repeated simulate -> fit -> summarize experiments.

Per-replication seeds are derived from the master seed with a SplitMix64
chain, so replications can run on any number of worker threads and still
produce bit-identical summaries: each replication depends only on its own
derived seed, and aggregation order is fixed.

Coefficient patterns may depend on the sample size (terms carry an optional
power of N), which covers designs whose small coefficients shrink with N.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ar_core import ArModel, simulate
from .errors import ConvergenceError, InvalidInputError
from .estimator import FitResult, TuningGrid, fit_mle, tune
from .innovations import InnovationFamily

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

METHODS = ("mle", "lasso", "scad")


def _splitmix64(state: int) -> int:
    """One SplitMix64 output step (Steele, Lea & Flood's mix function)."""
    state = (state + GOLDEN_GAMMA) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, *keys: int) -> int:
    """Deterministic 64-bit seed from a master seed and integer keys."""
    state = master & MASK64
    for key in keys:
        state = _splitmix64(state ^ ((key * GOLDEN_GAMMA) & MASK64))
    return state


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """Wilson 95% score interval for a binomial proportion."""
    if trials <= 0:
        return 0.0, 1.0
    phat = successes / trials
    denom = 1.0 + z**2 / trials
    centre = (phat + z**2 / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z**2 / (4 * trials**2)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def two_proportion_z(successes_1: int, successes_2: int, trials: int) -> float:
    """Pooled two-sample z statistic for equal proportions (equal trial counts)."""
    p1 = successes_1 / trials
    p2 = successes_2 / trials
    pooled = (successes_1 + successes_2) / (2 * trials)
    var = pooled * (1 - pooled) * 2 / trials
    if var == 0.0:
        return 0.0
    return (p1 - p2) / math.sqrt(var)


@dataclass(frozen=True)
class CoefficientTerm:
    """One nonzero coefficient: value = base * N**n_power at sample size N."""

    lag: int
    base: float
    n_power: float = 0.0

    def __post_init__(self):
        if self.lag < 1:
            raise InvalidInputError("lag must be at least 1")
        if not math.isfinite(self.base) or not math.isfinite(self.n_power):
            raise InvalidInputError("coefficient term must be finite")


@dataclass(frozen=True)
class ModelPattern:
    """Sparse coefficient layout of the data-generating AR model."""

    order: int
    terms: tuple[CoefficientTerm, ...]

    def __post_init__(self):
        if self.order < 1:
            raise InvalidInputError("order must be at least 1")
        lags = [t.lag for t in self.terms]
        if len(set(lags)) != len(lags):
            raise InvalidInputError("duplicate lag in model pattern")
        if any(t.lag > self.order for t in self.terms):
            raise InvalidInputError("term lag exceeds the model order")
        object.__setattr__(self, "terms", tuple(self.terms))

    def coefficients(self, n: int) -> np.ndarray:
        phi = np.zeros(self.order)
        for term in self.terms:
            phi[term.lag - 1] = term.base * n**term.n_power
        return phi

    def zero_lags(self, n: int) -> tuple[int, ...]:
        phi = self.coefficients(n)
        return tuple(int(j + 1) for j in np.flatnonzero(phi == 0.0))


@dataclass(frozen=True)
class ExperimentDesign:
    """Everything needed to reproduce one simulation experiment."""

    pattern: ModelPattern
    innovation: InnovationFamily
    sample_sizes: tuple[int, ...]
    replications: int
    methods: tuple[str, ...]
    master_seed: int
    scad_grid: TuningGrid | None = None
    lasso_grid: TuningGrid | None = None
    burn_in: int = 1000

    def __post_init__(self):
        if self.replications < 1:
            raise InvalidInputError("need at least one replication")
        if not self.sample_sizes or any(n < 1 for n in self.sample_sizes):
            raise InvalidInputError("sample sizes must be positive")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise InvalidInputError(f"unknown methods: {sorted(unknown)}")
        if "scad" in self.methods and self.scad_grid is None:
            raise InvalidInputError("scad method requires a scad tuning grid")
        if "lasso" in self.methods and self.lasso_grid is None:
            raise InvalidInputError("lasso method requires a lasso tuning grid")
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        object.__setattr__(self, "methods", tuple(self.methods))


@dataclass(frozen=True)
class ReplicationRecord:
    n: int
    replication: int
    seed: int
    method: str
    converged: bool
    estimates: np.ndarray | None
    lambda_used: float | None
    a_used: float | None


@dataclass(frozen=True)
class LagStats:
    lag: int
    true_value: float
    zero_probability: float
    wilson_low: float
    wilson_high: float
    average_bias: float | None


@dataclass(frozen=True)
class CellSummary:
    """Aggregates for one (method, sample size) cell."""

    method: str
    n: int
    replications: int
    failures: int
    lag_stats: tuple[LagStats, ...]
    all_zero_probability: float
    all_zero_wilson: tuple[float, float]
    l2_median: float | None
    l2_mean: float | None


@dataclass(frozen=True)
class McSummary:
    design: ExperimentDesign
    cells: tuple[CellSummary, ...]
    records: tuple[ReplicationRecord, ...]
    assumptions2_satisfied: bool

    def cell(self, method: str, n: int) -> CellSummary:
        for c in self.cells:
            if c.method == method and c.n == n:
                return c
        raise KeyError((method, n))


def _fit_one(design: ExperimentDesign, method: str, series) -> FitResult:
    if method == "mle":
        return fit_mle(series, design.pattern.order, design.innovation, compute_se=False)
    if method == "lasso":
        return tune(series, design.pattern.order, design.innovation, "lasso", design.lasso_grid)
    if method == "scad":
        return tune(series, design.pattern.order, design.innovation, "scad", design.scad_grid)
    raise InvalidInputError(f"unknown method {method!r}")


def _run_replication(design: ExperimentDesign, n: int, r: int) -> list[ReplicationRecord]:
    seed = derive_seed(design.master_seed, n, r)
    model = ArModel(design.pattern.coefficients(n), design.innovation)
    series = simulate(model, n, design.burn_in, seed)
    records = []
    for method in design.methods:
        try:
            fit = _fit_one(design, method, series)
            records.append(
                ReplicationRecord(n, r, seed, method, True, fit.estimates, fit.lambda_used, fit.a_used)
            )
        except ConvergenceError:
            # Count as "no zero" for selection probabilities; exclude from
            # bias and error averages.
            records.append(ReplicationRecord(n, r, seed, method, False, None, None, None))
    return records


def _summarize_cell(design, method, n, records) -> CellSummary:
    truth = design.pattern.coefficients(n)
    zero_lags = design.pattern.zero_lags(n)
    mine = [rec for rec in records if rec.method == method and rec.n == n]
    total = len(mine)
    good = [rec for rec in mine if rec.converged]
    failures = total - len(good)
    estimates = np.array([rec.estimates for rec in good]) if good else np.empty((0, truth.size))

    lag_stats = []
    for lag in range(1, truth.size + 1):
        zero_count = int(np.sum(estimates[:, lag - 1] == 0.0)) if len(good) else 0
        lo, hi = wilson_interval(zero_count, total)
        bias = (
            float(abs(np.mean(estimates[:, lag - 1]) - truth[lag - 1])) if len(good) else None
        )
        lag_stats.append(LagStats(lag, float(truth[lag - 1]), zero_count / total, lo, hi, bias))

    if zero_lags and len(good):
        idx = np.asarray(zero_lags) - 1
        all_zero_count = int(np.sum(np.all(estimates[:, idx] == 0.0, axis=1)))
    else:
        all_zero_count = 0
    lo, hi = wilson_interval(all_zero_count, total)

    if len(good):
        l2 = np.linalg.norm(estimates - truth, axis=1)
        l2_median, l2_mean = float(np.median(l2)), float(np.mean(l2))
    else:
        l2_median = l2_mean = None
    return CellSummary(
        method=method,
        n=n,
        replications=total,
        failures=failures,
        lag_stats=tuple(lag_stats),
        all_zero_probability=all_zero_count / total,
        all_zero_wilson=(lo, hi),
        l2_median=l2_median,
        l2_mean=l2_mean,
    )


def run_experiment(design: ExperimentDesign, threads: int = 1) -> McSummary:
    """Run every (sample size, replication) cell and aggregate.

    The summary is bit-identical for any ``threads`` value: work items carry
    their own derived seeds and results are reduced in a fixed order.
    """
    tasks = [(n, r) for n in design.sample_sizes for r in range(design.replications)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda t: _run_replication(design, *t), tasks))
    else:
        chunks = [_run_replication(design, n, r) for n, r in tasks]
    records = tuple(rec for chunk in chunks for rec in chunk)

    cells = tuple(
        _summarize_cell(design, method, n, records)
        for method in design.methods
        for n in design.sample_sizes
    )
    return McSummary(design, cells, records, design.innovation.satisfies_assumptions_2)


@dataclass(frozen=True)
class CurvePoint:
    method: str
    n: int
    lag: str  # "1".."p" or "both" for the simultaneous correct zeros
    probability: float


def probability_curve(summary: McSummary) -> tuple[CurvePoint, ...]:
    """Long-format zero-probability curve P(zero) vs N per lag and method."""
    points = []
    for cell in summary.cells:
        for stat in cell.lag_stats:
            points.append(CurvePoint(cell.method, cell.n, str(stat.lag), stat.zero_probability))
        points.append(CurvePoint(cell.method, cell.n, "both", cell.all_zero_probability))
    return tuple(points)
