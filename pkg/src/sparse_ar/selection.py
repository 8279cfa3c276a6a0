"""Classical AR order selection by the Final Prediction Error criterion.

FPE(p) = sigma2_p * (N + p) / (N - p) with sigma2_p = SSR_p / (N - p), the
Akaike (1970) form.  Candidate orders are fit by Gaussian conditional MLE
(least squares on the lag regression) regardless of the true innovation law,
matching conventional practice for this baseline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ar_core import as_series
from .errors import DegenerateDataError, InvalidInputError


@dataclass(frozen=True)
class OrderSelection:
    orders: tuple[int, ...]
    criteria: tuple[float, ...]
    sigma2: tuple[float, ...]
    ssr: tuple[float, ...]
    chosen_order: int


def fpe_select(series, p_max: int) -> OrderSelection:
    """Pick the AR order in 1..p_max minimizing FPE; ties go to the smaller order."""
    x = as_series(series)
    n = x.size
    if p_max < 1:
        raise InvalidInputError("p_max must be at least 1")
    if n <= 3 * p_max:
        raise InvalidInputError("need N > 3 * p_max observations")

    orders, criteria, sigma2s, ssrs = [], [], [], []
    for p in range(1, p_max + 1):
        design = np.column_stack([x[p - j : n - j] for j in range(1, p + 1)])
        y = x[p:]
        theta, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
        if rank < p:
            raise DegenerateDataError(f"singular lag regression at order {p}")
        resid = y - design @ theta
        ssr = float(resid @ resid)
        s2 = ssr / (n - p)
        orders.append(p)
        ssrs.append(ssr)
        sigma2s.append(s2)
        criteria.append(s2 * (n + p) / (n - p))

    chosen = orders[int(np.argmin(criteria))]  # argmin takes the first minimum
    return OrderSelection(tuple(orders), tuple(criteria), tuple(sigma2s), tuple(ssrs), chosen)
