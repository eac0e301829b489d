"""Log-log order fits shared by all convergence checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class OrderFit:
    slope: float
    intercept: float
    stderr: float        # 1-sigma width of the slope
    residual_max: float  # max |log-residual|
    n: int


def fit_order(eps: Sequence[float], values: Sequence[float]) -> OrderFit:
    """Least-squares slope of log(value) against log(eps).

    Requires >= 3 positive ladder points; the slope is the measured
    convergence order, stderr its regression width.
    """
    e = np.asarray(eps, dtype=float)
    v = np.asarray(values, dtype=float)
    if e.size < 3:
        raise ValueError("order fit needs at least 3 ladder points")
    if np.any(v <= 0.0) or np.any(e <= 0.0):
        raise ValueError("order fit requires positive values")
    x = np.log(e)
    y = np.log(v)
    A = np.vstack([x, np.ones_like(x)]).T
    coef, res, *_ = np.linalg.lstsq(A, y, rcond=None)
    fit = A @ coef
    resid = y - fit
    dof = max(e.size - 2, 1)
    sxx = float(np.sum((x - x.mean()) ** 2))
    stderr = float(np.sqrt(np.sum(resid**2) / dof / sxx)) if sxx > 0 else np.inf
    return OrderFit(slope=float(coef[0]), intercept=float(coef[1]),
                    stderr=stderr, residual_max=float(np.max(np.abs(resid))),
                    n=int(e.size))


def monotone_decreasing(values: Sequence[float], strict: bool = True) -> bool:
    v = list(values)
    pairs = zip(v[:-1], v[1:])
    return all(a > b for a, b in pairs) if strict else all(a >= b for a, b in pairs)
