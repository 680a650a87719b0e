"""
Least-squares power-law fits for sweep reports.
"""
from dataclasses import dataclass
from typing import Iterable, Tuple
import logging

import numpy as np
from scipy import stats

from harmonic_core.errors import FitError

MIN_POINTS = 3

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PowerLawFit:
    slope: float
    intercept: float
    r_squared: float
    points: int
    log_log: bool = True

    def predict(self, x: float) -> float:
        if self.log_log:
            return float(np.exp(self.intercept) * x ** self.slope)
        return self.intercept + self.slope * x

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "points": self.points,
            "log_log": self.log_log,
        }


def fit_power_law(pairs: Iterable[Tuple[float, float]], log_log: bool = True) -> PowerLawFit:
    """
    Fit y = e^b x^a (log_log) or y = a x + b by least squares.

    Args:
        pairs: (x, y) samples, at least three
        log_log: Fit in log-log coordinates

    Returns:
        PowerLawFit; r_squared is 1 when y is exactly constant
    """
    data = np.asarray(list(pairs), dtype=float)
    if data.ndim != 2 or data.shape[0] < MIN_POINTS or data.shape[1] != 2:
        raise FitError(f"need at least {MIN_POINTS} (x, y) pairs, got {data.shape[0] if data.ndim == 2 else 0}")
    x, y = data[:, 0], data[:, 1]
    if not np.all(np.isfinite(data)):
        raise FitError("fit data contains non-finite values")
    if log_log:
        if np.any(x <= 0) or np.any(y <= 0):
            raise FitError("log-log fit needs positive x and y")
        x, y = np.log(x), np.log(y)
    if np.ptp(x) == 0:
        raise FitError("all x values coincide; slope undefined")

    fit = stats.linregress(x, y)
    residual = y - (fit.intercept + fit.slope * x)
    if np.ptp(y) == 0:
        r_squared = 1.0
    else:
        r_squared = float(1.0 - np.sum(residual ** 2) / np.sum((y - y.mean()) ** 2))
    return PowerLawFit(float(fit.slope), float(fit.intercept), r_squared, int(x.size), log_log)
