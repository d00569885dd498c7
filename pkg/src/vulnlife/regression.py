"""Ordinary least squares of fix durations against dependency level."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = [
    "RegressionResult",
    "DegenerateLevelsError",
    "ols_fit",
    "months_rule",
    "AVERAGE_MONTH_DAYS",
]

AVERAGE_MONTH_DAYS = 30.44  # mean Gregorian month


class DegenerateLevelsError(ValueError):
    """All points share one level; the slope is unidentifiable."""


@dataclass(frozen=True)
class RegressionResult:
    intercept: float  # days at level 0
    slope: float  # days per level
    r_squared: float
    n_points: int

    def predict(self, level: float) -> float:
        return self.intercept + self.slope * level


def ols_fit(points: Iterable[tuple[float, float]]) -> RegressionResult:
    """Closed-form least squares over (level, duration_days) points.

    R-squared is 1 - SS_res/SS_tot, defined as 1.0 for an exactly flat,
    exactly fitted response.
    """
    pts = list(points)
    if len(pts) < 2:
        raise ValueError(f"need at least 2 points, got {len(pts)}")
    x = np.array([p[0] for p in pts], dtype=np.float64)
    y = np.array([p[1] for p in pts], dtype=np.float64)
    sxx = float(np.sum((x - x.mean()) ** 2))
    if sxx == 0.0:
        raise DegenerateLevelsError("all points lie at one level")

    slope = float(np.sum((x - x.mean()) * (y - y.mean())) / sxx)
    intercept = float(y.mean() - slope * x.mean())
    residuals = y - (intercept + slope * x)
    ss_res = float(residuals @ residuals)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return RegressionResult(intercept, slope, max(0.0, min(1.0, r_squared)), len(pts))


def months_rule(result: RegressionResult) -> tuple[int, int]:
    """Collapse a fit in days into whole months: (slope, intercept)."""
    return (
        round(result.slope / AVERAGE_MONTH_DAYS),
        round(result.intercept / AVERAGE_MONTH_DAYS),
    )
