"""Kaplan-Meier survival estimation and per-level duration statistics."""

from __future__ import annotations

import csv
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Literal, Sequence

import numpy as np

from . import _kernels
from .propagation import LifetimeSample

__all__ = [
    "SurvivalCurve",
    "LevelStats",
    "EmptyInputError",
    "kaplan_meier",
    "sample_durations",
    "stratified_survival",
    "level_stats",
    "write_curves_csv",
    "write_stats_csv",
]

DurationField = Literal["cumulative", "level"]


class EmptyInputError(ValueError):
    """Survival estimation over zero observations."""


@dataclass(frozen=True)
class SurvivalCurve:
    """Product-limit estimate: one row per event time.

    ``at_risk[i]`` counts observations surviving just before
    ``event_times[i]``; censored observations leave the risk set without
    producing a row. ``survival`` is non-increasing within [0, 1] and equals
    1 before the first event time.
    """

    event_times: np.ndarray
    deaths: np.ndarray
    at_risk: np.ndarray
    survival: np.ndarray
    n_total: int

    def survival_at(self, t: float) -> float:
        """Step-function value of the estimate at time ``t``."""
        idx = bisect_right(self.event_times, t)
        return 1.0 if idx == 0 else float(self.survival[idx - 1])


def kaplan_meier(durations: Iterable[tuple[float, bool]]) -> SurvivalCurve:
    """Estimate the survival function from (days, censored) pairs.

    Ties at one time aggregate into a single factor; a censored observation
    at an event time stays at risk for that time's events.
    """
    pairs = list(durations)
    if not pairs:
        raise EmptyInputError("no durations to estimate from")
    times = np.array([d for d, _ in pairs], dtype=np.float64)
    events = np.array([0 if censored else 1 for _, censored in pairs], dtype=np.int64)
    if np.any(times < 0):
        raise ValueError("durations must be non-negative")
    t, d, r, s = _kernels.km_curve(times, events)
    return SurvivalCurve(t, d, r, s, n_total=len(pairs))


def _duration(sample: LifetimeSample, field: DurationField) -> int:
    if field == "cumulative":
        return sample.cumulative_days
    if field == "level":
        return sample.level_days
    raise ValueError(f"unknown duration field {field!r}")


def sample_durations(
    samples: Iterable[LifetimeSample],
    duration_field: DurationField,
    include_censored_as_events: bool = False,
) -> list[tuple[float, bool]]:
    """(days, censored) pairs for one duration field.

    ``include_censored_as_events`` reinterprets censored windows as plain
    durations (used by the moment tables to mirror corpora whose maxima sit
    at the observation-window end).
    """
    return [
        (float(_duration(s, duration_field)), s.censored and not include_censored_as_events)
        for s in samples
    ]


def stratified_survival(
    samples: Iterable[LifetimeSample],
    duration_field: DurationField = "cumulative",
) -> dict[int, SurvivalCurve]:
    """One Kaplan-Meier curve per dependency level present in the samples."""
    by_level: dict[int, list[LifetimeSample]] = {}
    for s in samples:
        by_level.setdefault(s.level, []).append(s)
    return {
        level: kaplan_meier(sample_durations(group, duration_field))
        for level, group in sorted(by_level.items())
    }


@dataclass(frozen=True)
class LevelStats:
    level: int
    mean: float
    std: float
    min: float
    q25: float
    median: float
    q75: float
    max: float
    count: int


def level_stats(
    samples: Iterable[LifetimeSample],
    duration_field: DurationField = "cumulative",
    include_censored_as_events: bool = False,
) -> list[LevelStats]:
    """Per-level moments and quantiles of the fix durations.

    Censored samples are excluded unless ``include_censored_as_events``;
    quantiles interpolate linearly between order statistics. Levels left
    with no usable sample are omitted.
    """
    by_level: dict[int, list[float]] = {}
    for s in samples:
        if s.censored and not include_censored_as_events:
            continue
        by_level.setdefault(s.level, []).append(float(_duration(s, duration_field)))

    stats = []
    for level in sorted(by_level):
        values = np.array(by_level[level], dtype=np.float64)
        q25, median, q75 = np.percentile(values, [25.0, 50.0, 75.0])
        stats.append(
            LevelStats(
                level=level,
                mean=float(values.mean()),
                std=float(values.std(ddof=1)) if values.size > 1 else 0.0,
                min=float(values.min()),
                q25=float(q25),
                median=float(median),
                q75=float(q75),
                max=float(values.max()),
                count=int(values.size),
            )
        )
    return stats


def write_curves_csv(curves: dict[int, SurvivalCurve], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["level", "t", "survival", "at_risk", "deaths"])
        for level, curve in sorted(curves.items()):
            for t, s, r, d in zip(
                curve.event_times, curve.survival, curve.at_risk, curve.deaths
            ):
                writer.writerow([level, f"{t:g}", f"{s:.10g}", int(r), int(d)])


def write_stats_csv(stats: Sequence[LevelStats], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["level", "mean", "std", "min", "q25", "median", "q75", "max", "count"])
        for row in stats:
            writer.writerow(
                [row.level, f"{row.mean:.6g}", f"{row.std:.6g}", f"{row.min:g}",
                 f"{row.q25:g}", f"{row.median:g}", f"{row.q75:g}", f"{row.max:g}", row.count]
            )
