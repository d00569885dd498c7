"""Advisory propagation through reverse dependencies, and lifetime samples.

For one advisory, the youngest affected version of each directly affected
artifact is marked at level 0. A breadth-first sweep over reverse dependency
edges then marks dependents level by level: a release reached at level L+1
depends on a release retained at level L, every release keeps the minimum
level at which it is ever reached, and within one artifact at one level only
the youngest release is retained and propagated further.

Each retained release yields one :class:`LifetimeSample`. Its fix event is
its own successor release; when no successor exists the sample is
right-censored at the observation window end (latest release timestamp in
the graph unless overridden).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .depgraph import CveRecord, DependencyGraph, Release, ReleaseKey

__all__ = [
    "LifetimeSample",
    "FilterReport",
    "PropagationOutcome",
    "mark_direct",
    "propagate",
    "propagate_detailed",
    "propagate_all",
    "filter_samples",
    "write_samples_csv",
    "read_samples_csv",
]


@dataclass(frozen=True)
class LifetimeSample:
    """One (advisory, artifact, level) exposure observation.

    ``cumulative_days`` runs from advisory publication to the fixing release
    at this level; ``level_days`` from the faulty release itself to that fix.
    Censored samples measure to the observation window end instead and carry
    no ``fixed_at``.
    """

    cve_id: str
    artifact_id: str
    level: int
    cumulative_days: int
    level_days: int
    censored: bool
    fixed_at: int | None = None


@dataclass
class FilterReport:
    dropped_negative_level: int = 0
    dropped_negative_cumulative: int = 0

    @property
    def dropped_total(self) -> int:
        return self.dropped_negative_level + self.dropped_negative_cumulative

    def as_dict(self) -> dict[str, int]:
        return {
            "dropped_negative_level": self.dropped_negative_level,
            "dropped_negative_cumulative": self.dropped_negative_cumulative,
        }


@dataclass(frozen=True)
class PropagationOutcome:
    samples: tuple[LifetimeSample, ...]
    marks: dict[ReleaseKey, int]


def mark_direct(graph: DependencyGraph, cve: CveRecord) -> list[tuple[str, Release]]:
    """Level-0 marks: per affected artifact, its youngest affected release.

    Artifacts with no affected version present in the graph are skipped.
    """
    marks = []
    for artifact_id in sorted(cve.affected):
        versions = cve.affected[artifact_id]
        present = [v for v in versions if (artifact_id, v) in graph]
        if not present:
            continue
        marks.append((artifact_id, graph.release(artifact_id, max(present))))
    return marks


def _sample_for(
    graph: DependencyGraph, cve: CveRecord, release: Release, level: int, window_end: int
) -> LifetimeSample:
    fix = graph.next_release(release.key)
    if fix is None:
        return LifetimeSample(
            cve_id=cve.cve_id,
            artifact_id=release.artifact_id,
            level=level,
            cumulative_days=window_end - cve.published_at,
            level_days=window_end - release.released_at,
            censored=True,
        )
    return LifetimeSample(
        cve_id=cve.cve_id,
        artifact_id=release.artifact_id,
        level=level,
        cumulative_days=fix.released_at - cve.published_at,
        level_days=fix.released_at - release.released_at,
        censored=False,
        fixed_at=fix.released_at,
    )


def propagate_detailed(
    graph: DependencyGraph,
    cve: CveRecord,
    max_level: int = 10,
    observation_end: int | None = None,
) -> PropagationOutcome:
    """Full propagation for one advisory: samples plus (release -> level) marks.

    Pure function of its inputs; the graph is only read, so advisories may be
    propagated concurrently.
    """
    window_end = graph.observation_end if observation_end is None else observation_end
    samples: list[LifetimeSample] = []
    marks: dict[ReleaseKey, int] = {}

    frontier: list[Release] = []
    for _, release in mark_direct(graph, cve):
        marks[release.key] = 0
        samples.append(_sample_for(graph, cve, release, 0, window_end))
        frontier.append(release)

    level = 0
    while frontier and level < max_level:
        level += 1
        reached: dict[str, list[Release]] = {}
        for source in frontier:
            for dependent_key in graph.dependents_of(source.key):
                if dependent_key in marks:
                    continue  # already reached at a lower (minimal) level
                marks[dependent_key] = level
                release = graph.get(dependent_key)
                reached.setdefault(release.artifact_id, []).append(release)
        frontier = []
        for artifact_id in sorted(reached):
            youngest = max(reached[artifact_id], key=lambda r: r.version)
            samples.append(_sample_for(graph, cve, youngest, level, window_end))
            frontier.append(youngest)

    return PropagationOutcome(tuple(samples), marks)


def propagate(
    graph: DependencyGraph,
    cve: CveRecord,
    max_level: int = 10,
    observation_end: int | None = None,
) -> list[LifetimeSample]:
    """Lifetime samples for one advisory up to ``max_level``."""
    return list(propagate_detailed(graph, cve, max_level, observation_end).samples)


def propagate_all(
    graph: DependencyGraph,
    cves: Iterable[CveRecord],
    max_level: int = 10,
    observation_end: int | None = None,
    record: bool = False,
) -> list[LifetimeSample]:
    """Propagate every advisory independently and merge deterministically.

    With ``record=True`` the per-advisory marks are written back to
    ``graph.affected_edges`` (single-threaded callers only).
    """
    merged: list[LifetimeSample] = []
    for cve in cves:
        outcome = propagate_detailed(graph, cve, max_level, observation_end)
        if record:
            graph.record_affected(cve.cve_id, outcome.marks)
        merged.extend(outcome.samples)
    merged.sort(key=lambda s: (s.cve_id, s.level, s.artifact_id))
    return merged


def filter_samples(
    samples: Iterable[LifetimeSample],
) -> tuple[list[LifetimeSample], FilterReport]:
    """Drop samples with negative durations, counting drops per reason.

    Negative intervals come from inconsistent release metadata (successor
    predating its predecessor, or fixes predating publication) and would
    poison the survival statistics.
    """
    report = FilterReport()
    kept = []
    for sample in samples:
        bad = False
        if sample.level_days < 0:
            report.dropped_negative_level += 1
            bad = True
        if sample.cumulative_days < 0:
            report.dropped_negative_cumulative += 1
            bad = True
        if not bad:
            kept.append(sample)
    return kept, report


_CSV_HEADER = ["cve_id", "artifact_id", "level", "cumulative_days", "level_days", "censored"]


def write_samples_csv(samples: Sequence[LifetimeSample], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(_CSV_HEADER)
        for s in samples:
            writer.writerow(
                [s.cve_id, s.artifact_id, s.level, s.cumulative_days, s.level_days,
                 "true" if s.censored else "false"]
            )


def read_samples_csv(path: str | Path) -> list[LifetimeSample]:
    samples = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        missing = set(_CSV_HEADER) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: samples CSV missing columns {sorted(missing)}")
        for row in reader:
            samples.append(
                LifetimeSample(
                    cve_id=row["cve_id"],
                    artifact_id=row["artifact_id"],
                    level=int(row["level"]),
                    cumulative_days=int(row["cumulative_days"]),
                    level_days=int(row["level_days"]),
                    censored=row["censored"].strip().lower() == "true",
                )
            )
    return samples
