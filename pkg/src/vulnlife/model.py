"""Generative model of depth-dependent vulnerability resolution times.

A vulnerability at dependency depth ``d`` resolves at rate
``beta(d) = k / (d + c)``; with ``alpha`` independent sequential resolution
stages the total resolution time is Gamma(alpha, beta(d)), giving the linear
expectation ``alpha * (d + c) / k``. For integer ``alpha`` the sampler can
draw stage-wise (a sum of alpha exponentials) instead of directly from the
Gamma, which is distributionally equivalent; both modes exist so the
equivalence can be checked empirically.

:func:`generate_corpus` turns the model into a synthetic release corpus: a
layered dependency DAG whose per-level fix delays are Gamma draws, emitted
in the exact shapes the ingestion pipeline consumes. Randomness is PCG64
seeded through ``SeedSequence``; corpus structure uses spawn key ``(0,)``
and the resolution delay of artifact ``i`` at level ``L`` uses spawn key
``(1, L, i)``, so corpora are reproducible regardless of generation order.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .depgraph import CveRecord, DependencyGraph, Release, compute_next_edges
from .versioning import parse_version

__all__ = [
    "ModelParams",
    "SyntheticCorpusSpec",
    "DegenerateRateError",
    "resolution_rate",
    "expected_resolution",
    "resolution_variance",
    "sample_resolution",
    "generate_corpus",
]

SamplingMode = Literal["auto", "stage", "direct"]


class DegenerateRateError(ValueError):
    """Raised when depth + c = 0 leaves the resolution rate undefined."""


@dataclass(frozen=True)
class ModelParams:
    """Resolution-model parameters: stage count, base rate, depth offset."""

    alpha: float = 2.0
    k: float = 0.02
    c: float = 1.0

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.k <= 0:
            raise ValueError("k must be positive")
        if self.c < 0:
            raise ValueError("c must be non-negative")

    @property
    def integer_stages(self) -> bool:
        return float(self.alpha).is_integer()


@dataclass(frozen=True)
class SyntheticCorpusSpec:
    """Shape of a synthetic corpus: a layered DAG of single-parent artifacts."""

    depth: int = 10
    artifacts_per_level: int = 100
    seed: int = 0
    publication_window: tuple[int, int] = (0, 0)  # inclusive days-since-epoch

    def __post_init__(self) -> None:
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.artifacts_per_level < 1:
            raise ValueError("artifacts_per_level must be >= 1")
        lo, hi = self.publication_window
        if hi < lo:
            raise ValueError("publication window must satisfy lo <= hi")


def resolution_rate(params: ModelParams, depth: int) -> float:
    """Fix rate at a dependency depth: k / (depth + c), decreasing in depth."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if depth + params.c == 0:
        raise DegenerateRateError("depth + c = 0 gives an infinite rate")
    return params.k / (depth + params.c)


def expected_resolution(params: ModelParams, depth: int) -> float:
    """Mean resolution time alpha * (depth + c) / k, linear in depth."""
    return params.alpha / resolution_rate(params, depth)


def resolution_variance(params: ModelParams, depth: int) -> float:
    return params.alpha / resolution_rate(params, depth) ** 2


def _resolve_rng(seed, rng) -> np.random.Generator:
    if rng is not None:
        return rng
    return np.random.default_rng(seed)


def sample_resolution(
    params: ModelParams,
    depth: int,
    seed: int | None = None,
    size: int | None = None,
    mode: SamplingMode = "auto",
    rng: np.random.Generator | None = None,
):
    """Draw resolution times at a depth; scalar for ``size=None``.

    ``stage`` mode sums ``alpha`` exponential stage times (integer alpha
    only); ``direct`` draws from the Gamma itself. ``auto`` picks stage-wise
    when alpha is integer and otherwise warns that the stage interpretation
    does not apply and falls back to direct sampling.
    """
    beta = resolution_rate(params, depth)
    generator = _resolve_rng(seed, rng)

    if mode == "auto":
        if params.integer_stages:
            mode = "stage"
        else:
            warnings.warn(
                "non-integer alpha has no stage interpretation; sampling the "
                "Gamma directly",
                stacklevel=2,
            )
            mode = "direct"

    if mode == "stage":
        if not params.integer_stages:
            raise ValueError("stage-wise sampling requires integer alpha")
        stages = int(params.alpha)
        draws = generator.exponential(1.0 / beta, (1 if size is None else size, stages))
        totals = draws.sum(axis=1)
    elif mode == "direct":
        totals = generator.gamma(params.alpha, 1.0 / beta, 1 if size is None else size)
    else:
        raise ValueError(f"unknown sampling mode {mode!r}")

    return float(totals[0]) if size is None else totals


_VULNERABLE = parse_version("1.0.0")
_FIXED = parse_version("1.0.1")


def _artifact_id(level: int, index: int) -> str:
    return f"sim:l{level}-a{index:04d}"


def generate_corpus(
    spec: SyntheticCorpusSpec,
    params: ModelParams,
    mode: SamplingMode = "auto",
) -> tuple[DependencyGraph, list[CveRecord]]:
    """Synthesize a corpus whose fix delays follow the resolution model.

    Every artifact has a vulnerable release 1.0.0 and a fix release 1.0.1
    whose gap is a resolution-time draw at the artifact's level. Each
    level-L artifact depends on one level-(L-1) artifact (vulnerable release
    on vulnerable release, fix on fix), and each level-0 artifact carries
    one advisory against its vulnerable release, published inside the
    publication window. Propagating those advisories therefore recovers
    per-level durations distributed per the model.
    """
    structure_rng = np.random.default_rng(np.random.SeedSequence(spec.seed, spawn_key=(0,)))
    per_level = spec.artifacts_per_level
    lo, hi = spec.publication_window

    parents = {}
    for level in range(1, spec.depth + 1):
        parents[level] = structure_rng.integers(0, per_level, size=per_level)
    publication = structure_rng.integers(lo, hi + 1, size=per_level)

    # Root (level-0 ancestor) of each artifact fixes its advisory-aligned
    # release day, so cumulative and per-level durations stay non-negative.
    roots = {0: np.arange(per_level)}
    for level in range(1, spec.depth + 1):
        roots[level] = roots[level - 1][parents[level]]

    releases = []
    dep_edges = []
    for level in range(spec.depth + 1):
        for index in range(per_level):
            artifact = _artifact_id(level, index)
            born = int(publication[roots[level][index]])
            duration_rng = np.random.default_rng(
                np.random.SeedSequence(spec.seed, spawn_key=(1, level, index))
            )
            delay = sample_resolution(params, level, mode=mode, rng=duration_rng)
            releases.append(Release(artifact, _VULNERABLE, born))
            releases.append(Release(artifact, _FIXED, born + round(delay)))
            if level > 0:
                parent = _artifact_id(level - 1, int(parents[level][index]))
                dep_edges.append(((artifact, _VULNERABLE), (parent, _VULNERABLE)))
                dep_edges.append(((artifact, _FIXED), (parent, _FIXED)))

    graph = compute_next_edges(DependencyGraph.build(releases, dep_edges))

    cves = []
    for index in range(per_level):
        artifact = _artifact_id(0, index)
        cves.append(
            CveRecord(
                cve_id=f"CVE-SIM-{index:04d}",
                published_at=int(publication[index]),
                affected={artifact: (_VULNERABLE,)},
            )
        )
    return graph, cves
