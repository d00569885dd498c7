"""In-memory release/dependency store and corpus ingestion.

The graph holds releases keyed by (artifact, version), dependency edges
pointing from the dependent release to the release it depends on, derived
successor edges, and per-advisory affected marks. Corpora arrive as two CSV
files (releases, dependency edges) plus a JSON advisory file; the same
formats are emitted by the simulator, so simulated corpora round-trip
through ingestion.

File formats:

* releases CSV, header ``artifact_id,version,released_at`` (ISO-8601 date);
* deps CSV, header ``from_artifact,from_version,to_artifact,to_version``
  (from = dependent, to = dependency);
* advisories: JSON array of ``{id, published, affected: [{package,
  versions?, introduced?, fixed?}]}`` where ``introduced`` is inclusive and
  ``fixed`` exclusive.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .versioning import (
    UnparseableVersionError,
    Version,
    heuristic_next,
    parse_version,
    semver_next,
)

__all__ = [
    "Release",
    "CveRecord",
    "DependencyGraph",
    "IngestDiagnostics",
    "FormatError",
    "CycleDetectedError",
    "ingest_graph",
    "ingest_cves",
    "compute_next_edges",
    "days_from_iso",
    "iso_from_days",
    "write_releases_csv",
    "write_deps_csv",
    "write_cves_json",
]

log = logging.getLogger(__name__)

_EPOCH = date(1970, 1, 1)

ReleaseKey = tuple[str, Version]


class FormatError(ValueError):
    """A corpus file violates its declared format."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CycleDetectedError(ValueError):
    """The dependency edges contain a cycle at release granularity."""

    def __init__(self, path: list[ReleaseKey]):
        self.path = path
        pretty = " -> ".join(f"{a}:{v}" for a, v in path)
        super().__init__(f"dependency cycle: {pretty}")


def days_from_iso(text: str) -> int:
    """UTC days since 1970-01-01 for an ISO date (or datetime) string."""
    return (date.fromisoformat(text.strip()[:10]) - _EPOCH).days


def iso_from_days(days: int) -> str:
    return (_EPOCH + timedelta(days=int(days))).isoformat()


@dataclass(frozen=True)
class Release:
    """One published version of an artifact."""

    artifact_id: str
    version: Version
    released_at: int  # UTC days since epoch

    @property
    def key(self) -> ReleaseKey:
        return (self.artifact_id, self.version)


@dataclass(frozen=True)
class CveRecord:
    """A vulnerability advisory with its affected versions expanded.

    ``affected`` maps artifact coordinates to the known versions of that
    artifact matched by the advisory (possibly empty when nothing matched).
    """

    cve_id: str
    published_at: int
    affected: Mapping[str, tuple[Version, ...]]
    severity: str | None = None


@dataclass
class IngestDiagnostics:
    duplicate_releases: int = 0
    dropped_dangling_edges: int = 0
    duplicate_edges: int = 0
    unknown_artifact_advisories: int = 0
    unmatched_advisory_versions: int = 0

    def as_dict(self) -> dict[str, int]:
        return dict(vars(self))


class DependencyGraph:
    """Frozen store of releases, dependency edges, and derived edges.

    Built single-threaded via :meth:`build` (or :func:`ingest_graph`); after
    that, everything except :meth:`record_affected` treats the graph as
    read-only, so any number of workers may traverse it concurrently.
    """

    def __init__(self) -> None:
        self._releases: dict[ReleaseKey, Release] = {}
        self._by_artifact: dict[str, list[Release]] = {}
        self.dep_edges: set[tuple[ReleaseKey, ReleaseKey]] = set()
        self._dependents: dict[ReleaseKey, list[ReleaseKey]] = {}
        self._dependencies: dict[ReleaseKey, list[ReleaseKey]] = {}
        self.next_edges: dict[ReleaseKey, ReleaseKey] = {}
        self.affected_edges: dict[str, dict[ReleaseKey, int]] = {}
        self.diagnostics = IngestDiagnostics()

    @classmethod
    def build(
        cls,
        releases: Iterable[Release],
        dep_edges: Iterable[tuple[ReleaseKey, ReleaseKey]],
    ) -> "DependencyGraph":
        """Assemble and validate a graph.

        Duplicate (artifact, version) rows and duplicate edges are dropped
        with a diagnostic count, as are edges touching unknown releases.
        Raises :class:`CycleDetectedError` when the dependency edges are not
        acyclic at release granularity.
        """
        graph = cls()
        for rel in releases:
            if rel.key in graph._releases:
                graph.diagnostics.duplicate_releases += 1
                continue
            graph._releases[rel.key] = rel
            graph._by_artifact.setdefault(rel.artifact_id, []).append(rel)
        for releases_of_artifact in graph._by_artifact.values():
            releases_of_artifact.sort(key=lambda r: r.version)

        for src, dst in dep_edges:
            if src not in graph._releases or dst not in graph._releases:
                graph.diagnostics.dropped_dangling_edges += 1
                continue
            if (src, dst) in graph.dep_edges:
                graph.diagnostics.duplicate_edges += 1
                continue
            graph.dep_edges.add((src, dst))
            graph._dependencies.setdefault(src, []).append(dst)
            graph._dependents.setdefault(dst, []).append(src)

        if graph.diagnostics.dropped_dangling_edges:
            log.warning(
                "dropped %d dependency edge(s) referencing unknown releases",
                graph.diagnostics.dropped_dangling_edges,
            )
        graph._check_acyclic()
        return graph

    # -- accessors ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self._releases)

    def __contains__(self, key: ReleaseKey) -> bool:
        return key in self._releases

    def releases(self) -> Iterator[Release]:
        return iter(self._releases.values())

    def release(self, artifact_id: str, version: Version) -> Release:
        return self._releases[(artifact_id, version)]

    def get(self, key: ReleaseKey) -> Release | None:
        return self._releases.get(key)

    def artifacts(self) -> list[str]:
        return sorted(self._by_artifact)

    def releases_of(self, artifact_id: str) -> list[Release]:
        """Releases of one artifact in ascending version order."""
        return list(self._by_artifact.get(artifact_id, ()))

    def dependents_of(self, key: ReleaseKey) -> list[ReleaseKey]:
        """Releases that depend on ``key`` (reverse edges)."""
        return self._dependents.get(key, [])

    def dependencies_of(self, key: ReleaseKey) -> list[ReleaseKey]:
        return self._dependencies.get(key, [])

    def next_release(self, key: ReleaseKey) -> Release | None:
        nxt = self.next_edges.get(key)
        return self._releases[nxt] if nxt is not None else None

    @property
    def observation_end(self) -> int:
        """Latest release timestamp; default right-censoring horizon."""
        if not self._releases:
            return 0
        return max(r.released_at for r in self._releases.values())

    def record_affected(self, cve_id: str, marks: Mapping[ReleaseKey, int]) -> None:
        """Attach propagated (release -> level) marks for one advisory.

        Mutates the graph; call from the single orchestration thread only.
        """
        self.affected_edges[cve_id] = dict(marks)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DependencyGraph):
            return NotImplemented
        return (
            self._releases == other._releases
            and self.dep_edges == other.dep_edges
            and self.next_edges == other.next_edges
        )

    # -- validation --------------------------------------------------------

    def _check_acyclic(self) -> None:
        indegree = {key: 0 for key in self._releases}
        for _, dst in self.dep_edges:
            indegree[dst] += 1
        queue = [k for k, d in indegree.items() if d == 0]
        seen = 0
        while queue:
            node = queue.pop()
            seen += 1
            for dst in self._dependencies.get(node, ()):
                indegree[dst] -= 1
                if indegree[dst] == 0:
                    queue.append(dst)
        if seen == len(self._releases):
            return
        remaining = {k for k, d in indegree.items() if d > 0}
        raise CycleDetectedError(self._extract_cycle(remaining))

    def _extract_cycle(self, remaining: set[ReleaseKey]) -> list[ReleaseKey]:
        # Trim nodes merely downstream of a cycle so every survivor has a
        # successor inside the core, then walk successors until a repeat.
        core = set(remaining)
        out_count = {
            n: sum(1 for d in self._dependencies.get(n, ()) if d in core) for n in core
        }
        work = [n for n in core if out_count[n] == 0]
        while work:
            node = work.pop()
            core.discard(node)
            for pred in self._dependents.get(node, ()):
                if pred in core:
                    out_count[pred] -= 1
                    if out_count[pred] == 0:
                        work.append(pred)
        path: list[ReleaseKey] = []
        index: dict[ReleaseKey, int] = {}
        node = next(iter(core))
        while node not in index:
            index[node] = len(path)
            path.append(node)
            node = next(d for d in self._dependencies[node] if d in core)
        return path[index[node] :] + [node]


def _read_csv(path: str | Path, expected_header: list[str]) -> Iterator[tuple[int, list[str]]]:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty file, expected header {expected_header}") from None
        if [h.strip() for h in header] != expected_header:
            raise FormatError(f"{path}: bad header {header!r}, expected {expected_header}", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(expected_header):
                raise FormatError(f"expected {len(expected_header)} fields, got {len(row)}", lineno)
            yield lineno, [cell.strip() for cell in row]


def _parse_releases(path: str | Path) -> list[Release]:
    releases = []
    for lineno, row in _read_csv(path, ["artifact_id", "version", "released_at"]):
        try:
            parsed = parse_version(row[1])
            released_days = days_from_iso(row[2])
        except (UnparseableVersionError, ValueError) as exc:
            raise FormatError(str(exc), lineno) from exc
        releases.append(Release(row[0], parsed, released_days))
    return releases


def _parse_deps(path: str | Path) -> list[tuple[ReleaseKey, ReleaseKey]]:
    edges = []
    header = ["from_artifact", "from_version", "to_artifact", "to_version"]
    for lineno, row in _read_csv(path, header):
        try:
            src = (row[0], parse_version(row[1]))
            dst = (row[2], parse_version(row[3]))
        except UnparseableVersionError as exc:
            raise FormatError(str(exc), lineno) from exc
        edges.append((src, dst))
    return edges


def ingest_graph(releases_file: str | Path, deps_file: str | Path) -> DependencyGraph:
    """Load and validate a dependency graph from the two CSV files."""
    return DependencyGraph.build(_parse_releases(releases_file), _parse_deps(deps_file))


def compute_next_edges(graph: DependencyGraph) -> DependencyGraph:
    """Link every release to its computed successor.

    The successor is the semantic-versioning pick (smallest strictly greater
    sibling); where that yields nothing the heuristic lookup covers the
    entry. Releases without a strictly greater sibling get no edge.
    """
    graph.next_edges.clear()
    for artifact in graph.artifacts():
        siblings = graph.releases_of(artifact)
        versions = [r.version for r in siblings]
        timestamps = {r.version: r.released_at for r in siblings}
        for rel in siblings:
            candidates = [v for v in versions if v != rel.version]
            nxt = semver_next(rel.version, candidates)
            if nxt is None:
                nxt = heuristic_next(rel.version, candidates, timestamps)
            if nxt is not None:
                graph.next_edges[rel.key] = (artifact, nxt)
    return graph


def _expand_affected(
    entry: dict,
    graph: DependencyGraph,
    diagnostics: IngestDiagnostics,
    lineno_hint: str,
) -> tuple[str, tuple[Version, ...]]:
    package = entry.get("package")
    if not isinstance(package, str) or not package:
        raise FormatError(f"advisory {lineno_hint}: affected entry without a package")
    known = [r.version for r in graph.releases_of(package)]
    if not known:
        diagnostics.unknown_artifact_advisories += 1
        log.warning("advisory %s references unknown artifact %s", lineno_hint, package)
        return package, ()

    matched: set[Version] = set()
    if "versions" in entry:
        for text in entry["versions"]:
            try:
                wanted = parse_version(str(text))
            except UnparseableVersionError:
                diagnostics.unmatched_advisory_versions += 1
                continue
            if wanted in known:
                matched.add(wanted)
            else:
                diagnostics.unmatched_advisory_versions += 1
    if "introduced" in entry or "fixed" in entry:
        try:
            low = parse_version(str(entry.get("introduced", "0")))
            high = parse_version(str(entry["fixed"])) if "fixed" in entry else None
        except UnparseableVersionError as exc:
            raise FormatError(f"advisory {lineno_hint}: {exc}") from exc
        for v in known:
            if v >= low and (high is None or v < high):
                matched.add(v)
    return package, tuple(sorted(matched))


def ingest_cves(cve_file: str | Path, graph: DependencyGraph) -> list[CveRecord]:
    """Load advisories and expand their affected sets against the graph.

    Advisories naming artifacts absent from the graph are kept with an empty
    expansion and counted in ``graph.diagnostics``.
    """
    with open(cve_file, encoding="utf-8") as handle:
        try:
            payload = json.load(handle)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{cve_file}: {exc}") from exc
    if not isinstance(payload, list):
        raise FormatError(f"{cve_file}: expected a JSON array of advisories")

    records = []
    for i, advisory in enumerate(payload):
        if not isinstance(advisory, dict) or "id" not in advisory or "published" not in advisory:
            raise FormatError(f"advisory #{i}: need at least 'id' and 'published'")
        cve_id = str(advisory["id"])
        try:
            published = days_from_iso(str(advisory["published"]))
        except ValueError as exc:
            raise FormatError(f"advisory {cve_id}: bad published date") from exc
        affected: dict[str, tuple[Version, ...]] = {}
        for entry in advisory.get("affected", []):
            package, versions = _expand_affected(entry, graph, graph.diagnostics, cve_id)
            if package in affected:
                versions = tuple(sorted(set(affected[package]) | set(versions)))
            affected[package] = versions
        records.append(
            CveRecord(cve_id, published, affected, severity=advisory.get("severity"))
        )
    return records


# -- emission (the simulator writes corpora in the ingestible formats) ------


def write_releases_csv(graph: DependencyGraph, path: str | Path) -> None:
    rows = sorted(graph.releases(), key=lambda r: (r.artifact_id, r.version))
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["artifact_id", "version", "released_at"])
        for rel in rows:
            writer.writerow([rel.artifact_id, rel.version.raw, iso_from_days(rel.released_at)])


def write_deps_csv(graph: DependencyGraph, path: str | Path) -> None:
    rows = sorted(graph.dep_edges, key=lambda e: (e[0][0], e[0][1], e[1][0], e[1][1]))
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["from_artifact", "from_version", "to_artifact", "to_version"])
        for (src_a, src_v), (dst_a, dst_v) in rows:
            writer.writerow([src_a, src_v.raw, dst_a, dst_v.raw])


def write_cves_json(cves: Iterable[CveRecord], path: str | Path) -> None:
    payload = []
    for cve in cves:
        affected = [
            {"package": package, "versions": [v.raw for v in versions]}
            for package, versions in sorted(cve.affected.items())
        ]
        record: dict = {
            "id": cve.cve_id,
            "published": iso_from_days(cve.published_at),
            "affected": affected,
        }
        if cve.severity is not None:
            record["severity"] = cve.severity
        payload.append(record)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")
