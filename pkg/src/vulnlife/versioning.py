"""Version parsing, ordering, and next-release selection.

Version strings are reduced to a run of leading numeric segments plus an
optional textual qualifier, which is enough to order the messy identifiers
found in real release corpora ("2.0", "1.2.3-rc1", "3.1.4.Final", "1.0b2").
Two strategies compute the release that follows a given version:

* :func:`semver_next` -- the smallest candidate strictly greater than the
  current version under the segment-wise total order.
* :func:`heuristic_next` -- a three-step rule (same-prefix bump, penultimate
  bump with reset, oldest-newer fallback) used to cross-validate the first.

:func:`next_release_agreement` measures how often the two agree on a corpus.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import total_ordering
from typing import Collection, Iterable, Mapping

__all__ = [
    "Version",
    "UnparseableVersionError",
    "EmptyCorpusError",
    "parse_version",
    "semver_next",
    "heuristic_next",
    "next_release_agreement",
]

_VERSION_RE = re.compile(r"^(\d+)((?:\.\d+)*)(.*)$", re.DOTALL)
_QUALIFIER_SEPARATORS = "-._+"


class UnparseableVersionError(ValueError):
    """Raised when a version string has no leading numeric segment."""


class EmptyCorpusError(ValueError):
    """Raised when an agreement rate is requested over zero entries."""


@total_ordering
@dataclass(frozen=True)
class Version:
    """A parsed version identifier.

    Ordering is segment-wise numeric with shorter segment tuples padded by
    zeros, so ``1.2 == 1.2.0``. A version carrying a qualifier orders before
    the bare version with the same segments (pre-release convention);
    qualifiers among themselves compare as plain strings.
    """

    segments: tuple[int, ...]
    qualifier: str | None = None
    raw: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError("a Version needs at least one numeric segment")
        if not self.raw:
            object.__setattr__(self, "raw", str(self))

    def __str__(self) -> str:
        base = ".".join(str(s) for s in self.segments)
        return f"{base}-{self.qualifier}" if self.qualifier else base

    def _norm_segments(self) -> tuple[int, ...]:
        segs = self.segments
        end = len(segs)
        while end > 0 and segs[end - 1] == 0:
            end -= 1
        return segs[:end]

    def _sort_key(self) -> tuple:
        # Qualifier flag sorts qualified versions first among equal segments.
        return (self._norm_segments(), self.qualifier is None, self.qualifier or "")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Version):
            return NotImplemented
        return self._sort_key() == other._sort_key()

    def __hash__(self) -> int:
        return hash(self._sort_key())

    def __lt__(self, other: "Version") -> bool:
        if not isinstance(other, Version):
            return NotImplemented
        a, b = self.segments, other.segments
        n = max(len(a), len(b))
        pa = a + (0,) * (n - len(a))
        pb = b + (0,) * (n - len(b))
        if pa != pb:
            return pa < pb
        return self._sort_key()[1:] < other._sort_key()[1:]


def parse_version(text: str) -> Version:
    """Parse ``text`` into a :class:`Version`.

    Numeric dot-separated segments are taken left to right; whatever trails
    them (minus one leading separator out of ``-._+``) becomes the qualifier.

    Raises :class:`UnparseableVersionError` when no leading numeric segment
    exists (empty string, "latest", "v1.0", ...).
    """
    raw = text.strip()
    m = _VERSION_RE.match(raw)
    if not m:
        raise UnparseableVersionError(f"no leading numeric segment in {text!r}")
    segments = [int(m.group(1))]
    if m.group(2):
        segments.extend(int(p) for p in m.group(2).split(".")[1:])
    rest = m.group(3)
    if rest and rest[0] in _QUALIFIER_SEPARATORS:
        rest = rest[1:]
    qualifier = rest or None
    return Version(tuple(segments), qualifier, raw)


def semver_next(current: Version, candidates: Collection[Version]) -> Version | None:
    """Smallest candidate strictly greater than ``current``, or ``None``."""
    greater = [c for c in candidates if c > current]
    return min(greater) if greater else None


def heuristic_next(
    current: Version,
    candidates: Collection[Version],
    released_at: Mapping[Version, int] | None = None,
) -> Version | None:
    """Successor of ``current`` by the three-step lookup rule.

    1. Smallest candidate sharing every segment but the last with ``current``
       and carrying a larger last segment.
    2. Among candidates whose penultimate segment is ``current``'s plus one
       (earlier segments unchanged), the one whose last segment is closest to
       zero. Skipped for single-segment versions, which have no penultimate
       part.
    3. Fallback: the oldest strictly greater candidate, by release timestamp
       when ``released_at`` is given, with version order breaking ties.
    """
    segs = current.segments

    step1 = [
        c
        for c in candidates
        if len(c.segments) == len(segs)
        and c.segments[:-1] == segs[:-1]
        and c.segments[-1] > segs[-1]
    ]
    if step1:
        return min(step1)

    if len(segs) >= 2:
        step2 = [
            c
            for c in candidates
            if len(c.segments) == len(segs)
            and c.segments[:-2] == segs[:-2]
            and c.segments[-2] == segs[-2] + 1
        ]
        if step2:
            return min(step2, key=lambda c: (c.segments[-1], c._sort_key()))

    newer = [c for c in candidates if c > current]
    if not newer:
        return None
    if released_at is None:
        return min(newer)
    return min(newer, key=lambda c: (released_at.get(c, 0), c._sort_key()))


def next_release_agreement(
    corpus: Iterable[tuple[Version, Collection[Version]]],
    released_at: Mapping[Version, int] | None = None,
) -> float:
    """Fraction of corpus entries where both successor strategies agree."""
    total = 0
    agree = 0
    for current, candidates in corpus:
        total += 1
        if semver_next(current, candidates) == heuristic_next(current, candidates, released_at):
            agree += 1
    if total == 0:
        raise EmptyCorpusError("agreement rate over an empty corpus")
    return agree / total
