import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from vulnlife.versioning import (
    EmptyCorpusError,
    UnparseableVersionError,
    Version,
    heuristic_next,
    next_release_agreement,
    parse_version,
    semver_next,
)

V = parse_version


def test_parse_plain_segments():
    v = V("1.2.3")
    assert v.segments == (1, 2, 3)
    assert v.qualifier is None
    assert V("2.0").segments == (2, 0)


def test_parse_qualifier():
    v = V("1.2.3-rc1")
    assert v.segments == (1, 2, 3)
    assert v.qualifier == "rc1"
    assert V("3.1.4.Final").qualifier == "Final"
    assert V("1.0b2").segments == (1, 0)
    assert V("1.0b2").qualifier == "b2"
    assert V("1.2-rc1.5").qualifier == "rc1.5"


@pytest.mark.parametrize("bad", ["", "latest", "v1.0", "-1.0", ".5", "final"])
def test_parse_rejects_non_numeric_lead(bad):
    with pytest.raises(UnparseableVersionError):
        V(bad)


def test_prerelease_orders_before_bare_version():
    pool = [V("1.2.3-rc1"), V("1.2.3"), V("1.2.4")]
    # Expected order checked against the stated rule over every pair.
    assert sorted(pool) == pool
    for a, b in itertools.combinations(pool, 2):
        assert a < b
        assert not b < a


def test_zero_padding_equality():
    assert V("1.2") == V("1.2.0")
    assert hash(V("1.2")) == hash(V("1.2.0"))
    assert V("1.2") < V("1.2.1")
    assert not V("1.2") < V("1.2.0")


def test_raw_round_trips_to_equal_version():
    for text in ["1.2.3", "2.0", "1.2.3-rc1", "10.0.0.Final", "7"]:
        v = V(text)
        assert parse_version(v.raw) == v
        assert v.raw == text


_POOL = [
    V(t)
    for t in [
        "0.1", "0.1.0", "0.1.1", "0.2", "0.9.9", "1", "1.0", "1.0-alpha", "1.0-beta",
        "1.0-rc1", "1.0.0", "1.0.1", "1.0.10", "1.0.2", "1.1", "1.1-rc1", "1.2",
        "1.2.3", "1.2.3-rc1", "1.2.3-rc2", "1.2.4", "1.3", "1.10", "1.10.3", "1.9",
        "2", "2.0", "2.0-M1", "2.0-M2", "2.0.0.Final", "2.0.1", "2.1", "2.10", "2.2",
        "3", "3.0-rc1", "3.0.0", "3.0.1-sp1", "4.0", "4.0.0-alpha.1", "5", "5.0.0",
        "6.1.2", "7.0", "9.9.9", "10.0", "10.0.0", "11.2", "12.0.1-beta", "100.0",
    ]
]


def test_total_order_antisymmetric_and_transitive_on_pool():
    for a, b in itertools.product(_POOL, repeat=2):
        assert (a < b) + (b < a) + (a == b) == 1, (a, b)
    for a, b, c in itertools.product(_POOL, repeat=3):
        if a < b and b < c:
            assert a < c, (a, b, c)


def test_semver_next_picks_minimum_greater():
    assert semver_next(V("1.2.3"), {V("1.2.4"), V("1.3.0"), V("2.0.0")}) == V("1.2.4")
    assert semver_next(V("2.0.0"), {V("1.9.9")}) is None


def test_semver_next_oracle_numeric_minor_bump():
    current = V("1.10.0")
    candidates = [V("1.9.0"), V("1.11.0")]
    # Oracle: brute-force sort, first strictly greater.
    expected = next(v for v in sorted(candidates) if v > current)
    assert semver_next(current, candidates) == expected == V("1.11.0")


@given(
    st.lists(
        st.tuples(st.lists(st.integers(0, 20), min_size=1, max_size=4),
                  st.sampled_from([None, "rc1", "alpha"])),
        min_size=1,
        max_size=12,
    ),
    st.tuples(st.lists(st.integers(0, 20), min_size=1, max_size=4),
              st.sampled_from([None, "rc1", "alpha"])),
)
def test_semver_next_nothing_in_between(candidate_specs, current_spec):
    candidates = [Version(tuple(s), q) for s, q in candidate_specs]
    current = Version(tuple(current_spec[0]), current_spec[1])
    result = semver_next(current, candidates)
    greater = [c for c in candidates if c > current]
    if result is None:
        assert not greater
    else:
        assert result > current
        assert not any(current < c < result for c in candidates)


def test_heuristic_step1_same_prefix_bump():
    assert heuristic_next(V("1.2.3"), {V("1.2.4"), V("2.0.0")}) == V("1.2.4")


def test_heuristic_step2_penultimate_bump_resets_last():
    assert heuristic_next(V("1.2.3"), {V("1.3.0"), V("2.0.0")}) == V("1.3.0")
    # The reset picks the smallest last segment among penultimate+1 matches.
    assert heuristic_next(V("1.2.3"), {V("1.3.5"), V("1.3.2"), V("2.0.0")}) == V("1.3.2")


def test_heuristic_step3_fallback_oldest():
    assert heuristic_next(V("1.2.3"), {V("2.0.0")}) == V("2.0.0")
    released = {V("2.0.0"): 50, V("3.0.0"): 10}
    assert heuristic_next(V("1.2.3"), released.keys(), released) == V("3.0.0")
    # Equal timestamps break by version order.
    released = {V("2.0.0"): 10, V("3.0.0"): 10}
    assert heuristic_next(V("1.2.3"), released.keys(), released) == V("2.0.0")


def test_heuristic_none_iff_nothing_greater():
    assert heuristic_next(V("2.0"), {V("1.0"), V("2.0-rc1")}) is None
    assert heuristic_next(V("2.0"), set()) is None


@given(
    st.lists(st.lists(st.integers(0, 9), min_size=2, max_size=3), min_size=1, max_size=10),
    st.lists(st.integers(0, 9), min_size=2, max_size=3),
)
def test_heuristic_covers_whenever_semver_does(candidate_segs, current_segs):
    candidates = [Version(tuple(s)) for s in candidate_segs]
    current = Version(tuple(current_segs))
    sv = semver_next(current, candidates)
    hr = heuristic_next(current, candidates)
    assert (sv is None) == (hr is None)
    if hr is not None:
        assert hr > current


def test_agreement_on_patch_successors_is_total():
    corpus = [
        (V("1.2.3"), [V("1.2.4"), V("1.3.0")]),
        (V("0.9.1"), [V("0.9.2"), V("2.0.0")]),
        (V("5.5.5"), [V("5.5.6")]),
    ]
    assert next_release_agreement(corpus) == 1.0


def test_agreement_minor_reset_entry():
    # 1.3.5 released after 1.4.0: semver picks 1.3.5 (smallest greater) and
    # the penultimate-bump step also lands on 1.3.5.
    corpus = [(V("1.2.3"), [V("1.4.0"), V("1.3.5")])]
    released = {V("1.4.0"): 100, V("1.3.5"): 120}
    assert next_release_agreement(corpus, released) == 1.0


def test_agreement_empty_corpus_raises():
    with pytest.raises(EmptyCorpusError):
        next_release_agreement([])


@given(
    st.lists(st.integers(0, 9), min_size=2, max_size=4),
    st.integers(1, 5),
    st.lists(st.lists(st.integers(0, 9), min_size=2, max_size=4), max_size=6),
)
def test_same_prefix_successor_forces_agreement(current_segs, bump, other_segs):
    current = Version(tuple(current_segs))
    patch = Version(tuple(current_segs[:-1]) + (current_segs[-1] + bump,))
    candidates = [patch] + [Version(tuple(s)) for s in other_segs]
    sv = semver_next(current, candidates)
    hr = heuristic_next(current, candidates)
    if sv is not None and sv.segments[:-1] == current.segments[:-1] and len(
        sv.segments
    ) == len(current.segments):
        assert sv == hr
