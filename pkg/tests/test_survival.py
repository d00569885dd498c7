import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vulnlife.model import ModelParams, sample_resolution
from vulnlife.propagation import LifetimeSample
from vulnlife.survival import (
    EmptyInputError,
    kaplan_meier,
    level_stats,
    sample_durations,
    stratified_survival,
    write_curves_csv,
    write_stats_csv,
)


def _uncensored(days):
    return [(float(d), False) for d in days]


def test_km_hand_example_all_events():
    curve = kaplan_meier(_uncensored([1, 2, 2, 4]))
    assert list(curve.event_times) == [1, 2, 4]
    assert list(curve.deaths) == [1, 2, 1]
    assert list(curve.at_risk) == [4, 3, 1]
    assert np.allclose(curve.survival, [0.75, 0.25, 0.0])
    assert curve.survival_at(0.5) == 1.0
    assert curve.survival_at(3.0) == 0.25


def test_km_hand_example_with_censoring():
    curve = kaplan_meier([(1, False), (2, True), (3, False)])
    assert list(curve.event_times) == [1, 3]
    assert np.allclose(curve.survival, [2 / 3, 0.0])
    assert list(curve.at_risk) == [3, 1]


def test_km_all_censored_is_flat_one():
    curve = kaplan_meier([(5, True), (9, True)])
    assert curve.event_times.size == 0
    for t in [0, 5, 9, 100]:
        assert curve.survival_at(t) == 1.0


def test_km_rejects_empty_and_negative():
    with pytest.raises(EmptyInputError):
        kaplan_meier([])
    with pytest.raises(ValueError):
        kaplan_meier([(-1.0, False)])


def test_km_censor_at_event_time_stays_at_risk():
    # The censored observation at t=2 is still at risk for the event at 2.
    curve = kaplan_meier([(1, False), (2, True), (2, False), (4, False)])
    assert list(curve.at_risk) == [4, 3, 1]
    assert np.allclose(curve.survival, [0.75, 0.75 * (2 / 3), 0.0])


def test_km_matches_empirical_survival_without_censoring():
    rng = np.random.default_rng(42)
    for _ in range(25):
        n = int(rng.integers(1, 200))
        days = rng.integers(0, 60, size=n).astype(float)
        curve = kaplan_meier(_uncensored(days))
        assert curve.at_risk[0] == n == curve.n_total
        for t, s in zip(curve.event_times, curve.survival):
            assert abs(s - np.mean(days > t)) <= 1e-12


def test_km_invariant_under_sample_duplication():
    rng = np.random.default_rng(3)
    days = rng.integers(0, 30, size=50).astype(float)
    cens = rng.random(50) < 0.3
    pairs = list(zip(days, cens))
    a = kaplan_meier(pairs)
    b = kaplan_meier(pairs + pairs)
    assert np.array_equal(a.event_times, b.event_times)
    assert np.allclose(a.survival, b.survival)


@given(
    st.lists(
        st.tuples(st.integers(0, 50), st.booleans()),
        min_size=1,
        max_size=80,
    )
)
def test_km_monotone_bounded_and_risk_set_shrinks(pairs):
    curve = kaplan_meier([(float(d), c) for d, c in pairs])
    s = curve.survival
    assert np.all(s <= 1.0 + 1e-15)
    assert np.all(s >= -1e-15)
    assert np.all(np.diff(s) <= 1e-15)
    for i in range(len(curve.event_times) - 1):
        assert curve.at_risk[i + 1] <= curve.at_risk[i] - curve.deaths[i]


def _samples(spec):
    # spec: list of (level, days, censored)
    return [
        LifetimeSample("CVE", f"a{i}", level, days, days, censored)
        for i, (level, days, censored) in enumerate(spec)
    ]


def test_stratified_one_curve_per_level():
    samples = _samples([(0, 10, False), (0, 20, False), (1, 30, False)])
    curves = stratified_survival(samples, "cumulative")
    assert sorted(curves) == [0, 1]
    only_level0 = kaplan_meier(_uncensored([10, 20]))
    assert np.allclose(curves[0].survival, only_level0.survival)


def test_stratified_deeper_gamma_levels_dominate():
    params = ModelParams(alpha=2.0, k=0.02, c=1.0)
    spec = []
    for level in (0, 5):
        draws = sample_resolution(params, level, seed=100 + level, size=4000)
        spec.extend((level, float(d), False) for d in draws)
    curves = stratified_survival(_samples(spec), "cumulative")
    shallow, deep = curves[0], curves[5]
    pooled_median = float(np.median([d for _, d, _ in spec]))
    assert deep.survival_at(pooled_median) > shallow.survival_at(pooled_median)


def test_level_stats_basic_moments():
    stats = level_stats(_samples([(0, 0, False), (0, 10, False), (0, 20, False)]))
    (row,) = stats
    assert row.mean == 10
    assert row.median == 10
    assert row.min == 0
    assert row.max == 20
    assert row.q25 == 5
    assert row.q75 == 15
    assert row.count == 3


def test_level_stats_eleven_rows_for_levels_0_to_10():
    spec = [(level, 10 * level + offset, False) for level in range(11) for offset in (0, 5)]
    stats = level_stats(_samples(spec))
    assert [s.level for s in stats] == list(range(11))


def test_level_stats_single_sample_degenerate():
    (row,) = level_stats(_samples([(2, 7, False)]))
    assert row.std == 0.0
    assert row.q25 == row.median == row.q75 == row.min == row.max == 7
    assert row.count == 1


def test_level_stats_censor_policy_flag():
    samples = _samples([(0, 10, False), (0, 99, True)])
    (default_row,) = level_stats(samples)
    assert default_row.count == 1
    (flagged_row,) = level_stats(samples, include_censored_as_events=True)
    assert flagged_row.count == 2
    assert flagged_row.max == 99


def test_sample_durations_field_selection():
    sample = LifetimeSample("CVE", "a", 1, cumulative_days=50, level_days=47, censored=True)
    assert sample_durations([sample], "cumulative") == [(50.0, True)]
    assert sample_durations([sample], "level") == [(47.0, True)]
    assert sample_durations([sample], "level", include_censored_as_events=True) == [(47.0, False)]
    with pytest.raises(ValueError):
        sample_durations([sample], "sideways")


def test_csv_emission_headers(tmp_path):
    samples = _samples([(0, 10, False), (1, 20, False)])
    curves_path = tmp_path / "curves.csv"
    stats_path = tmp_path / "stats.csv"
    write_curves_csv(stratified_survival(samples, "cumulative"), curves_path)
    write_stats_csv(level_stats(samples), stats_path)
    assert curves_path.read_text().splitlines()[0] == "level,t,survival,at_risk,deaths"
    assert stats_path.read_text().splitlines()[0] == (
        "level,mean,std,min,q25,median,q75,max,count"
    )
