import numpy as np
import pytest

from vulnlife.regression import (
    AVERAGE_MONTH_DAYS,
    DegenerateLevelsError,
    RegressionResult,
    months_rule,
    ols_fit,
)

# Published per-level cumulative time-to-fix aggregates (levels 0..10).
LEVELS = list(range(11))
MEAN_DAYS = [215, 429, 597, 792, 1104, 1145, 1364, 1492, 1900, 1943, 2075]
MEDIAN_DAYS = [65, 140, 334, 355, 584, 676, 888, 958, 1617, 1642, 1822]


def test_exact_line_recovered():
    fit = ols_fit([(0, 1), (1, 3), (2, 5)])
    assert fit.intercept == pytest.approx(1.0, abs=1e-12)
    assert fit.slope == pytest.approx(2.0, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.n_points == 3


def test_mean_column_regression_matches_polyfit_oracle():
    fit = ols_fit(list(zip(LEVELS, MEAN_DAYS)))
    slope_oracle, intercept_oracle = np.polyfit(LEVELS, MEAN_DAYS, 1)
    assert fit.slope == pytest.approx(slope_oracle, rel=1e-12)
    assert fit.intercept == pytest.approx(intercept_oracle, rel=1e-12)
    # Rounded-table aggregates land close to the published coefficients.
    assert fit.slope == pytest.approx(189.92, abs=2.0)
    assert fit.intercept == pytest.approx(238.05, abs=10.0)
    assert fit.r_squared == pytest.approx(0.989, abs=0.01)


def test_median_column_regression_matches_polyfit_oracle():
    fit = ols_fit(list(zip(LEVELS, MEDIAN_DAYS)))
    slope_oracle, intercept_oracle = np.polyfit(LEVELS, MEDIAN_DAYS, 1)
    assert fit.slope == pytest.approx(slope_oracle, rel=1e-12)
    assert fit.intercept == pytest.approx(intercept_oracle, rel=1e-12)
    assert fit.slope == pytest.approx(183.15, abs=2.0)
    assert fit.intercept == pytest.approx(-90.14, abs=10.0)
    assert fit.r_squared == pytest.approx(0.9466, abs=0.02)


def test_months_rule_on_published_fits():
    mean_fit = ols_fit(list(zip(LEVELS, MEAN_DAYS)))
    median_fit = ols_fit(list(zip(LEVELS, MEDIAN_DAYS)))
    assert months_rule(mean_fit) == (6, 8)
    assert months_rule(median_fit) == (6, -3)


def test_months_rule_zero_regression():
    assert months_rule(RegressionResult(0.0, 0.0, 1.0, 5)) == (0, 0)
    assert AVERAGE_MONTH_DAYS == pytest.approx(30.44)


def test_residuals_sum_to_zero_and_are_orthogonal_to_levels():
    rng = np.random.default_rng(8)
    x = rng.integers(0, 10, 200).astype(float)
    x[:2] = [0.0, 9.0]  # assure spread
    y = 3.0 + 5.0 * x + rng.normal(0, 2, 200)
    fit = ols_fit(list(zip(x, y)))
    residuals = y - (fit.intercept + fit.slope * x)
    scale = np.abs(y).sum()
    assert abs(residuals.sum()) <= 1e-9 * scale
    assert abs(residuals @ x) <= 1e-9 * scale * x.max()


def test_shift_moves_intercept_scale_moves_both():
    rng = np.random.default_rng(9)
    x = np.arange(8.0)
    y = 10 + 4 * x + rng.normal(0, 1, 8)
    base = ols_fit(list(zip(x, y)))
    shifted = ols_fit(list(zip(x, y + 100.0)))
    assert shifted.slope == pytest.approx(base.slope, rel=1e-12)
    assert shifted.intercept == pytest.approx(base.intercept + 100.0, rel=1e-12)
    scaled = ols_fit(list(zip(x, y * 3.0)))
    assert scaled.slope == pytest.approx(base.slope * 3.0, rel=1e-12)
    assert scaled.intercept == pytest.approx(base.intercept * 3.0, rel=1e-12)


def test_r_squared_bounds_and_flat_line():
    flat = ols_fit([(0, 5.0), (1, 5.0), (2, 5.0)])
    assert flat.slope == 0.0
    assert flat.r_squared == 1.0
    noisy = ols_fit([(0, 1.0), (1, -1.0), (2, 1.0), (3, -1.0)])
    assert 0.0 <= noisy.r_squared <= 1.0


def test_degenerate_inputs():
    with pytest.raises(DegenerateLevelsError):
        ols_fit([(1, 2.0), (1, 3.0)])
    with pytest.raises(ValueError):
        ols_fit([(1, 2.0)])


def test_predict():
    fit = RegressionResult(intercept=10.0, slope=2.5, r_squared=1.0, n_points=2)
    assert fit.predict(4) == 20.0
