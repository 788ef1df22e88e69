import numpy as np
import pytest

from meterfuse import (
    DetectorKind,
    DetectorParams,
    MeasurementId,
    SystemTag,
    TimeSeries,
    detect_autoregression,
    detect_level_shift,
    detect_rolling_average,
    fit_ar_predict,
    run_detector,
)
from meterfuse.detectors import level_shift_scores, rolling_average_residuals
from meterfuse.errors import TooShort

from conftest import mkvalues


def ar_oracle_residuals(values, p):
    """Normal-equations ridge solve, independent of the lstsq path."""
    values = np.asarray(values, dtype=float)
    n = len(values)
    design = np.empty((n - p, p + 1))
    design[:, 0] = 1.0
    for lag in range(1, p + 1):
        design[:, lag] = values[p - lag : n - lag]
    target = values[p:]
    normal = design.T @ design + 1e-8 * np.eye(p + 1)
    coef = np.linalg.solve(normal, design.T @ target)
    return target - design @ coef


def ra_oracle_residuals(values, w):
    return np.array([values[t] - np.mean(values[t - w : t]) for t in range(w, len(values))])


def ls_oracle_scores(values, w):
    return np.array(
        [
            abs(np.median(values[t - w : t]) - np.median(values[t : t + w]))
            for t in range(w, len(values) - w + 1)
        ]
    )


def test_ar_constant_series_residuals_zero():
    residuals = fit_ar_predict(np.full(5, 5.0), 1)
    assert np.max(np.abs(residuals)) < 1e-9


def test_ar_exactly_realizable_model():
    y = [8.0]
    for _ in range(11):
        y.append(0.5 * y[-1])
    residuals = fit_ar_predict(np.array(y), 1)
    assert np.max(np.abs(residuals)) < 1e-9


def test_ar_residuals_match_normal_equations_oracle(rng):
    values = rng.normal(0, 1, 50)
    mine = fit_ar_predict(values, 2)
    oracle = ar_oracle_residuals(values, 2)
    assert np.max(np.abs(mine - oracle)) < 1e-8


def test_ar_too_short():
    with pytest.raises(TooShort):
        fit_ar_predict(np.zeros(3), 3)
    with pytest.raises(TooShort):
        detect_autoregression(np.zeros(2), 2, 3.0)


def test_ar_flags_spike_and_possibly_successor():
    y = np.zeros(100)
    y[50] = 100.0
    flagged = set(detect_autoregression(y, 1, 3.0).flagged)
    assert 50 in flagged
    assert flagged <= {50, 51}


def test_ar_constant_series_no_anomalies():
    assert detect_autoregression(np.full(200, 3.25), 10, 3.0).count == 0


def test_ls_constant_series_no_anomalies():
    assert detect_level_shift(np.full(50, 7.0), 5, 6.0).count == 0


def test_ls_flags_step_near_boundary():
    s = np.concatenate([np.zeros(100), np.full(100, 100.0)])
    result = detect_level_shift(s, 5, 6.0)
    assert result.count > 0
    assert set(result.flagged) <= set(range(95, 106))


def test_ls_ignores_isolated_spikes():
    s = np.zeros(200)
    s[[30, 90, 150]] = 50.0
    assert detect_level_shift(s, 5, 6.0).count == 0


def test_ls_scores_match_two_window_median_oracle(rng):
    values = rng.normal(0, 3, 120)
    assert np.array_equal(level_shift_scores(values, 7), ls_oracle_scores(values, 7))


def test_ls_too_short():
    with pytest.raises(TooShort):
        detect_level_shift(np.zeros(9), 5, 6.0)


def test_ra_constant_series_no_anomalies():
    assert detect_rolling_average(np.full(60, -11.0), 10, 3.0).count == 0


def test_ra_flags_spike():
    y = np.zeros(100)
    y[50] = 100.0
    assert 50 in set(detect_rolling_average(y, 10, 3.0).flagged)


def test_ra_linear_ramp_no_anomalies():
    assert detect_rolling_average(np.arange(200.0), 10, 3.0).count == 0


def test_ra_residuals_match_windowed_mean_oracle(rng):
    # integer values keep window sums exact, so both paths agree bitwise
    values = rng.integers(-1000, 1000, 300).astype(float)
    assert np.array_equal(rolling_average_residuals(values, 10), ra_oracle_residuals(values, 10))


def test_ra_residuals_close_on_float_data(rng):
    values = rng.normal(0, 5, 300)
    mine = rolling_average_residuals(values, 10)
    oracle = ra_oracle_residuals(values, 10)
    assert np.max(np.abs(mine - oracle)) < 1e-12 * max(1.0, np.max(np.abs(values)))


def test_ra_too_short():
    with pytest.raises(TooShort):
        detect_rolling_average(np.zeros(10), 10, 3.0)


def test_zero_sets_on_lines_of_any_slope():
    for slope in (-1e6, -7.3, -0.1, 0.0, 1e-7, 0.1, 3.7, 1e6):
        for intercept in (0.0, -42.0, 1e6):
            y = intercept + slope * np.arange(300.0)
            assert detect_autoregression(y, 10, 3.0).count == 0, (slope, intercept)
            assert detect_level_shift(y, 5, 6.0).count == 0, (slope, intercept)
            assert detect_rolling_average(y, 10, 3.0).count == 0, (slope, intercept)


def test_run_detector_dispatch_records_params():
    params = DetectorParams(DetectorKind.LEVEL_SHIFT, window_w=5, threshold_k=6.0)
    s = np.concatenate([np.zeros(100), np.full(100, 100.0)])
    result = run_detector(params, s)
    assert result.params == params
    assert result.count > 0

    constant = np.full(50, 2.0)
    assert run_detector(DetectorParams(DetectorKind.AR, order_p=1), constant).count == 0


def test_detectors_use_index_order_not_timestamps(rng):
    values = rng.normal(0, 1, 120)
    values[60] += 40
    a = mkvalues(values, cadence=1000)
    # same value order under wildly different (still sorted) timestamps
    t = np.sort(rng.integers(0, 10**9, 120)).astype(np.int64)
    b = TimeSeries(MeasurementId(SystemTag.HIST, "HIST-test"), t, values)
    for detect in (
        lambda s: detect_autoregression(s, 5, 3.0),
        lambda s: detect_level_shift(s, 5, 6.0),
        lambda s: detect_rolling_average(s, 10, 3.0),
    ):
        assert detect(a) == detect(b)


def test_translation_invariance(rng):
    for trial in range(20):
        values = rng.integers(-100, 100, 150).astype(float)
        values[rng.integers(20, 130)] += 500
        shifted = values + 1000.0
        assert np.array_equal(
            detect_autoregression(values, 5, 3.0).flagged,
            detect_autoregression(shifted, 5, 3.0).flagged,
        )
        assert np.array_equal(
            detect_rolling_average(values, 10, 3.0).flagged,
            detect_rolling_average(shifted, 10, 3.0).flagged,
        )
        assert np.array_equal(
            detect_level_shift(values, 5, 6.0).flagged,
            detect_level_shift(shifted, 5, 6.0).flagged,
        )


def test_ls_positive_scaling_invariance(rng):
    for trial in range(20):
        values = rng.integers(-100, 100, 150).astype(float)
        values[40:90] += 300  # sustained shift
        for scale in (2.0, 10.0, 1024.0):
            assert np.array_equal(
                detect_level_shift(values, 5, 6.0).flagged,
                detect_level_shift(values * scale, 5, 6.0).flagged,
            )


def test_detection_deterministic(rng):
    values = rng.normal(0, 1, 400)
    first = detect_autoregression(values, 10, 3.0)
    second = detect_autoregression(values, 10, 3.0)
    assert first == second


def test_std_rule_available(rng):
    y = np.zeros(200)
    y[100] = 100.0
    robust = detect_rolling_average(y, 10, 3.0, use_std=False)
    classical = detect_rolling_average(y, 10, 3.0, use_std=True)
    assert 100 in set(classical.flagged)
    assert robust.params.use_std is False and classical.params.use_std is True


def test_param_validation():
    with pytest.raises(ValueError):
        DetectorParams(DetectorKind.AR, order_p=0)
    with pytest.raises(ValueError):
        DetectorParams(DetectorKind.AR, threshold_k=0.0)


def test_anomaly_csv_origin_column_for_merged_series():
    from meterfuse import SystemTag, merge_pair, validate_series
    from meterfuse.detectors import anomalies_to_csv

    values = np.zeros(120)
    values[60] = 100.0
    hist = mkvalues(values, name="HIST-m", cadence=1000)
    ion = validate_series(
        TimeSeries(
            MeasurementId(SystemTag.ION, "ION-m"),
            hist.t[::12].copy(),
            np.zeros(10),
        )
    )
    merged = merge_pair(ion, hist)
    result = detect_rolling_average(merged, 10, 3.0)
    assert result.count > 0
    lines = anomalies_to_csv(result, merged).strip().split("\n")
    assert lines[0] == "index,timestamp,value,score,origin"
    assert all(line.endswith(("ION", "HIST")) for line in lines[1:])

    plain = detect_rolling_average(hist, 10, 3.0)
    plain_lines = anomalies_to_csv(plain, hist).strip().split("\n")
    assert plain_lines[0] == "index,timestamp,value,score"
