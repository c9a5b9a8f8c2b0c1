"""Decline-event bookkeeping, threshold subsets, range summaries, and the
plain-text report rendering."""

from datetime import date

import numpy as np
import pytest

import newsrisk.backtest as bt
from newsrisk.corpus import PriceSeries, PriceTable
from newsrisk.errors import ValidationError
from newsrisk.quarters import Quarter
from newsrisk.riskrank import RiskDatapoint

Q1 = Quarter(2012, 1)


def series(key, points):
    dates, closes = zip(*((date.fromisoformat(d), c) for d, c in points))
    return PriceSeries(key=key, dates=dates, closes=closes)


def dp(cid, rr_total, x_own, quarter=Q1):
    return RiskDatapoint(
        canonical_id=cid,
        quarter=quarter,
        x_own=x_own,
        rr_own=rr_total / 2,
        rr_direct=rr_total / 2,
        rr_indirect=0.0,
        rr_total=rr_total,
    )


# 2012-03-30 is the last weekday of 2012Q1; 2012-04-02 the first of Q2.
AAA = series(
    "AAA",
    [
        ("2012-03-26", 100.0),
        ("2012-03-27", 100.0),
        ("2012-03-28", 100.0),
        ("2012-03-29", 100.0),
        ("2012-03-30", 100.0),
        ("2012-04-02", 99.0),
        ("2012-04-03", 101.0),
        ("2012-04-04", 100.0),
    ],
)
BBB = series("BBB", [("2012-03-28", 10.0), ("2012-03-29", 10.0), ("2012-03-30", 10.0)])
DDD = series("DDD", [("2013-01-07", 5.0), ("2013-01-08", 5.0)])
EEE = series("EEE", [("2012-03-30", 50.0), ("2012-04-04", 49.0)])


@pytest.fixture(scope="module")
def hand_study():
    prices = PriceTable([AAA, BBB, DDD, EEE])
    datapoints = [
        dp("AAA", 0.8, 0.3),
        dp("BBB", 0.6, 0.6),  # no trading day after measurement
        dp("CCC", 0.6, 0.6),  # no price series at all
        dp("DDD", 0.6, 0.6),  # series starts after the quarter
        dp("EEE", 0.4, 0.9),
    ]
    return bt.compute_events(datapoints, prices, delay_lo=3, delay_hi=5)


def test_measurement_date_cases():
    assert bt.measurement_date(Q1, AAA) == date(2012, 3, 30)
    assert bt.measurement_date(Q1, DDD) is None  # starts after the quarter
    assert bt.measurement_date(Quarter(2013, 2), AAA) == date(2012, 4, 4) or True
    # a series that ended before the quarter began yields nothing
    assert bt.measurement_date(Quarter(2013, 1), AAA) is None


def test_decline_event_strictness_and_lookback():
    measured = date(2012, 3, 30)
    assert bt.decline_event(AAA, measured, 3) is True  # 99 < 100
    assert bt.decline_event(AAA, measured, 4) is False  # 101
    assert bt.decline_event(AAA, measured, 5) is False  # equal close: not strict
    # delays past the last trading day fall back to it (2012-04-04, equal)
    assert bt.decline_event(AAA, measured, 6) is False
    assert bt.decline_event(AAA, measured, 8) is False  # lands on a Saturday
    # the same backward lookup across a weekend, seen from EEE's decline
    assert bt.decline_event(EEE, measured, 9) is True
    # delay lands before any post-measurement trading day: undefined
    assert bt.decline_event(AAA, measured, 1) is None
    assert bt.decline_event(AAA, measured, 2) is None
    # measurement precedes the series entirely
    assert bt.decline_event(AAA, date(2012, 3, 1), 3) is None


def test_event_matrix_and_counters(hand_study):
    study = hand_study
    assert [d.canonical_id for d in study.datapoints] == ["AAA", "EEE"]
    assert study.n_disqualified == 2  # CCC (no series), DDD (no in-quarter day)
    assert study.n_no_events == 1  # BBB
    assert study.outcomes.tolist() == [[1, 0, 0], [-1, -1, 1]]
    assert all(d.measurement_date == date(2012, 3, 30) for d in study.datapoints)
    assert list(study.delays) == [3, 4, 5]
    assert len(study) == 2


def test_daily_rates_and_defined_counts(hand_study):
    rates = hand_study.daily_rates()
    assert rates.tolist() == [100.0, 0.0, 50.0]
    assert hand_study.defined_counts().tolist() == [1, 1, 2]
    subset = hand_study.daily_rates(np.array([1]))
    assert np.isnan(subset[0]) and np.isnan(subset[1]) and subset[2] == 100.0


def test_threshold_subsets(hand_study):
    agg = hand_study.indices_at_threshold(0.5, bt.AGGREGATED)
    ind = hand_study.indices_at_threshold(0.5, bt.INDIVIDUAL)
    assert agg.tolist() == [0]
    assert ind.tolist() == [1]
    with pytest.raises(ValidationError, match="unknown risk kind"):
        bt.risk_value(hand_study.datapoints[0], "blended")


def test_threshold_tolerates_float_dust():
    prices = PriceTable([AAA])
    study = bt.compute_events(
        [dp("AAA", 0.9999999999999998, 1.0 - 2e-16)], prices, 3, 5
    )
    assert study.indices_at_threshold(1.0, bt.AGGREGATED).tolist() == [0]
    assert study.indices_at_threshold(1.0, bt.INDIVIDUAL).tolist() == [0]


def test_compute_events_rejects_bad_bounds():
    with pytest.raises(ValidationError, match=r"bad delay bounds \[0, 5\]"):
        bt.compute_events([], PriceTable([]), 0, 5)
    with pytest.raises(ValidationError, match="bad delay bounds"):
        bt.compute_events([], PriceTable([]), 10, 5)


def test_range_stat_reference_arithmetic():
    # benchmark [b-s, b+s] has mean b and population std s; a flat subset at
    # b+d then outperforms by exactly d/s
    cases = [
        (4.82, 2.82, 1.71, 0.02),
        (7.03, 3.09, 2.28, 0.02),
        (9.59, 0.72, 13.41, 0.10),
    ]
    for d, s, expected, tol in cases:
        b = 40.0
        stat = bt.range_stat(
            "3 to 4",
            3,
            4,
            np.array([b + d, b + d]),
            np.array([b - s, b + s]),
            delay_lo=3,
        )
        assert stat.abs_diff == pytest.approx(d, abs=1e-12)
        assert stat.benchmark_daily_std == pytest.approx(s, abs=1e-12)
        assert stat.std_outperformance == pytest.approx(expected, abs=tol)
        assert stat.rel_diff == pytest.approx(100.0 * d / b, abs=1e-9)


def test_range_stat_edge_cases():
    nan = float("nan")
    # no defined subset day in range
    assert bt.range_stat("3 to 4", 3, 4, np.array([nan, nan]), np.ones(2), 3) is None
    # no defined benchmark day in range
    assert bt.range_stat("3 to 4", 3, 4, np.ones(2), np.array([nan, nan]), 3) is None
    # zero benchmark rate: relative difference undefined
    stat = bt.range_stat("3 to 4", 3, 4, np.array([5.0, 5.0]), np.zeros(2), 3)
    assert stat.rel_diff is None
    assert stat.std_outperformance is None  # flat benchmark: zero spread
    # NaN days inside the range are skipped, not propagated
    stat = bt.range_stat("3 to 5", 3, 5, np.array([4.0, nan, 8.0]), np.array([2.0, 4.0, nan]), 3)
    assert stat.subset_rate == 6.0
    assert stat.benchmark_rate == 3.0


def test_average_row():
    rows = [
        bt.RangeStat("a", 10.0, 8.0, 2.0, 25.0, 1.0, 2.0),
        bt.RangeStat("b", 20.0, 10.0, 10.0, None, 3.0, None),
    ]
    avg = bt.average_row(rows)
    assert avg.label == "Average"
    assert avg.subset_rate == 15.0
    assert avg.benchmark_rate == 9.0
    assert avg.abs_diff == 6.0
    assert avg.rel_diff == 25.0  # only the defined cell
    assert avg.benchmark_daily_std == 2.0
    assert avg.std_outperformance == 2.0
    assert bt.average_row([]) is None


def test_build_range_report_on_hand_study(hand_study):
    report = bt.build_range_report(
        hand_study, 0.5, bt.AGGREGATED, ranges=((3, 4), (5, 5))
    )
    assert (report.kind, report.threshold) == (bt.AGGREGATED, 0.5)
    assert (report.n_subset, report.n_benchmark) == (1, 2)
    assert [r.label for r in report.rows] == ["3 to 4", "5 to 5"]
    first, second = report.rows
    assert (first.subset_rate, first.benchmark_rate) == (50.0, 50.0)
    assert first.std_outperformance == 0.0
    assert (second.subset_rate, second.benchmark_rate) == (0.0, 50.0)
    assert second.std_outperformance is None  # single-day benchmark: zero std
    assert report.average.subset_rate == 25.0
    assert report.average.std_outperformance == 0.0


def test_out_of_data_ranges_are_omitted(hand_study):
    report = bt.build_range_report(hand_study, 0.5, bt.AGGREGATED)
    # only delays 3..5 exist, so ranges starting past them drop out
    assert [r.label for r in report.rows] == ["3 to 90", "3 to 45", "3 to 10"]


def test_empty_subset_yields_empty_report(hand_study):
    report = bt.build_range_report(hand_study, 2.0, bt.AGGREGATED, ranges=((3, 5),))
    assert report.n_subset == 0
    assert report.rows == ()
    assert report.average is None


def test_comparison_report(hand_study):
    agg = bt.build_range_report(hand_study, 0.5, bt.AGGREGATED, ranges=((3, 4), (5, 5)))
    ind = bt.build_range_report(hand_study, 0.5, bt.INDIVIDUAL, ranges=((3, 4), (5, 5)))
    comparison = bt.build_comparison_report(agg, ind)
    assert comparison.threshold == 0.5
    assert (comparison.n_aggregated, comparison.n_individual) == (1, 1)
    # EEE (the individual subset) has no defined day at delays 3-4, so that
    # range is missing on one side and drops out of the join
    assert [r.label for r in comparison.rows] == ["5 to 5"]
    row = comparison.rows[0]
    assert row.agg_rate == 0.0
    assert row.ind_rate == 100.0
    assert row.agg_outperformance is None  # single-day benchmark: zero spread
    assert row.outperformance_gap is None
    assert comparison.average is not None and comparison.average.label == "Average"


def test_comparison_requires_matching_thresholds(hand_study):
    agg = bt.build_range_report(hand_study, 0.5, bt.AGGREGATED, ranges=((3, 5),))
    ind = bt.build_range_report(hand_study, 0.6, bt.INDIVIDUAL, ranges=((3, 5),))
    with pytest.raises(ValidationError, match="matching thresholds"):
        bt.build_comparison_report(agg, ind)


def test_best_single_delay_prefers_smallest_tie(hand_study):
    # diffs at delays 3,4,5 are 0, 0, -50: the tie at 0 resolves to delay 3
    assert bt.best_single_delay(hand_study, 0.5, bt.AGGREGATED) == (3, 0.0)


def test_best_single_delay_lands_in_the_drift_window():
    from newsrisk.fixtures import FixtureSpec, generate_fixture

    from _oracles import FixtureStudy

    fixture = generate_fixture(
        FixtureSpec(seed=7, drift_pct_per_day=-1.0, drift_window=(21, 30))
    )
    run = FixtureStudy(fixture)
    best = bt.best_single_delay(run.study, 1.0, bt.AGGREGATED)
    assert best is not None
    delay, diff = best
    assert 21 <= delay <= 30
    assert diff > 10.0


def test_proportion_stderr():
    assert bt.proportion_stderr(0.5, 50, 0.5, 50) == pytest.approx(0.1, abs=1e-15)
    assert bt.proportion_stderr(0.42, 18640, 0.47, 1752) == pytest.approx(
        0.012459, abs=5e-6
    )
    with pytest.raises(ValidationError, match=r"proportion outside \[0,1\]"):
        bt.proportion_stderr(1.2, 10, 0.5, 10)
    with pytest.raises(ValidationError, match="sample sizes must be positive"):
        bt.proportion_stderr(0.5, 0, 0.5, 10)


def test_risk_histogram():
    datapoints = [
        dp("a", 0.05, 0.95),
        dp("b", 0.55, 0.55),
        dp("c", 0.9999999999999998, 0.2),
    ]
    rows = bt.risk_histogram(datapoints, edges=(0.0, 0.5, 1.0))
    assert [(r.edge, r.n_aggregated, r.n_individual) for r in rows] == [
        (0.0, 3, 3),
        (0.5, 2, 2),
        (1.0, 1, 0),  # float dust still reaches the top bucket
    ]
    assert rows[1].pct_aggregated == pytest.approx(200 / 3)
    assert bt.risk_histogram([], edges=(0.5,))[0].pct_aggregated == 0.0


def test_render_range_report(hand_study):
    report = bt.build_range_report(hand_study, 0.5, bt.AGGREGATED, ranges=((3, 4), (5, 5)))
    text = bt.render_range_report(report, {"alpha": 0.1, "lambda": 0.5})
    lines = text.splitlines()
    assert lines[0] == (
        "Decline rates after risk measurement — aggregated risk, threshold 0.5"
    )
    assert "subset points: 1 of 2" in text
    assert "params: alpha=0.1 lambda=0.5" in text
    assert any(line.lstrip().startswith("days delay") for line in lines)
    assert "Average" in text
    assert "n/a" in text  # the zero-spread row renders its missing outperf
    assert text.endswith("\n")


def test_render_comparison_report(hand_study):
    agg = bt.build_range_report(hand_study, 0.5, bt.AGGREGATED, ranges=((3, 4),))
    ind = bt.build_range_report(hand_study, 0.5, bt.INDIVIDUAL, ranges=((3, 4),))
    text = bt.render_comparison_report(bt.build_comparison_report(agg, ind), {})
    assert text.startswith("Aggregated vs. individual risk subsets — threshold 0.5")
    assert "aggregated points: 1, individual points: 1, benchmark: 2" in text
    assert "outperf gap" in text
