"""Price-decline frequencies after quarterly risk measurements.

For every risk datapoint the measurement date is the last trading day inside
its quarter. For each delay d in 3..90 CALENDAR days the price is looked up
at the most recent trading day at or before measurement + d (but strictly
after the measurement itself); the event "decreased" is a strict price
decline versus the measurement-date close. Missing prices leave the event
undefined rather than assumed.

Decline rates of a threshold subset (datapoints whose risk is at least t)
are compared against the benchmark of all valid datapoints. A delay range
[a, b] is summarized by the unweighted mean of its daily rates; the spread
column is the population standard deviation of the BENCHMARK's daily rates
within the range, and outperformance = (subset - benchmark) / that spread.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from datetime import date, timedelta
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import PriceSeries, PriceTable
from .errors import ValidationError
from .quarters import Quarter
from .riskrank import RiskDatapoint

log = logging.getLogger(__name__)

DELAY_LO = 3
DELAY_HI = 90

#: Delay ranges reported, in report order: full span, halves, then decades.
REPORT_RANGES = (
    (3, 90),
    (3, 45),
    (45, 90),
    (3, 10),
    (11, 20),
    (21, 30),
    (31, 40),
    (41, 50),
    (51, 60),
    (61, 70),
    (71, 80),
    (81, 90),
)

REPORT_THRESHOLDS = (0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
HISTOGRAM_EDGES = tuple(round(0.1 * i, 1) for i in range(11))

AGGREGATED = "aggregated"
INDIVIDUAL = "individual"

#: Slack when testing risk >= threshold, so a float-dust 0.9999999999999998
#: still counts as reaching 1.0.
THRESHOLD_SLACK = 1e-9


def risk_value(datapoint: RiskDatapoint, kind: str) -> float:
    if kind == AGGREGATED:
        return datapoint.rr_total
    if kind == INDIVIDUAL:
        return datapoint.x_own
    raise ValidationError(f"unknown risk kind {kind!r}")


def measurement_date(quarter: Quarter, series: PriceSeries) -> date | None:
    """Last trading day within the quarter, or None if the quarter has none."""
    found = series.on_or_before(quarter.end_date)
    if found is None:
        return None
    day, _ = found
    return day if day >= quarter.start_date else None


def decline_event(series: PriceSeries, measured: date, delay: int) -> bool | None:
    """Strict decline at `delay` calendar days after the measurement.

    The delayed price is the most recent close at or before measured+delay;
    if no trading day after the measurement qualifies, the event is
    undefined (None).
    """
    base = series.on_or_before(measured)
    if base is None:
        return None
    hit = series.on_or_before(measured + timedelta(days=delay))
    if hit is None or hit[0] <= measured:
        return None
    return hit[1] < base[1]


class EventStudy:
    """Decline outcomes for every valid datapoint at every delay.

    outcomes[r, c] is 1 (declined), 0 (did not), or -1 (undefined) for
    datapoint r at delay DELAY_LO + c. A datapoint is valid when a
    measurement date exists and at least one delay event is defined;
    the rest are counted, not silently dropped.
    """

    def __init__(
        self,
        datapoints: Sequence[RiskDatapoint],
        outcomes: np.ndarray,
        n_disqualified: int,
        n_no_events: int,
        delay_lo: int = DELAY_LO,
        delay_hi: int = DELAY_HI,
    ):
        self.datapoints = tuple(datapoints)
        self.outcomes = outcomes
        self.n_disqualified = n_disqualified
        self.n_no_events = n_no_events
        self.delay_lo = delay_lo
        self.delay_hi = delay_hi

    def __len__(self) -> int:
        return len(self.datapoints)

    @property
    def delays(self) -> range:
        return range(self.delay_lo, self.delay_hi + 1)

    def indices_at_threshold(self, threshold: float, kind: str) -> np.ndarray:
        """Rows whose risk reaches the threshold (with float slack)."""
        values = np.array(
            [risk_value(dp, kind) for dp in self.datapoints], dtype=float
        )
        return np.flatnonzero(values >= threshold - THRESHOLD_SLACK)

    def daily_rates(self, rows: np.ndarray | None = None) -> np.ndarray:
        """Percent declined per delay over the given rows; NaN where no
        event is defined."""
        outcomes = self.outcomes if rows is None else self.outcomes[rows]
        defined = (outcomes >= 0).sum(axis=0)
        declined = (outcomes == 1).sum(axis=0)
        with np.errstate(invalid="ignore", divide="ignore"):
            rates = np.where(defined > 0, 100.0 * declined / np.maximum(defined, 1), np.nan)
        return rates

    def defined_counts(self, rows: np.ndarray | None = None) -> np.ndarray:
        outcomes = self.outcomes if rows is None else self.outcomes[rows]
        return (outcomes >= 0).sum(axis=0)


def compute_events(
    datapoints: Iterable[RiskDatapoint],
    prices: PriceTable,
    delay_lo: int = DELAY_LO,
    delay_hi: int = DELAY_HI,
) -> EventStudy:
    """Fill measurement dates and evaluate every delay for every datapoint."""
    if not (0 < delay_lo <= delay_hi):
        raise ValidationError(f"bad delay bounds [{delay_lo}, {delay_hi}]")
    kept: list[RiskDatapoint] = []
    rows: list[list[int]] = []
    n_disqualified = 0
    n_no_events = 0
    for dp in datapoints:
        series = prices.get(dp.canonical_id)
        if series is None:
            n_disqualified += 1
            continue
        measured = measurement_date(dp.quarter, series)
        if measured is None:
            n_disqualified += 1
            continue
        row = []
        for delay in range(delay_lo, delay_hi + 1):
            event = decline_event(series, measured, delay)
            row.append(-1 if event is None else int(event))
        if all(v < 0 for v in row):
            n_no_events += 1
            continue
        kept.append(replace(dp, measurement_date=measured))
        rows.append(row)
    outcomes = (
        np.array(rows, dtype=np.int8)
        if rows
        else np.empty((0, delay_hi - delay_lo + 1), dtype=np.int8)
    )
    log.info(
        "event study datapoints=%d disqualified=%d no_defined_events=%d",
        len(kept),
        n_disqualified,
        n_no_events,
    )
    return EventStudy(kept, outcomes, n_disqualified, n_no_events, delay_lo, delay_hi)


@dataclass(frozen=True)
class RangeStat:
    """One report row: decline statistics of a subset over a delay range."""

    label: str
    subset_rate: float
    benchmark_rate: float
    abs_diff: float
    rel_diff: float | None
    benchmark_daily_std: float
    std_outperformance: float | None


def range_stat(
    label: str,
    lo: int,
    hi: int,
    subset_daily: np.ndarray,
    benchmark_daily: np.ndarray,
    delay_lo: int = DELAY_LO,
) -> RangeStat | None:
    """Summarize [lo, hi]; None when either side has no defined day."""
    sl = slice(lo - delay_lo, hi - delay_lo + 1)
    sub = subset_daily[sl]
    bench = benchmark_daily[sl]
    sub = sub[~np.isnan(sub)]
    bench = bench[~np.isnan(bench)]
    if sub.size == 0 or bench.size == 0:
        return None
    subset_rate = float(sub.mean())
    benchmark_rate = float(bench.mean())
    abs_diff = subset_rate - benchmark_rate
    rel_diff = 100.0 * abs_diff / benchmark_rate if benchmark_rate != 0 else None
    std = float(bench.std(ddof=0))
    outperformance = abs_diff / std if std > 0 else None
    return RangeStat(
        label=label,
        subset_rate=subset_rate,
        benchmark_rate=benchmark_rate,
        abs_diff=abs_diff,
        rel_diff=rel_diff,
        benchmark_daily_std=std,
        std_outperformance=outperformance,
    )


def _column_mean(values: list[float | None]) -> float | None:
    defined = [v for v in values if v is not None]
    if not defined:
        return None
    return sum(defined) / len(defined)


def average_row(rows: Sequence[RangeStat], label: str = "Average") -> RangeStat | None:
    """Column-wise mean of the listed rows."""
    if not rows:
        return None
    return RangeStat(
        label=label,
        subset_rate=sum(r.subset_rate for r in rows) / len(rows),
        benchmark_rate=sum(r.benchmark_rate for r in rows) / len(rows),
        abs_diff=sum(r.abs_diff for r in rows) / len(rows),
        rel_diff=_column_mean([r.rel_diff for r in rows]),
        benchmark_daily_std=sum(r.benchmark_daily_std for r in rows) / len(rows),
        std_outperformance=_column_mean([r.std_outperformance for r in rows]),
    )


@dataclass(frozen=True)
class RangeReport:
    """Decline-rate rows for one threshold subset vs. the benchmark."""

    kind: str
    threshold: float
    n_subset: int
    n_benchmark: int
    rows: tuple[RangeStat, ...]
    average: RangeStat | None


def build_range_report(
    study: EventStudy,
    threshold: float,
    kind: str,
    ranges: Sequence[tuple[int, int]] = REPORT_RANGES,
) -> RangeReport:
    rows_idx = study.indices_at_threshold(threshold, kind)
    subset_daily = study.daily_rates(rows_idx)
    benchmark_daily = study.daily_rates()
    rows: list[RangeStat] = []
    for lo, hi in ranges:
        stat = range_stat(f"{lo} to {hi}", lo, hi, subset_daily, benchmark_daily, study.delay_lo)
        if stat is None:
            log.warning(
                "range %d-%d omitted for kind=%s threshold=%.1f: no defined events",
                lo,
                hi,
                kind,
                threshold,
            )
            continue
        rows.append(stat)
    return RangeReport(
        kind=kind,
        threshold=threshold,
        n_subset=int(rows_idx.size),
        n_benchmark=len(study),
        rows=tuple(rows),
        average=average_row(rows),
    )


@dataclass(frozen=True)
class ComparisonRow:
    label: str
    agg_rate: float
    agg_outperformance: float | None
    ind_rate: float
    ind_outperformance: float | None
    outperformance_gap: float | None


@dataclass(frozen=True)
class ComparisonReport:
    """Aggregated vs. individual risk subsets at one threshold."""

    threshold: float
    n_aggregated: int
    n_individual: int
    n_benchmark: int
    rows: tuple[ComparisonRow, ...]
    average: ComparisonRow | None


def _comparison_row(agg: RangeStat, ind: RangeStat) -> ComparisonRow:
    gap = None
    if agg.std_outperformance is not None and ind.std_outperformance is not None:
        gap = agg.std_outperformance - ind.std_outperformance
    return ComparisonRow(
        label=agg.label,
        agg_rate=agg.subset_rate,
        agg_outperformance=agg.std_outperformance,
        ind_rate=ind.subset_rate,
        ind_outperformance=ind.std_outperformance,
        outperformance_gap=gap,
    )


def build_comparison_report(
    aggregated: RangeReport, individual: RangeReport
) -> ComparisonReport:
    """Join two same-threshold range reports row-by-row on the range label."""
    if aggregated.threshold != individual.threshold:
        raise ValidationError(
            "comparison requires matching thresholds, got "
            f"{aggregated.threshold} and {individual.threshold}"
        )
    by_label = {r.label: r for r in individual.rows}
    rows = [
        _comparison_row(agg, by_label[agg.label])
        for agg in aggregated.rows
        if agg.label in by_label
    ]
    average = None
    if aggregated.average is not None and individual.average is not None:
        average = _comparison_row(aggregated.average, individual.average)
    return ComparisonReport(
        threshold=aggregated.threshold,
        n_aggregated=aggregated.n_subset,
        n_individual=individual.n_subset,
        n_benchmark=aggregated.n_benchmark,
        rows=tuple(rows),
        average=average,
    )


def best_single_delay(
    study: EventStudy, threshold: float, kind: str
) -> tuple[int, float] | None:
    """Delay with the largest subset-minus-benchmark daily rate difference.

    Ties go to the smallest delay; None when no delay has both rates.
    """
    rows = study.indices_at_threshold(threshold, kind)
    subset_daily = study.daily_rates(rows)
    benchmark_daily = study.daily_rates()
    best: tuple[int, float] | None = None
    for offset, delay in enumerate(study.delays):
        s, b = subset_daily[offset], benchmark_daily[offset]
        if math.isnan(s) or math.isnan(b):
            continue
        diff = float(s - b)
        if best is None or diff > best[1]:
            best = (delay, diff)
    return best


def proportion_stderr(p1: float, n1: int, p2: float, n2: int) -> float:
    """Standard error of the difference of two sample proportions."""
    for p in (p1, p2):
        if not (0.0 <= p <= 1.0):
            raise ValidationError(f"proportion outside [0,1]: {p}")
    if n1 <= 0 or n2 <= 0:
        raise ValidationError(f"sample sizes must be positive, got {n1}, {n2}")
    return math.sqrt(p1 * (1 - p1) / n1 + p2 * (1 - p2) / n2)


@dataclass(frozen=True)
class HistogramRow:
    edge: float
    n_aggregated: int
    pct_aggregated: float
    n_individual: int
    pct_individual: float


def risk_histogram(
    datapoints: Sequence[RiskDatapoint],
    edges: Sequence[float] = HISTOGRAM_EDGES,
) -> list[HistogramRow]:
    """Counts of datapoints whose risk reaches each edge, both risk kinds."""
    total = len(datapoints)
    rows = []
    for edge in edges:
        n_agg = sum(1 for dp in datapoints if dp.rr_total >= edge - THRESHOLD_SLACK)
        n_ind = sum(1 for dp in datapoints if dp.x_own >= edge - THRESHOLD_SLACK)
        rows.append(
            HistogramRow(
                edge=edge,
                n_aggregated=n_agg,
                pct_aggregated=100.0 * n_agg / total if total else 0.0,
                n_individual=n_ind,
                pct_individual=100.0 * n_ind / total if total else 0.0,
            )
        )
    return rows


# ---------------------------------------------------------------------------
# Plain-text rendering
# ---------------------------------------------------------------------------


def _fmt(value: float | None, nd: int = 2) -> str:
    return "n/a" if value is None else f"{value:.{nd}f}"


def _render_table(header: list[str], body: list[list[str]]) -> list[str]:
    widths = [
        max(len(header[c]), *(len(row[c]) for row in body)) if body else len(header[c])
        for c in range(len(header))
    ]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for row in body:
        lines.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
    return lines


def render_range_report(report: RangeReport, params: Mapping[str, object]) -> str:
    """Aligned text table with the calibration and formula notes on top."""
    lines = [
        f"Decline rates after risk measurement — {report.kind} risk, "
        f"threshold {report.threshold:.1f}",
        "subset: datapoints with risk >= threshold; benchmark: all valid datapoints",
        f"subset points: {report.n_subset} of {report.n_benchmark}",
        "params: " + " ".join(f"{k}={v}" for k, v in sorted(params.items())),
        "range rate = unweighted mean of daily decline rates (percent) in the range;",
        "spread = population std of the benchmark's daily rates in the range;",
        "outperformance = (subset rate - benchmark rate) / spread",
        "",
    ]
    header = [
        "days delay",
        "subset %",
        "benchmark %",
        "abs diff pp",
        "rel diff %",
        "bench std",
        "outperf",
    ]
    body = []
    for row in (*report.rows, *([report.average] if report.average else [])):
        body.append(
            [
                row.label,
                _fmt(row.subset_rate),
                _fmt(row.benchmark_rate),
                _fmt(row.abs_diff),
                _fmt(row.rel_diff),
                _fmt(row.benchmark_daily_std),
                _fmt(row.std_outperformance),
            ]
        )
    lines.extend(_render_table(header, body))
    return "\n".join(lines) + "\n"


def render_comparison_report(
    report: ComparisonReport, params: Mapping[str, object]
) -> str:
    lines = [
        f"Aggregated vs. individual risk subsets — threshold {report.threshold:.1f}",
        f"aggregated points: {report.n_aggregated}, individual points: "
        f"{report.n_individual}, benchmark: {report.n_benchmark}",
        "params: " + " ".join(f"{k}={v}" for k, v in sorted(params.items())),
        "outperf gap = aggregated outperformance - individual outperformance",
        "",
    ]
    header = [
        "days delay",
        "agg %",
        "agg outperf",
        "ind %",
        "ind outperf",
        "outperf gap",
    ]
    body = []
    for row in (*report.rows, *([report.average] if report.average else [])):
        body.append(
            [
                row.label,
                _fmt(row.agg_rate),
                _fmt(row.agg_outperformance),
                _fmt(row.ind_rate),
                _fmt(row.ind_outperformance),
                _fmt(row.outperformance_gap),
            ]
        )
    lines.extend(_render_table(header, body))
    return "\n".join(lines) + "\n"
