"""Staged pipeline with file artifact handoff and deterministic manifests.

Stages: parse -> networks -> rank -> risk -> backtest -> report. Each stage
reads the previous stage's artifacts (never its in-memory state), writes its
own artifacts atomically (temp file + rename), and records a manifest with
the config fingerprint, input digests, row counts, and stage parameters.
Two runs from identical inputs and config produce byte-identical artifacts.

`run_study` chains the same computations in memory and returns the results
without writing artifacts; tests and bulk simulations use it to avoid I/O.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from . import backtest as bt
from .centrality import (
    ABSOLUTE,
    NORMALIZED,
    CentralityTable,
    RankEntry,
    average_rank,
    build_tables,
    information_centrality,
)
from .corpus import (
    EntityUniverse,
    MarketCapTable,
    PriceTable,
    load_articles,
    load_marketcaps,
    load_prices,
    load_universe,
)
from .entities import MatcherConfig, MatcherSet, OccurrenceSet, parse_corpus
from .errors import DependencyError, ValidationError
from .networks import (
    MIXED,
    NETWORK_KINDS,
    QuarterNetwork,
    build_networks,
    network_stats,
    smooth,
)
from .quarters import Quarter, parse_quarter, quarter_range
from .riskrank import (
    RiskCalibration,
    RiskDatapoint,
    riskrank_quarter,
    select_universe,
)

log = logging.getLogger(__name__)

# Artifact file names, one namespace for every stage.
A_OCCURRENCES = "occurrences.csv"
A_NETWORK_EDGES = "network_edges.csv"
A_NETWORK_NODES = "network_nodes.csv"
A_NETWORK_STATS = "network_stats.csv"
A_CENTRALITY = "centrality.csv"
A_AVERAGE_RANK = "average_rank.csv"
A_TIMESERIES = "centrality_timeseries.csv"
A_SELECTED = "selected_universe.csv"
A_RISK = "risk.csv"
A_VALID_POINTS = "valid_datapoints.csv"
A_EVENTS = "decline_events.csv"
A_RANGES_CSV = "backtest_ranges.csv"
A_RANGES_TXT = "backtest_ranges.txt"
A_COMPARISON_CSV = "backtest_comparison.csv"
A_COMPARISON_TXT = "backtest_comparison.txt"
A_DAILY = "backtest_daily.csv"
A_BEST_DELAY = "best_delay.csv"
A_HISTOGRAM = "risk_histogram.csv"
A_PRICE_SERIES = "risk_price_series.csv"

STAGE_ORDER = ("parse", "networks", "rank", "risk", "backtest", "report")


@dataclass
class RunConfig:
    """Everything a pipeline run depends on."""

    articles: Path
    universe: Path
    prices: Path
    marketcaps: Path
    output: Path
    first_quarter: Quarter = Quarter(2011, 1)
    last_quarter: Quarter = Quarter(2016, 2)
    alpha: float = 0.1
    calibration: RiskCalibration = field(default_factory=RiskCalibration)
    top_k: int = 50
    thresholds: tuple[float, ...] = bt.REPORT_THRESHOLDS
    delay_lo: int = bt.DELAY_LO
    delay_hi: int = bt.DELAY_HI
    seed: int = 7
    threads: int = 1

    def validate(self, require_inputs: bool = True) -> None:
        if self.alpha <= 0:
            raise ValidationError(f"alpha must be positive, got {self.alpha}")
        if self.top_k < 1:
            raise ValidationError(f"top_k must be at least 1, got {self.top_k}")
        if not (0 < self.delay_lo <= self.delay_hi):
            raise ValidationError(
                f"delay bounds must satisfy 0 < lo <= hi, got {self.delay_lo}..{self.delay_hi}"
            )
        if self.first_quarter > self.last_quarter:
            raise ValidationError(
                f"quarter window reversed: {self.first_quarter} > {self.last_quarter}"
            )
        for t in self.thresholds:
            if not (0.0 <= t <= 1.0):
                raise ValidationError(f"threshold outside [0,1]: {t}")
        if self.threads < 1:
            raise ValidationError(f"threads must be at least 1, got {self.threads}")
        if require_inputs:
            for name in ("articles", "universe", "prices", "marketcaps"):
                path = getattr(self, name)
                if not Path(path).is_file():
                    raise ValidationError(f"{name} file not found: {path}")

    @property
    def quarters(self) -> list[Quarter]:
        return quarter_range(self.first_quarter, self.last_quarter)

    @property
    def window(self) -> tuple[date, date]:
        return (self.first_quarter.start_date, self.last_quarter.end_date)

    def fingerprint(self) -> str:
        """Hash of every behavior-affecting parameter (paths by basename)."""
        payload = {
            "articles": Path(self.articles).name,
            "universe": Path(self.universe).name,
            "prices": Path(self.prices).name,
            "marketcaps": Path(self.marketcaps).name,
            "quarters": f"{self.first_quarter}..{self.last_quarter}",
            "alpha": self.alpha,
            "lambda": self.calibration.lam,
            "mu": self.calibration.mu,
            "theta": self.calibration.theta,
            "top_k": self.top_k,
            "thresholds": list(self.thresholds),
            "delays": [self.delay_lo, self.delay_hi],
            "seed": self.seed,
        }
        blob = json.dumps(payload, sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()


def config_from_file(path: str | Path, overrides: Mapping[str, object] | None = None) -> RunConfig:
    """Build a RunConfig from a JSON file; relative paths resolve against it."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ValidationError(f"config {path} must hold a JSON object")
    merged: dict[str, object] = dict(raw)
    if overrides:
        merged.update({k: v for k, v in overrides.items() if v is not None})
    return config_from_mapping(merged, base_dir=path.parent)


def config_from_mapping(
    raw: Mapping[str, object], base_dir: Path | None = None
) -> RunConfig:
    base = base_dir or Path.cwd()

    def path_of(key: str) -> Path:
        value = raw.get(key)
        if value is None:
            raise ValidationError(f"config is missing required path {key!r}")
        p = Path(str(value))
        return p if p.is_absolute() else base / p

    quarters = str(raw.get("quarters", "2011Q1..2016Q2"))
    try:
        first_label, _, last_label = quarters.partition("..")
        first = parse_quarter(first_label)
        last = parse_quarter(last_label or first_label)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None

    calibration = RiskCalibration(
        lam=float(raw.get("lambda", 0.5)),
        mu=float(raw.get("mu", 0.5)),
        theta=float(raw.get("theta", 0.5)),
    )
    delays = raw.get("delays", [bt.DELAY_LO, bt.DELAY_HI])
    if not (isinstance(delays, (list, tuple)) and len(delays) == 2):
        raise ValidationError(f"delays must be a [lo, hi] pair, got {delays!r}")
    thresholds = raw.get("thresholds", list(bt.REPORT_THRESHOLDS))
    if not isinstance(thresholds, (list, tuple)):
        raise ValidationError("thresholds must be a list")

    return RunConfig(
        articles=path_of("articles"),
        universe=path_of("universe"),
        prices=path_of("prices"),
        marketcaps=path_of("marketcaps"),
        output=path_of("output"),
        first_quarter=first,
        last_quarter=last,
        alpha=float(raw.get("alpha", 0.1)),
        calibration=calibration,
        top_k=int(raw.get("top_k", 50)),
        thresholds=tuple(float(t) for t in thresholds),
        delay_lo=int(delays[0]),
        delay_hi=int(delays[1]),
        seed=int(raw.get("seed", 7)),
        threads=int(raw.get("threads", 1)),
    )


# ---------------------------------------------------------------------------
# Atomic artifact I/O
# ---------------------------------------------------------------------------


def _atomic_write(path: Path, data: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> int:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    n = 0
    for row in rows:
        writer.writerow(["" if v is None else v for v in row])
        n += 1
    _atomic_write(path, buf.getvalue())
    return n


def _f(value: float | None) -> str | None:
    """Full-precision float cell (round-trips exactly)."""
    return None if value is None else repr(float(value))


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _file_entry(path: Path) -> dict:
    with path.open("r", encoding="utf-8") as fh:
        lines = sum(1 for _ in fh)
    rows = max(0, lines - 1) if path.suffix == ".csv" else lines
    return {"sha256": _sha256(path), "rows": rows}


def _write_manifest(
    cfg: RunConfig,
    stage: str,
    inputs: Sequence[Path],
    outputs: Sequence[Path],
    params: Mapping[str, object],
) -> Path:
    manifest = {
        "stage": stage,
        "config_hash": cfg.fingerprint(),
        "inputs": {p.name: _file_entry(p) for p in sorted(inputs)},
        "outputs": {p.name: _file_entry(p) for p in sorted(outputs)},
        "params": dict(sorted(params.items())),
    }
    path = cfg.output / f"{stage}.manifest.json"
    _atomic_write(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _require(cfg: RunConfig, stage: str, *names: str) -> list[Path]:
    paths = []
    for name in names:
        path = cfg.output / name
        if not path.is_file():
            prior = STAGE_ORDER[STAGE_ORDER.index(stage) - 1]
            raise DependencyError(
                f"stage {stage!r} needs {name} — run the {prior!r} command first"
            )
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# Shared computations (used by both the file stages and run_study)
# ---------------------------------------------------------------------------


def compute_networks(
    occurrences: Mapping[Quarter, list[OccurrenceSet]],
    universe_ids: Sequence[str],
) -> dict[Quarter, dict[str, QuarterNetwork]]:
    return {
        quarter: build_networks(occurrences[quarter], quarter, universe_ids)
        for quarter in sorted(occurrences)
    }


def compute_tables(
    networks: Mapping[Quarter, Mapping[str, QuarterNetwork]],
    caps: MarketCapTable,
    alpha: float,
    threads: int = 1,
) -> list[CentralityTable]:
    """Absolute and normalized centrality tables for every (quarter, polarity)."""
    jobs = [
        (quarter, kind, networks[quarter][kind])
        for quarter in sorted(networks)
        for kind in NETWORK_KINDS
    ]

    def solve(job) -> tuple[Quarter, str, dict[str, float]]:
        quarter, kind, network = job
        raw = information_centrality(smooth(network, alpha))
        return quarter, kind, raw

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            solved = list(pool.map(solve, jobs))
    else:
        solved = [solve(job) for job in jobs]

    tables: list[CentralityTable] = []
    for quarter, kind, raw in solved:
        absolute, normalized = build_tables(quarter, kind, raw, caps)
        tables.extend((absolute, normalized))
    return tables


def mixed_rank_lists(
    tables: Sequence[CentralityTable], top_k: int
) -> tuple[list[RankEntry], list[RankEntry]]:
    abs_tables = [t for t in tables if t.polarity == MIXED and t.mode == ABSOLUTE]
    norm_tables = [t for t in tables if t.polarity == MIXED and t.mode == NORMALIZED]
    return average_rank(abs_tables, top_k), average_rank(norm_tables, top_k)


def compute_risk(
    networks: Mapping[Quarter, Mapping[str, QuarterNetwork]],
    occurrences: Mapping[Quarter, list[OccurrenceSet]],
    selected: Sequence[str],
    calibration: RiskCalibration,
) -> list[RiskDatapoint]:
    datapoints: list[RiskDatapoint] = []
    for quarter in sorted(networks):
        datapoints.extend(
            riskrank_quarter(
                networks[quarter][MIXED],
                occurrences.get(quarter, []),
                selected,
                calibration,
            )
        )
    return datapoints


@dataclass
class ReportBundle:
    range_reports: dict[tuple[str, float], bt.RangeReport]
    comparison: bt.ComparisonReport | None
    histogram: list[bt.HistogramRow]
    best_delays: dict[tuple[str, float], tuple[int, float] | None]


def compute_reports(study: bt.EventStudy, thresholds: Sequence[float]) -> ReportBundle:
    range_reports: dict[tuple[str, float], bt.RangeReport] = {}
    best_delays: dict[tuple[str, float], tuple[int, float] | None] = {}
    for kind in (bt.AGGREGATED, bt.INDIVIDUAL):
        for threshold in thresholds:
            report = bt.build_range_report(study, threshold, kind)
            range_reports[(kind, threshold)] = report
            best_delays[(kind, threshold)] = bt.best_single_delay(study, threshold, kind)
    comparison = None
    if thresholds:
        top = max(thresholds)
        comparison = bt.build_comparison_report(
            range_reports[(bt.AGGREGATED, top)], range_reports[(bt.INDIVIDUAL, top)]
        )
    histogram = bt.risk_histogram(study.datapoints)
    return ReportBundle(
        range_reports=range_reports,
        comparison=comparison,
        histogram=histogram,
        best_delays=best_delays,
    )


@dataclass
class StudyResult:
    """Everything an in-memory end-to-end run produces."""

    config: RunConfig
    occurrences: dict[Quarter, list[OccurrenceSet]]
    networks: dict[Quarter, dict[str, QuarterNetwork]]
    tables: list[CentralityTable]
    absolute_top: list[RankEntry]
    normalized_top: list[RankEntry]
    selected: tuple[str, ...]
    datapoints: list[RiskDatapoint]
    study: bt.EventStudy
    reports: ReportBundle


def run_study(cfg: RunConfig, matcher_config: MatcherConfig | None = None) -> StudyResult:
    """Load inputs and run every stage in memory (no artifacts written)."""
    cfg.validate(require_inputs=True)
    universe = load_universe(cfg.universe)
    articles = load_articles(cfg.articles, window=cfg.window)
    prices = load_prices(cfg.prices, universe)
    caps = load_marketcaps(cfg.marketcaps)

    matchers = MatcherSet(universe, matcher_config)
    occurrences = parse_corpus(articles, matchers)
    networks = compute_networks(occurrences, universe.ids())
    tables = compute_tables(networks, caps, cfg.alpha, cfg.threads)
    absolute_top, normalized_top = mixed_rank_lists(tables, cfg.top_k)
    selected = select_universe(absolute_top, normalized_top, cfg.top_k)
    datapoints = compute_risk(networks, occurrences, selected, cfg.calibration)
    study = bt.compute_events(datapoints, prices, cfg.delay_lo, cfg.delay_hi)
    reports = compute_reports(study, cfg.thresholds)
    return StudyResult(
        config=cfg,
        occurrences=occurrences,
        networks=networks,
        tables=tables,
        absolute_top=absolute_top,
        normalized_top=normalized_top,
        selected=selected,
        datapoints=datapoints,
        study=study,
        reports=reports,
    )


# ---------------------------------------------------------------------------
# File-based stages
# ---------------------------------------------------------------------------


def stage_parse(cfg: RunConfig, matcher_config: MatcherConfig | None = None) -> list[Path]:
    cfg.validate(require_inputs=True)
    universe = load_universe(cfg.universe)
    articles = load_articles(cfg.articles, window=cfg.window)
    matchers = MatcherSet(universe, matcher_config)
    occurrences = parse_corpus(articles, matchers)

    out = cfg.output / A_OCCURRENCES
    rows = []
    for quarter in sorted(occurrences):
        for occ in sorted(occurrences[quarter], key=lambda o: o.article_id):
            rows.append(
                (occ.article_id, quarter.label, occ.polarity, "|".join(sorted(occ.companies)))
            )
    _write_csv(out, ("article_id", "quarter", "polarity", "companies"), rows)
    manifest = _write_manifest(
        cfg,
        "parse",
        inputs=[Path(cfg.articles), Path(cfg.universe)],
        outputs=[out],
        params={"quarters": f"{cfg.first_quarter}..{cfg.last_quarter}"},
    )
    return [out, manifest]


def _load_occurrences(path: Path) -> dict[Quarter, list[OccurrenceSet]]:
    occurrences: dict[Quarter, list[OccurrenceSet]] = {}
    with path.open("r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            quarter = parse_quarter(row["quarter"])
            companies = frozenset(c for c in row["companies"].split("|") if c)
            occurrences.setdefault(quarter, []).append(
                OccurrenceSet(
                    article_id=row["article_id"],
                    quarter=quarter,
                    polarity=row["polarity"],
                    companies=companies,
                )
            )
    return {q: occurrences[q] for q in sorted(occurrences)}


def stage_networks(cfg: RunConfig) -> list[Path]:
    cfg.validate(require_inputs=True)
    (occ_path,) = _require(cfg, "networks", A_OCCURRENCES)
    universe = load_universe(cfg.universe)
    occurrences = _load_occurrences(occ_path)
    networks = compute_networks(occurrences, universe.ids())

    edge_rows, node_rows, stat_rows = [], [], []
    for quarter in sorted(networks):
        for kind in NETWORK_KINDS:
            network = networks[quarter][kind]
            for (i, j), weight in network.edge_weights.items():
                edge_rows.append((quarter.label, kind, i, j, weight))
            for node, s in network.node_weights.items():
                node_rows.append((quarter.label, kind, node, s))
            stats = network_stats(network)
            stat_rows.append(
                (
                    quarter.label,
                    kind,
                    stats["n_nodes"],
                    stats["n_edges"],
                    stats["article_count"],
                    _f(stats["avg_edges_per_node"]),
                    stats["max_degree"],
                    stats["max_degree_node"],
                )
            )

    edges = cfg.output / A_NETWORK_EDGES
    nodes = cfg.output / A_NETWORK_NODES
    stats_path = cfg.output / A_NETWORK_STATS
    _write_csv(edges, ("quarter", "polarity", "i", "j", "weight"), edge_rows)
    _write_csv(nodes, ("quarter", "polarity", "canonical_id", "s"), node_rows)
    _write_csv(
        stats_path,
        (
            "quarter",
            "polarity",
            "n_nodes",
            "n_edges",
            "article_count",
            "avg_edges_per_node",
            "max_degree",
            "max_degree_node",
        ),
        stat_rows,
    )
    manifest = _write_manifest(
        cfg,
        "networks",
        inputs=[occ_path, Path(cfg.universe)],
        outputs=[edges, nodes, stats_path],
        params={},
    )
    return [edges, nodes, stats_path, manifest]


def _load_networks(
    cfg: RunConfig, universe_ids: Sequence[str], stage: str = "rank"
) -> dict[Quarter, dict[str, QuarterNetwork]]:
    edges_path, nodes_path, stats_path = _require(
        cfg, stage, A_NETWORK_EDGES, A_NETWORK_NODES, A_NETWORK_STATS
    )
    nodes = tuple(sorted(universe_ids))
    edge_maps: dict[tuple[Quarter, str], dict[tuple[str, str], int]] = {}
    node_maps: dict[tuple[Quarter, str], dict[str, int]] = {}
    article_counts: dict[tuple[Quarter, str], int] = {}

    with stats_path.open("r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            key = (parse_quarter(row["quarter"]), row["polarity"])
            article_counts[key] = int(row["article_count"])
            edge_maps.setdefault(key, {})
            node_maps.setdefault(key, {})
    with edges_path.open("r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            key = (parse_quarter(row["quarter"]), row["polarity"])
            edge_maps.setdefault(key, {})[(row["i"], row["j"])] = int(row["weight"])
    with nodes_path.open("r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            key = (parse_quarter(row["quarter"]), row["polarity"])
            node_maps.setdefault(key, {})[row["canonical_id"]] = int(row["s"])

    networks: dict[Quarter, dict[str, QuarterNetwork]] = {}
    for (quarter, kind), edges in edge_maps.items():
        networks.setdefault(quarter, {})[kind] = QuarterNetwork(
            quarter=quarter,
            polarity=kind,
            nodes=nodes,
            node_weights=dict(sorted(node_maps.get((quarter, kind), {}).items())),
            edge_weights=dict(sorted(edges.items())),
            article_count=article_counts.get((quarter, kind), 0),
        )
    return {q: networks[q] for q in sorted(networks)}


def stage_rank(cfg: RunConfig) -> list[Path]:
    cfg.validate(require_inputs=True)
    universe = load_universe(cfg.universe)
    caps = load_marketcaps(cfg.marketcaps)
    networks = _load_networks(cfg, universe.ids())
    tables = compute_tables(networks, caps, cfg.alpha, cfg.threads)

    table_rows = []
    for table in tables:
        for cid in sorted(table.scores):
            table_rows.append(
                (
                    table.quarter.label,
                    table.polarity,
                    table.mode,
                    cid,
                    _f(table.scores[cid]),
                    table.ranks[cid],
                )
            )

    rank_rows = []
    top_by_mode: dict[tuple[str, str], list[RankEntry]] = {}
    for polarity in NETWORK_KINDS:
        for mode in (ABSOLUTE, NORMALIZED):
            subset = [t for t in tables if t.polarity == polarity and t.mode == mode]
            entries = average_rank(subset, cfg.top_k)
            top_by_mode[(polarity, mode)] = entries
            for entry in entries:
                rank_rows.append(
                    (
                        polarity,
                        mode,
                        entry.canonical_id,
                        _f(entry.average_rank),
                        entry.quarters_scored,
                    )
                )

    series_rows = []
    for mode in (ABSOLUTE, NORMALIZED):
        keep = {e.canonical_id for e in top_by_mode[(MIXED, mode)]}
        for table in tables:
            if table.polarity != MIXED or table.mode != mode:
                continue
            for cid in sorted(keep & set(table.scores)):
                series_rows.append(
                    (mode, table.quarter.label, cid, _f(table.scores[cid]))
                )

    centrality_path = cfg.output / A_CENTRALITY
    rank_path = cfg.output / A_AVERAGE_RANK
    series_path = cfg.output / A_TIMESERIES
    _write_csv(
        centrality_path,
        ("quarter", "polarity", "mode", "canonical_id", "score", "rank"),
        table_rows,
    )
    _write_csv(
        rank_path,
        ("polarity", "mode", "canonical_id", "average_rank", "quarters_scored"),
        rank_rows,
    )
    _write_csv(series_path, ("mode", "quarter", "canonical_id", "score"), series_rows)
    manifest = _write_manifest(
        cfg,
        "rank",
        inputs=_require(cfg, "rank", A_NETWORK_EDGES, A_NETWORK_NODES, A_NETWORK_STATS)
        + [Path(cfg.marketcaps)],
        outputs=[centrality_path, rank_path, series_path],
        params={"alpha": cfg.alpha, "top_k": cfg.top_k, "threads": cfg.threads},
    )
    return [centrality_path, rank_path, series_path, manifest]


def _load_rank_entries(path: Path) -> dict[tuple[str, str], list[RankEntry]]:
    out: dict[tuple[str, str], list[RankEntry]] = {}
    with path.open("r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            out.setdefault((row["polarity"], row["mode"]), []).append(
                RankEntry(
                    canonical_id=row["canonical_id"],
                    average_rank=float(row["average_rank"]),
                    quarters_scored=int(row["quarters_scored"]),
                )
            )
    return out


def stage_risk(cfg: RunConfig) -> list[Path]:
    cfg.validate(require_inputs=True)
    occ_path, rank_path = _require(cfg, "risk", A_OCCURRENCES, A_AVERAGE_RANK)
    universe = load_universe(cfg.universe)
    occurrences = _load_occurrences(occ_path)
    networks = _load_networks(cfg, universe.ids(), stage="risk")
    rank_lists = _load_rank_entries(rank_path)
    selected = select_universe(
        rank_lists.get((MIXED, ABSOLUTE), []),
        rank_lists.get((MIXED, NORMALIZED), []),
        cfg.top_k,
    )
    datapoints = compute_risk(networks, occurrences, selected, cfg.calibration)

    cal = cfg.calibration
    risk_rows = [
        (
            dp.quarter.label,
            dp.canonical_id,
            _f(dp.x_own),
            _f(dp.rr_own),
            _f(dp.rr_direct),
            _f(dp.rr_indirect),
            _f(dp.rr_total),
            _f(cal.lam),
            _f(cal.mu),
            _f(cal.theta),
        )
        for dp in datapoints
    ]
    selected_path = cfg.output / A_SELECTED
    risk_path = cfg.output / A_RISK
    _write_csv(selected_path, ("canonical_id",), [(cid,) for cid in selected])
    _write_csv(
        risk_path,
        (
            "quarter",
            "canonical_id",
            "x_own",
            "rr_own",
            "rr_direct",
            "rr_indirect",
            "rr_total",
            "lambda",
            "mu",
            "theta",
        ),
        risk_rows,
    )
    manifest = _write_manifest(
        cfg,
        "risk",
        inputs=[occ_path, rank_path, cfg.output / A_NETWORK_EDGES, Path(cfg.universe)],
        outputs=[selected_path, risk_path],
        params={
            "lambda": cal.lam,
            "mu": cal.mu,
            "theta": cal.theta,
            "top_k": cfg.top_k,
        },
    )
    return [selected_path, risk_path, manifest]


def _load_risk(path: Path) -> list[RiskDatapoint]:
    datapoints = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            datapoints.append(
                RiskDatapoint(
                    canonical_id=row["canonical_id"],
                    quarter=parse_quarter(row["quarter"]),
                    x_own=float(row["x_own"]),
                    rr_own=float(row["rr_own"]),
                    rr_direct=float(row["rr_direct"]),
                    rr_indirect=float(row["rr_indirect"]),
                    rr_total=float(row["rr_total"]),
                )
            )
    return datapoints


def stage_backtest(cfg: RunConfig) -> list[Path]:
    cfg.validate(require_inputs=True)
    (risk_path,) = _require(cfg, "backtest", A_RISK)
    universe = load_universe(cfg.universe)
    prices = load_prices(cfg.prices, universe)
    datapoints = _load_risk(risk_path)
    study = bt.compute_events(datapoints, prices, cfg.delay_lo, cfg.delay_hi)

    valid_rows = [
        (
            dp.quarter.label,
            dp.canonical_id,
            dp.measurement_date.isoformat() if dp.measurement_date else None,
            _f(dp.x_own),
            _f(dp.rr_own),
            _f(dp.rr_direct),
            _f(dp.rr_indirect),
            _f(dp.rr_total),
        )
        for dp in study.datapoints
    ]
    event_rows = []
    for r, dp in enumerate(study.datapoints):
        for c, delay in enumerate(study.delays):
            outcome = int(study.outcomes[r, c])
            event_rows.append(
                (
                    dp.quarter.label,
                    dp.canonical_id,
                    delay,
                    {1: "true", 0: "false", -1: ""}[outcome],
                )
            )

    valid_path = cfg.output / A_VALID_POINTS
    events_path = cfg.output / A_EVENTS
    _write_csv(
        valid_path,
        (
            "quarter",
            "canonical_id",
            "measurement_date",
            "x_own",
            "rr_own",
            "rr_direct",
            "rr_indirect",
            "rr_total",
        ),
        valid_rows,
    )
    _write_csv(
        events_path, ("quarter", "canonical_id", "delay", "decreased"), event_rows
    )
    manifest = _write_manifest(
        cfg,
        "backtest",
        inputs=[risk_path, Path(cfg.prices)],
        outputs=[valid_path, events_path],
        params={
            "delay_lo": cfg.delay_lo,
            "delay_hi": cfg.delay_hi,
            "n_valid": len(study),
            "n_disqualified": study.n_disqualified,
            "n_no_events": study.n_no_events,
        },
    )
    return [valid_path, events_path, manifest]


def _load_event_study(cfg: RunConfig) -> bt.EventStudy:
    import numpy as np

    valid_path, events_path = _require(cfg, "report", A_VALID_POINTS, A_EVENTS)
    datapoints: list[RiskDatapoint] = []
    index: dict[tuple[str, str], int] = {}
    with valid_path.open("r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            dp = RiskDatapoint(
                canonical_id=row["canonical_id"],
                quarter=parse_quarter(row["quarter"]),
                x_own=float(row["x_own"]),
                rr_own=float(row["rr_own"]),
                rr_direct=float(row["rr_direct"]),
                rr_indirect=float(row["rr_indirect"]),
                rr_total=float(row["rr_total"]),
                measurement_date=date.fromisoformat(row["measurement_date"]),
            )
            index[(row["quarter"], row["canonical_id"])] = len(datapoints)
            datapoints.append(dp)

    n_delays = cfg.delay_hi - cfg.delay_lo + 1
    outcomes = np.full((len(datapoints), n_delays), -1, dtype=np.int8)
    with events_path.open("r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            key = (row["quarter"], row["canonical_id"])
            r = index.get(key)
            if r is None:
                raise ValidationError(
                    f"event row for unknown datapoint {key} in {events_path.name}"
                )
            c = int(row["delay"]) - cfg.delay_lo
            if row["decreased"]:
                outcomes[r, c] = 1 if row["decreased"] == "true" else 0
    return bt.EventStudy(
        datapoints, outcomes, 0, 0, cfg.delay_lo, cfg.delay_hi
    )


def stage_report(cfg: RunConfig) -> list[Path]:
    cfg.validate(require_inputs=True)
    study = _load_event_study(cfg)
    universe = load_universe(cfg.universe)
    prices = load_prices(cfg.prices, universe)
    bundle = compute_reports(study, cfg.thresholds)
    cal = cfg.calibration
    params = {
        "alpha": cfg.alpha,
        "lambda": cal.lam,
        "mu": cal.mu,
        "theta": cal.theta,
        "top_k": cfg.top_k,
        "delays": f"{cfg.delay_lo}..{cfg.delay_hi}",
    }

    range_rows = []
    for (kind, threshold), report in sorted(bundle.range_reports.items()):
        for row in (*report.rows, *([report.average] if report.average else [])):
            range_rows.append(
                (
                    kind,
                    _f(threshold),
                    row.label,
                    _f(row.subset_rate),
                    _f(row.benchmark_rate),
                    _f(row.abs_diff),
                    _f(row.rel_diff),
                    _f(row.benchmark_daily_std),
                    _f(row.std_outperformance),
                    report.n_subset,
                    report.n_benchmark,
                )
            )

    daily_rows = []
    benchmark_daily = study.daily_rates()
    for (kind, threshold), report in sorted(bundle.range_reports.items()):
        rows_idx = study.indices_at_threshold(threshold, kind)
        subset_daily = study.daily_rates(rows_idx)
        for offset, delay in enumerate(study.delays):
            s = subset_daily[offset]
            b = benchmark_daily[offset]
            daily_rows.append(
                (
                    kind,
                    _f(threshold),
                    delay,
                    _f(None if s != s else float(s)),
                    _f(None if b != b else float(b)),
                )
            )

    best_rows = []
    for (kind, threshold), best in sorted(bundle.best_delays.items()):
        if best is None:
            continue
        delay, diff = best
        rows_idx = study.indices_at_threshold(threshold, kind)
        offset = delay - study.delay_lo
        subset_daily = study.daily_rates(rows_idx)
        n1 = int(study.defined_counts(rows_idx)[offset])
        n2 = int(study.defined_counts()[offset])
        p1 = float(subset_daily[offset]) / 100.0
        p2 = float(benchmark_daily[offset]) / 100.0
        stderr = bt.proportion_stderr(p1, n1, p2, n2)
        best_rows.append(
            (
                kind,
                _f(threshold),
                delay,
                _f(p1 * 100.0),
                _f(p2 * 100.0),
                _f(diff),
                _f(stderr),
                n1,
                n2,
            )
        )

    histogram_rows = [
        (
            _f(row.edge),
            row.n_aggregated,
            _f(row.pct_aggregated),
            row.n_individual,
            _f(row.pct_individual),
        )
        for row in bundle.histogram
    ]

    series_rows = []
    for dp in study.datapoints:
        series = prices.get(dp.canonical_id)
        close = None
        if series is not None and dp.measurement_date is not None:
            found = series.on_or_before(dp.measurement_date)
            if found is not None:
                close = found[1]
        series_rows.append(
            (
                dp.canonical_id,
                dp.quarter.label,
                dp.measurement_date.isoformat() if dp.measurement_date else None,
                _f(close),
                _f(dp.x_own),
                _f(dp.rr_own),
                _f(dp.rr_direct),
                _f(dp.rr_indirect),
                _f(dp.rr_total),
            )
        )

    text_blocks = [
        bt.render_range_report(bundle.range_reports[(bt.AGGREGATED, t)], params)
        for t in sorted(cfg.thresholds)
    ]
    ranges_txt = "\n".join(text_blocks)
    comparison_txt = (
        bt.render_comparison_report(bundle.comparison, params)
        if bundle.comparison
        else ""
    )

    out = cfg.output
    paths = {
        "ranges_csv": out / A_RANGES_CSV,
        "ranges_txt": out / A_RANGES_TXT,
        "comparison_csv": out / A_COMPARISON_CSV,
        "comparison_txt": out / A_COMPARISON_TXT,
        "daily": out / A_DAILY,
        "best": out / A_BEST_DELAY,
        "histogram": out / A_HISTOGRAM,
        "series": out / A_PRICE_SERIES,
    }
    _write_csv(
        paths["ranges_csv"],
        (
            "kind",
            "threshold",
            "days_delay",
            "subset_rate",
            "benchmark_rate",
            "abs_diff",
            "rel_diff",
            "benchmark_daily_std",
            "std_outperformance",
            "n_subset",
            "n_benchmark",
        ),
        range_rows,
    )
    _atomic_write(paths["ranges_txt"], ranges_txt)
    comparison_rows = []
    if bundle.comparison is not None:
        rep = bundle.comparison
        for row in (*rep.rows, *([rep.average] if rep.average else [])):
            comparison_rows.append(
                (
                    _f(rep.threshold),
                    row.label,
                    _f(row.agg_rate),
                    _f(row.agg_outperformance),
                    _f(row.ind_rate),
                    _f(row.ind_outperformance),
                    _f(row.outperformance_gap),
                )
            )
    _write_csv(
        paths["comparison_csv"],
        (
            "threshold",
            "days_delay",
            "agg_rate",
            "agg_outperformance",
            "ind_rate",
            "ind_outperformance",
            "outperformance_gap",
        ),
        comparison_rows,
    )
    _atomic_write(paths["comparison_txt"], comparison_txt)
    _write_csv(
        paths["daily"],
        ("kind", "threshold", "delay", "subset_rate", "benchmark_rate"),
        daily_rows,
    )
    _write_csv(
        paths["best"],
        (
            "kind",
            "threshold",
            "delay",
            "subset_rate",
            "benchmark_rate",
            "diff",
            "stderr",
            "n_subset_defined",
            "n_benchmark_defined",
        ),
        best_rows,
    )
    _write_csv(
        paths["histogram"],
        (
            "risk_at_least",
            "n_aggregated",
            "pct_aggregated",
            "n_individual",
            "pct_individual",
        ),
        histogram_rows,
    )
    _write_csv(
        paths["series"],
        (
            "canonical_id",
            "quarter",
            "measurement_date",
            "close",
            "x_own",
            "rr_own",
            "rr_direct",
            "rr_indirect",
            "rr_total",
        ),
        series_rows,
    )
    manifest = _write_manifest(
        cfg,
        "report",
        inputs=_require(cfg, "report", A_VALID_POINTS, A_EVENTS) + [Path(cfg.prices)],
        outputs=list(paths.values()),
        params=params,
    )
    return list(paths.values()) + [manifest]


STAGES: dict[str, Callable[[RunConfig], list[Path]]] = {
    "parse": stage_parse,
    "networks": stage_networks,
    "rank": stage_rank,
    "risk": stage_risk,
    "backtest": stage_backtest,
    "report": stage_report,
}


def run_all(cfg: RunConfig) -> list[Path]:
    """Every stage in order; returns all artifact paths."""
    written: list[Path] = []
    for name in STAGE_ORDER:
        artifacts = STAGES[name](cfg)
        log.info("stage=%s artifacts=%d", name, len(artifacts))
        written.extend(artifacts)
    return written
