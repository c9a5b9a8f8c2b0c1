"""Loading and validation of articles, the entity universe, market caps, and prices.

File formats:
  articles    JSON lines with fields id, published_at (ISO-8601), author_id,
              polarity ("positive"|"negative"), title, body
  universe    CSV: canonical_id, display_name, primary_ticker, exchange,
              name_variants (pipe-separated), merged_tickers (pipe-separated);
              share classes appear as extra rows with the same canonical_id
  prices      CSV: ticker, date (YYYY-MM-DD), adjusted_close
  marketcaps  CSV: canonical_id, quarter (YYYYQN), market_cap_usd_billions

Everything returned by the loaders is immutable by convention and safe for
unrestricted concurrent reads.
"""

from __future__ import annotations

import csv
import json
import logging
from bisect import bisect_right
from dataclasses import dataclass
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .errors import ValidationError
from .quarters import Quarter, parse_quarter, quarter_of

log = logging.getLogger(__name__)

POLARITIES = ("positive", "negative")

#: Default analysis window. Articles outside it are still loaded but flagged,
#: never silently dropped.
DEFAULT_WINDOW = (date(2011, 1, 1), date(2016, 6, 30))

ARTICLE_FIELDS = ("id", "published_at", "author_id", "polarity", "title", "body")
UNIVERSE_COLUMNS = (
    "canonical_id",
    "display_name",
    "primary_ticker",
    "exchange",
    "name_variants",
    "merged_tickers",
)
PRICE_COLUMNS = ("ticker", "date", "adjusted_close")
MARKETCAP_COLUMNS = ("canonical_id", "quarter", "market_cap_usd_billions")


@dataclass(frozen=True)
class Article:
    id: str
    published_at: datetime
    author_id: str
    polarity: str
    title: str
    body: str
    #: Whether published_at falls inside the configured analysis window.
    in_window: bool = True


@dataclass(frozen=True)
class EntityRecord:
    canonical_id: str
    display_name: str
    primary_ticker: str
    exchange: str
    name_variants: tuple[str, ...]
    #: Every ticker of the company, primary and merged share classes alike.
    merged_tickers: tuple[str, ...]


class EntityUniverse:
    """Canonical companies plus ticker and name-variant lookup maps."""

    def __init__(self, records: Iterable[EntityRecord]):
        self.records: dict[str, EntityRecord] = {}
        self.ticker_to_id: dict[str, str] = {}
        self.variant_to_id: dict[str, str] = {}
        for rec in sorted(records, key=lambda r: r.canonical_id):
            if rec.canonical_id in self.records:
                raise ValidationError(f"duplicate canonical_id {rec.canonical_id!r}")
            if not rec.name_variants:
                raise ValidationError(
                    f"company {rec.canonical_id!r} has no name variants"
                )
            self.records[rec.canonical_id] = rec
            for ticker in rec.merged_tickers:
                owner = self.ticker_to_id.get(ticker)
                if owner is not None and owner != rec.canonical_id:
                    raise ValidationError(
                        f"ticker {ticker!r} claimed by both {owner!r} and {rec.canonical_id!r}"
                    )
                self.ticker_to_id[ticker] = rec.canonical_id
            for variant in rec.name_variants:
                key = " ".join(variant.split()).casefold()
                owner = self.variant_to_id.get(key)
                if owner is not None and owner != rec.canonical_id:
                    raise ValidationError(
                        f"name variant {variant!r} claimed by both {owner!r} and {rec.canonical_id!r}"
                    )
                self.variant_to_id[key] = rec.canonical_id

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[EntityRecord]:
        return iter(self.records.values())

    def __contains__(self, canonical_id: str) -> bool:
        return canonical_id in self.records

    def ids(self) -> tuple[str, ...]:
        return tuple(self.records)

    def get(self, canonical_id: str) -> EntityRecord | None:
        return self.records.get(canonical_id)


@dataclass(frozen=True)
class PriceSeries:
    """Adjusted closes for one company, dates strictly increasing."""

    key: str
    dates: tuple[date, ...]
    closes: tuple[float, ...]

    def on_or_before(self, day: date) -> tuple[date, float] | None:
        """Most recent (date, close) at or before `day`, if any."""
        idx = bisect_right(self.dates, day)
        if idx == 0:
            return None
        return self.dates[idx - 1], self.closes[idx - 1]


class PriceTable:
    """Price series keyed by canonical_id (or raw ticker when unresolved)."""

    def __init__(self, series: Iterable[PriceSeries]):
        self.series: dict[str, PriceSeries] = {
            s.key: s for s in sorted(series, key=lambda s: s.key)
        }

    def __len__(self) -> int:
        return len(self.series)

    def __contains__(self, key: str) -> bool:
        return key in self.series

    def get(self, key: str) -> PriceSeries | None:
        return self.series.get(key)


class MarketCapTable:
    """(canonical_id, quarter) -> market cap in USD billions."""

    def __init__(self, entries: Mapping[tuple[str, Quarter], float]):
        for (cid, quarter), cap in entries.items():
            if cap <= 0:
                raise ValidationError(
                    f"non-positive market cap {cap} for {cid} {quarter}"
                )
        self.entries = dict(entries)

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, canonical_id: str, quarter: Quarter) -> float | None:
        return self.entries.get((canonical_id, quarter))


def _parse_timestamp(raw: str) -> datetime:
    text = raw.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        ts = datetime.fromisoformat(text)
    except ValueError:
        raise ValidationError(f"unparseable timestamp {raw!r}") from None
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def load_articles(
    path: str | Path,
    window: tuple[date, date] = DEFAULT_WINDOW,
) -> list[Article]:
    """Load the article corpus, sorted ascending by publication time.

    Raises ValidationError with the offending line number on malformed
    records and on duplicate article ids.
    """
    path = Path(path)
    articles: list[Article] = []
    seen: set[str] = set()
    win_start, win_end = window
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path.name}:{lineno}: malformed record: {exc}") from None
            missing = [f for f in ARTICLE_FIELDS if f not in raw]
            if missing:
                raise ValidationError(
                    f"{path.name}:{lineno}: missing fields {missing}"
                )
            if raw["polarity"] not in POLARITIES:
                raise ValidationError(
                    f"{path.name}:{lineno}: polarity must be one of {POLARITIES}, "
                    f"got {raw['polarity']!r}"
                )
            article_id = str(raw["id"])
            if article_id in seen:
                raise ValidationError(
                    f"{path.name}:{lineno}: duplicate article id {article_id!r}"
                )
            seen.add(article_id)
            try:
                published = _parse_timestamp(str(raw["published_at"]))
            except ValidationError as exc:
                raise ValidationError(f"{path.name}:{lineno}: {exc}") from None
            in_window = win_start <= published.date() <= win_end
            articles.append(
                Article(
                    id=article_id,
                    published_at=published,
                    author_id=str(raw["author_id"]),
                    polarity=raw["polarity"],
                    title=str(raw["title"]),
                    body=str(raw["body"]),
                    in_window=in_window,
                )
            )
    articles.sort(key=lambda a: (a.published_at, a.id))
    n_excluded = sum(1 for a in articles if not a.in_window)
    log.info(
        "loaded articles file=%s count=%d excluded_from_window=%d",
        path.name,
        len(articles),
        n_excluded,
    )
    return articles


def _split_cell(cell: str) -> list[str]:
    return [part.strip() for part in cell.split("|") if part.strip()]


def load_universe(path: str | Path) -> EntityUniverse:
    """Load the entity universe, collapsing share-class rows into one company."""
    path = Path(path)
    by_id: dict[str, dict] = {}
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        _check_columns(reader.fieldnames, UNIVERSE_COLUMNS, path)
        for lineno, row in enumerate(reader, start=2):
            cid = row["canonical_id"].strip()
            if not cid:
                raise ValidationError(f"{path.name}:{lineno}: empty canonical_id")
            variants = _split_cell(row["name_variants"])
            if not variants:
                raise ValidationError(
                    f"{path.name}:{lineno}: empty name_variants for {cid!r}"
                )
            primary = row["primary_ticker"].strip()
            if not primary:
                raise ValidationError(f"{path.name}:{lineno}: empty primary_ticker")
            tickers = [primary] + _split_cell(row["merged_tickers"])
            entry = by_id.get(cid)
            if entry is None:
                by_id[cid] = {
                    "display_name": row["display_name"].strip(),
                    "primary_ticker": primary,
                    "exchange": row["exchange"].strip(),
                    "variants": list(variants),
                    "tickers": list(tickers),
                }
            else:
                # Additional share-class row for an already-seen company.
                entry["tickers"].extend(tickers)
                entry["variants"].extend(variants)

    records = []
    for cid, entry in by_id.items():
        records.append(
            EntityRecord(
                canonical_id=cid,
                display_name=entry["display_name"],
                primary_ticker=entry["primary_ticker"],
                exchange=entry["exchange"],
                name_variants=tuple(dict.fromkeys(entry["variants"])),
                merged_tickers=tuple(dict.fromkeys(entry["tickers"])),
            )
        )
    universe = EntityUniverse(records)
    log.info("loaded universe file=%s companies=%d", path.name, len(universe))
    return universe


def load_prices(path: str | Path, universe: EntityUniverse | None = None) -> PriceTable:
    """Load daily adjusted closes.

    When a universe is given, series are re-keyed by canonical_id; for a
    company with several share-class series the primary ticker's series wins.
    Missing companies are permitted (the backtest disqualifies them later).
    """
    path = Path(path)
    per_ticker: dict[str, tuple[list[date], list[float]]] = {}
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        _check_columns(reader.fieldnames, PRICE_COLUMNS, path)
        for lineno, row in enumerate(reader, start=2):
            ticker = row["ticker"].strip()
            try:
                day = date.fromisoformat(row["date"].strip())
            except ValueError:
                raise ValidationError(
                    f"{path.name}:{lineno}: bad date {row['date']!r}"
                ) from None
            try:
                close = float(row["adjusted_close"])
            except ValueError:
                raise ValidationError(
                    f"{path.name}:{lineno}: bad price {row['adjusted_close']!r}"
                ) from None
            if close <= 0:
                raise ValidationError(
                    f"{path.name}:{lineno}: non-positive price {close} for {ticker}"
                )
            dates, closes = per_ticker.setdefault(ticker, ([], []))
            if dates and day <= dates[-1]:
                raise ValidationError(
                    f"{path.name}:{lineno}: dates for {ticker} not strictly increasing"
                )
            dates.append(day)
            closes.append(close)

    chosen: dict[str, PriceSeries] = {}
    for ticker in sorted(per_ticker):
        dates, closes = per_ticker[ticker]
        key = ticker
        if universe is not None:
            cid = universe.ticker_to_id.get(ticker)
            if cid is not None:
                key = cid
                primary = universe.records[cid].primary_ticker
                if key in chosen and ticker != primary:
                    continue  # keep the earlier (or primary) series
        chosen[key] = PriceSeries(key=key, dates=tuple(dates), closes=tuple(closes))
    table = PriceTable(chosen.values())
    log.info("loaded prices file=%s series=%d", path.name, len(table))
    return table


def load_marketcaps(path: str | Path) -> MarketCapTable:
    """Load quarter-end market caps in USD billions."""
    path = Path(path)
    entries: dict[tuple[str, Quarter], float] = {}
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        _check_columns(reader.fieldnames, MARKETCAP_COLUMNS, path)
        for lineno, row in enumerate(reader, start=2):
            cid = row["canonical_id"].strip()
            try:
                quarter = parse_quarter(row["quarter"])
            except ValueError as exc:
                raise ValidationError(f"{path.name}:{lineno}: {exc}") from None
            try:
                cap = float(row["market_cap_usd_billions"])
            except ValueError:
                raise ValidationError(
                    f"{path.name}:{lineno}: bad market cap {row['market_cap_usd_billions']!r}"
                ) from None
            if cap <= 0:
                raise ValidationError(
                    f"{path.name}:{lineno}: non-positive market cap {cap} for {cid}"
                )
            entries[(cid, quarter)] = cap
    table = MarketCapTable(entries)
    log.info("loaded marketcaps file=%s entries=%d", path.name, len(table))
    return table


def _check_columns(found, expected, path: Path) -> None:
    if found is None or list(found) != list(expected):
        raise ValidationError(
            f"{path.name}: expected columns {list(expected)}, found {found}"
        )


# ---------------------------------------------------------------------------
# Writers. write(load(x)) reproduces the normalized form of x, which makes
# the loaders round-trippable and gives the fixture generator one code path.
# ---------------------------------------------------------------------------


def write_articles(path: str | Path, articles: Iterable[Article]) -> int:
    path = Path(path)
    n = 0
    with path.open("w", encoding="utf-8") as fh:
        for article in articles:
            record = {
                "id": article.id,
                "published_at": article.published_at.astimezone(timezone.utc)
                .isoformat()
                .replace("+00:00", "Z"),
                "author_id": article.author_id,
                "polarity": article.polarity,
                "title": article.title,
                "body": article.body,
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
            n += 1
    return n


def write_universe(path: str | Path, universe: EntityUniverse) -> int:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(UNIVERSE_COLUMNS)
        for rec in universe:
            merged = [t for t in rec.merged_tickers if t != rec.primary_ticker]
            writer.writerow(
                [
                    rec.canonical_id,
                    rec.display_name,
                    rec.primary_ticker,
                    rec.exchange,
                    "|".join(rec.name_variants),
                    "|".join(merged),
                ]
            )
    return len(universe)


def write_prices(path: str | Path, table: PriceTable) -> int:
    path = Path(path)
    n = 0
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PRICE_COLUMNS)
        for key in sorted(table.series):
            series = table.series[key]
            for day, close in zip(series.dates, series.closes):
                writer.writerow([key, day.isoformat(), repr(close)])
                n += 1
    return n


def write_marketcaps(path: str | Path, table: MarketCapTable) -> int:
    path = Path(path)
    rows = sorted(table.entries.items(), key=lambda kv: (kv[0][0], kv[0][1]))
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MARKETCAP_COLUMNS)
        for (cid, quarter), cap in rows:
            writer.writerow([cid, quarter.label, repr(cap)])
    return len(rows)


def analysis_articles(articles: Iterable[Article]) -> list[Article]:
    """The articles inside the configured window, i.e. those analysed."""
    return [a for a in articles if a.in_window]


def articles_by_quarter(articles: Iterable[Article]) -> dict[Quarter, list[Article]]:
    grouped: dict[Quarter, list[Article]] = {}
    for article in articles:
        grouped.setdefault(quarter_of(article.published_at), []).append(article)
    return {q: grouped[q] for q in sorted(grouped)}
