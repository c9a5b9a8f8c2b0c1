"""Loaders, writers, and calendar-quarter bucketing."""

import json
from datetime import date, datetime, timezone

import pytest

from newsrisk.corpus import (
    Article,
    EntityRecord,
    EntityUniverse,
    MarketCapTable,
    PriceSeries,
    PriceTable,
    analysis_articles,
    articles_by_quarter,
    load_articles,
    load_marketcaps,
    load_prices,
    load_universe,
    write_articles,
    write_marketcaps,
    write_prices,
    write_universe,
)
from newsrisk.errors import ValidationError
from newsrisk.quarters import Quarter, parse_quarter, quarter_of, quarter_range


def art(i, ts, polarity="positive", body="nothing to see"):
    return Article(
        id=f"A{i}",
        published_at=datetime.fromisoformat(ts),
        author_id="AUTH01",
        polarity=polarity,
        title=f"note {i}",
        body=body,
    )


# -- quarters ---------------------------------------------------------------


def test_quarter_labels_and_dates():
    q = Quarter(2013, 4)
    assert q.label == "2013Q4"
    assert q.start_date == date(2013, 10, 1)
    assert q.end_date == date(2013, 12, 31)
    assert q.next() == Quarter(2014, 1)
    assert parse_quarter(" 2013Q4 ") == q
    assert str(q) == "2013Q4"


def test_quarter_ordering_and_range():
    assert Quarter(2011, 4) < Quarter(2012, 1)
    span = quarter_range(Quarter(2011, 3), Quarter(2012, 2))
    assert [q.label for q in span] == ["2011Q3", "2011Q4", "2012Q1", "2012Q2"]
    with pytest.raises(ValueError):
        quarter_range(Quarter(2012, 1), Quarter(2011, 4))
    with pytest.raises(ValueError):
        Quarter(2011, 5)
    with pytest.raises(ValueError):
        parse_quarter("2011-Q1")


def test_quarter_of_boundaries():
    assert quarter_of(datetime(2011, 3, 31, 23, 59, 59)) == Quarter(2011, 1)
    assert quarter_of(datetime(2011, 4, 1, 0, 0, 0)) == Quarter(2011, 2)
    # timezone conversion happens before bucketing
    eastern = datetime.fromisoformat("2011-04-01T01:30:00+03:00")
    assert quarter_of(eastern) == Quarter(2011, 1)
    utc = datetime(2011, 4, 1, tzinfo=timezone.utc)
    assert quarter_of(utc) == Quarter(2011, 2)


# -- articles ---------------------------------------------------------------


def test_articles_round_trip(tmp_path):
    originals = [
        art(1, "2011-02-01T09:30:00+00:00"),
        art(2, "2012-07-15T16:00:00+02:00", polarity="negative"),
        art(3, "2016-06-30T23:59:00+00:00"),
    ]
    path = tmp_path / "articles.jsonl"
    assert write_articles(path, originals) == 3
    loaded = load_articles(path)
    assert [a.id for a in loaded] == ["A1", "A2", "A3"]
    for a, b in zip(loaded, originals):
        assert a.published_at == b.published_at
        assert a.published_at.tzinfo is not None
        assert a.polarity == b.polarity
        assert a.body == b.body
        assert a.in_window


def test_articles_sorted_by_time_then_id(tmp_path):
    path = tmp_path / "articles.jsonl"
    write_articles(
        path,
        [
            art(2, "2011-02-01T10:00:00+00:00"),
            art(1, "2011-02-01T10:00:00+00:00"),
            art(3, "2011-01-15T10:00:00+00:00"),
        ],
    )
    loaded = load_articles(path)
    assert [a.id for a in loaded] == ["A3", "A1", "A2"]


def test_articles_window_flagging(tmp_path):
    path = tmp_path / "articles.jsonl"
    write_articles(
        path,
        [
            art(1, "2010-12-31T12:00:00+00:00"),
            art(2, "2011-01-01T00:00:00+00:00"),
            art(3, "2016-07-01T12:00:00+00:00"),
        ],
    )
    loaded = load_articles(path)
    assert [a.in_window for a in loaded] == [False, True, False]
    assert [a.id for a in analysis_articles(loaded)] == ["A2"]


def test_articles_malformed_line_number(tmp_path):
    path = tmp_path / "articles.jsonl"
    good = {
        "id": "A1",
        "published_at": "2011-02-01T09:30:00Z",
        "author_id": "x",
        "polarity": "positive",
        "title": "t",
        "body": "b",
    }
    path.write_text(json.dumps(good) + "\n" + "{broken\n", encoding="utf-8")
    with pytest.raises(ValidationError, match=r"articles\.jsonl:2"):
        load_articles(path)


def test_articles_field_and_polarity_errors(tmp_path):
    path = tmp_path / "articles.jsonl"
    record = {
        "id": "A1",
        "published_at": "2011-02-01T09:30:00Z",
        "author_id": "x",
        "polarity": "positive",
        "title": "t",
        "body": "b",
    }
    missing = {k: v for k, v in record.items() if k != "title"}
    path.write_text(json.dumps(missing) + "\n", encoding="utf-8")
    with pytest.raises(ValidationError, match=r":1: missing fields \['title'\]"):
        load_articles(path)

    bad_pol = dict(record, polarity="neutral")
    path.write_text(json.dumps(bad_pol) + "\n", encoding="utf-8")
    with pytest.raises(ValidationError, match="polarity"):
        load_articles(path)

    bad_ts = dict(record, published_at="yesterday")
    path.write_text(json.dumps(bad_ts) + "\n", encoding="utf-8")
    with pytest.raises(ValidationError, match="unparseable timestamp"):
        load_articles(path)


def test_articles_duplicate_id(tmp_path):
    path = tmp_path / "articles.jsonl"
    write_articles(
        path, [art(1, "2011-02-01T09:30:00+00:00"), art(2, "2011-02-02T09:30:00+00:00")]
    )
    lines = path.read_text().splitlines()
    lines.append(lines[0])
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    with pytest.raises(ValidationError, match=r":3: duplicate article id 'A1'"):
        load_articles(path)


def test_articles_by_quarter_groups_sorted():
    arts = [
        art(1, "2011-05-01T09:00:00+00:00"),
        art(2, "2011-02-01T09:00:00+00:00"),
        art(3, "2011-04-02T09:00:00+00:00"),
    ]
    grouped = articles_by_quarter(arts)
    assert [q.label for q in grouped] == ["2011Q1", "2011Q2"]
    assert [a.id for a in grouped[Quarter(2011, 2)]] == ["A1", "A3"]


# -- universe ---------------------------------------------------------------


UNIVERSE_CSV = """\
canonical_id,display_name,primary_ticker,exchange,name_variants,merged_tickers
ACME,Acme Industrial Corp,ACME,NYSE,Acme Industrial Corp|Acme Industrial,
BOLT,Bolt Works Inc,BOLT,NASDAQ,Bolt Works Inc,BLTW
"""


def test_universe_loading_and_lookup(tmp_path):
    path = tmp_path / "universe.csv"
    path.write_text(UNIVERSE_CSV, encoding="utf-8")
    uni = load_universe(path)
    assert len(uni) == 2
    assert uni.ids() == ("ACME", "BOLT")
    rec = uni.get("BOLT")
    assert rec.merged_tickers == ("BOLT", "BLTW")
    assert uni.ticker_to_id["BLTW"] == "BOLT"
    assert uni.variant_to_id["acme industrial"] == "ACME"
    assert "ACME" in uni and "NOPE" not in uni


def test_universe_share_class_rows_merge(tmp_path):
    csv_text = UNIVERSE_CSV + "ACME,Acme Industrial Corp Class B,ACME.B,NYSE,Acme Class B,\n"
    path = tmp_path / "universe.csv"
    path.write_text(csv_text, encoding="utf-8")
    uni = load_universe(path)
    assert len(uni) == 2
    rec = uni.get("ACME")
    assert rec.primary_ticker == "ACME"
    assert set(rec.merged_tickers) == {"ACME", "ACME.B"}
    assert "Acme Class B" in rec.name_variants
    # round trip through the writer keeps one row per share class ticker
    out = tmp_path / "roundtrip.csv"
    write_universe(out, uni)
    again = load_universe(out)
    assert again.get("ACME").merged_tickers == rec.merged_tickers


def test_universe_validation_errors(tmp_path):
    path = tmp_path / "universe.csv"
    path.write_text(
        UNIVERSE_CSV.replace("ACME,Acme Industrial Corp,ACME", ",Acme Industrial Corp,ACME"),
        encoding="utf-8",
    )
    with pytest.raises(ValidationError, match=":2: empty canonical_id"):
        load_universe(path)

    path.write_text("a,b\n1,2\n", encoding="utf-8")
    with pytest.raises(ValidationError, match="expected columns"):
        load_universe(path)


def test_universe_ticker_claimed_twice():
    records = [
        EntityRecord("A", "Aco", "TICK", "NYSE", ("Aco",), ("TICK",)),
        EntityRecord("B", "Bco", "TICK", "NYSE", ("Bco",), ("TICK",)),
    ]
    with pytest.raises(ValidationError, match="claimed by both"):
        EntityUniverse(records)


def test_universe_duplicate_variant_and_id():
    with pytest.raises(ValidationError, match="name variant"):
        EntityUniverse(
            [
                EntityRecord("A", "Same Name", "AAA", "NYSE", ("Same Name",), ("AAA",)),
                EntityRecord("B", "Same  name", "BBB", "NYSE", ("Same  name",), ("BBB",)),
            ]
        )
    with pytest.raises(ValidationError, match="duplicate canonical_id"):
        EntityUniverse(
            [
                EntityRecord("A", "One", "AAA", "NYSE", ("One",), ("AAA",)),
                EntityRecord("A", "Two", "BBB", "NYSE", ("Two",), ("BBB",)),
            ]
        )


# -- prices -----------------------------------------------------------------


def series(key, start, closes):
    days = []
    d = start
    while len(days) < len(closes):
        if d.weekday() < 5:
            days.append(d)
        d += date.resolution
    return PriceSeries(key=key, dates=tuple(days), closes=tuple(closes))


def test_price_series_on_or_before():
    s = series("X", date(2011, 3, 28), [10.0, 11.0, 12.0, 13.0, 14.0])
    assert s.on_or_before(date(2011, 3, 30)) == (date(2011, 3, 30), 12.0)
    # april 2nd 2011 is a saturday: falls back to friday's close
    assert s.on_or_before(date(2011, 4, 2)) == (date(2011, 4, 1), 14.0)
    assert s.on_or_before(date(2011, 3, 27)) is None


def test_prices_round_trip_and_rekeying(tmp_path):
    table = PriceTable(
        [
            series("ACME", date(2011, 1, 3), [50.0, 50.5]),
            series("BLTW", date(2011, 1, 3), [8.0, 8.1]),
            series("UNKNOWN", date(2011, 1, 3), [1.0, 2.0]),
        ]
    )
    path = tmp_path / "prices.csv"
    assert write_prices(path, table) == 6

    plain = load_prices(path)
    assert set(plain.series) == {"ACME", "BLTW", "UNKNOWN"}
    assert plain.get("ACME").closes == (50.0, 50.5)

    uni = EntityUniverse(
        [
            EntityRecord("ACME", "Acme Corp", "ACME", "NYSE", ("Acme Corp",), ("ACME",)),
            EntityRecord("BOLT", "Bolt Inc", "BOLT", "NYSE", ("Bolt Inc",), ("BOLT", "BLTW")),
        ]
    )
    rekeyed = load_prices(path, uni)
    # BLTW resolves to its canonical id, the unknown ticker stays raw
    assert set(rekeyed.series) == {"ACME", "BOLT", "UNKNOWN"}
    assert rekeyed.get("BOLT").closes == (8.0, 8.1)


def test_prices_primary_series_wins(tmp_path):
    path = tmp_path / "prices.csv"
    table = PriceTable(
        [
            series("AAA", date(2011, 1, 3), [10.0]),
            series("AAB", date(2011, 1, 3), [99.0]),
        ]
    )
    write_prices(path, table)
    uni = EntityUniverse(
        [EntityRecord("CO", "Co Inc", "AAB", "NYSE", ("Co Inc",), ("AAB", "AAA"))]
    )
    loaded = load_prices(path, uni)
    # AAA sorts first but AAB is the primary ticker, so AAB's series is kept
    assert loaded.get("CO").closes == (99.0,)


def test_prices_validation(tmp_path):
    path = tmp_path / "prices.csv"
    path.write_text(
        "ticker,date,adjusted_close\nX,2011-01-04,10.0\nX,2011-01-03,11.0\n",
        encoding="utf-8",
    )
    with pytest.raises(ValidationError, match="not strictly increasing"):
        load_prices(path)

    path.write_text("ticker,date,adjusted_close\nX,2011-13-01,10.0\n", encoding="utf-8")
    with pytest.raises(ValidationError, match=":2: bad date"):
        load_prices(path)

    path.write_text("ticker,date,adjusted_close\nX,2011-01-03,zero\n", encoding="utf-8")
    with pytest.raises(ValidationError, match=":2: bad price"):
        load_prices(path)

    path.write_text("ticker,date,adjusted_close\nX,2011-01-03,-4\n", encoding="utf-8")
    with pytest.raises(ValidationError, match="non-positive price"):
        load_prices(path)


# -- market caps ------------------------------------------------------------


def test_marketcaps_round_trip(tmp_path):
    table = MarketCapTable(
        {
            ("ACME", Quarter(2011, 1)): 12.5,
            ("ACME", Quarter(2011, 2)): 13.25,
            ("BOLT", Quarter(2011, 1)): 0.75,
        }
    )
    path = tmp_path / "caps.csv"
    assert write_marketcaps(path, table) == 3
    loaded = load_marketcaps(path)
    assert loaded.get("ACME", Quarter(2011, 2)) == 13.25
    assert loaded.get("BOLT", Quarter(2011, 2)) is None


def test_marketcaps_validation(tmp_path):
    with pytest.raises(ValidationError, match="non-positive market cap"):
        MarketCapTable({("A", Quarter(2011, 1)): 0.0})

    path = tmp_path / "caps.csv"
    path.write_text(
        "canonical_id,quarter,market_cap_usd_billions\nA,2011T1,5\n", encoding="utf-8"
    )
    with pytest.raises(ValidationError, match=":2: bad quarter label"):
        load_marketcaps(path)

    path.write_text(
        "canonical_id,quarter,market_cap_usd_billions\nA,2011Q1,-5\n", encoding="utf-8"
    )
    with pytest.raises(ValidationError, match="non-positive market cap"):
        load_marketcaps(path)
