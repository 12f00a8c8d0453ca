"""Loading, validation and synthetic generation of input series.

File formats (UTF-8, ISO-8601 dates, header row required):

* SVI:      ``week_start,value``  with Sunday week starts and integer values in [0, 100]
* prices:   ``date,close``        with strictly ascending dates and positive closes
* keywords: ``keyword,category,source_url,availability_date``
"""

from __future__ import annotations

import csv
import enum
import io
import math
from collections import Counter
from dataclasses import dataclass
from datetime import date, timedelta
from importlib import resources
from pathlib import Path

import numpy as np

from trendlab.errors import (
    CalendarViolation,
    DuplicateLabel,
    EmptySeries,
    FormatError,
    InvalidPrice,
    OrderViolation,
    RangeViolation,
)
from trendlab.series import (
    GT_TO_TRADE,
    MONDAY,
    SUNDAY,
    WEEK,
    DailyPriceSeries,
    Unit,
    WeeklySeries,
)

SVI_HEADER = ["week_start", "value"]
PRICE_HEADER = ["date", "close"]
KEYWORD_HEADER = ["keyword", "category", "source_url", "availability_date"]

DEFAULT_GT_START = date(2004, 1, 4)  # first Sunday of 2004


def _data_path(name: str) -> Path:
    return Path(str(resources.files("trendlab") / "data" / name))


def _rows(path, header: list[str]):
    """Yield ``(row_number, fields)`` after checking the header; row numbers are 1-based file lines."""
    text = Path(path).read_text(encoding="utf-8-sig")
    reader = csv.reader(io.StringIO(text))
    try:
        for lineno, row in enumerate(reader, start=1):
            if lineno == 1:
                if [c.strip() for c in row] != header:
                    raise FormatError(f"expected header {','.join(header)!r}, got {','.join(row)!r}", 1)
                continue
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise FormatError(f"expected {len(header)} fields, got {len(row)}", lineno)
            yield lineno, [c.strip() for c in row]
    except csv.Error as exc:
        raise FormatError(str(exc), reader.line_num) from None


def _parse_date(text: str, lineno: int) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise FormatError(f"unparsable date {text!r}", lineno) from None


def load_svi_csv(path, series_id: str | None = None) -> WeeklySeries:
    """Load a GT-format weekly SVI export.

    Raises:
        FormatError: unparsable row or header (carries the row number).
        CalendarViolation: a week start that is not a Sunday, unsorted or missing weeks.
        DuplicateLabel: the same week twice.
        RangeViolation: a value outside [0, 100].
        EmptySeries: no data rows.
    """
    starts: list[date] = []
    values: list[int] = []
    seen: set[date] = set()
    for lineno, (d_text, v_text) in _rows(path, SVI_HEADER):
        d = _parse_date(d_text, lineno)
        try:
            v = int(v_text)
        except ValueError:
            raise FormatError(f"SVI value {v_text!r} is not an integer", lineno) from None
        if d.weekday() != SUNDAY:
            raise CalendarViolation(f"row {lineno}: week start {d} is a {d.strftime('%A')}, not a Sunday")
        if d in seen:
            raise DuplicateLabel(f"row {lineno}: week {d} appears twice")
        if not 0 <= v <= 100:
            raise RangeViolation(f"row {lineno}: value {v} outside [0, 100]")
        if starts and d < starts[-1]:
            raise CalendarViolation(f"row {lineno}: week {d} is out of order")
        if starts and d - starts[-1] != WEEK:
            raise CalendarViolation(f"row {lineno}: missing week(s) between {starts[-1]} and {d}")
        seen.add(d)
        starts.append(d)
        values.append(v)
    if not starts:
        raise EmptySeries(f"{path}: no SVI rows")
    return WeeklySeries(tuple(starts), values, Unit.SVI_POINTS, series_id=series_id or Path(path).stem)


def write_svi_csv(series: WeeklySeries, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SVI_HEADER)
        for d, v in zip(series.starts, series.values):
            if v != int(v):
                raise RangeViolation(f"SVI value {v} on {d} is not an integer; GT exports are integral")
            writer.writerow([d.isoformat(), int(v)])


def load_price_csv(path, series_id: str | None = None) -> DailyPriceSeries:
    dates: list[date] = []
    closes: list[float] = []
    for lineno, (d_text, c_text) in _rows(path, PRICE_HEADER):
        d = _parse_date(d_text, lineno)
        try:
            c = float(c_text)
        except ValueError:
            raise FormatError(f"close {c_text!r} is not a number", lineno) from None
        if not math.isfinite(c) or c <= 0:
            raise InvalidPrice(f"row {lineno}: close {c_text} must be positive")
        if dates and d <= dates[-1]:
            raise OrderViolation(f"row {lineno}: date {d} does not follow {dates[-1]}")
        dates.append(d)
        closes.append(c)
    if not dates:
        raise EmptySeries(f"{path}: no price rows")
    return DailyPriceSeries(tuple(dates), closes, series_id=series_id or Path(path).stem)


def write_price_csv(prices: DailyPriceSeries, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PRICE_HEADER)
        for d, c in zip(prices.dates, prices.closes):
            writer.writerow([d.isoformat(), repr(float(c))])


class KeywordCategory(str, enum.Enum):
    ILLNESS = "illness"
    CLASSIC_CAR = "classic_car"
    ARCADE_GAME = "arcade_game"
    FINANCE = "finance"


@dataclass(frozen=True)
class KeywordFixture:
    keyword: str
    category: KeywordCategory
    source_url: str
    availability_date: date

    def __post_init__(self):
        if not self.keyword:
            raise FormatError("empty keyword")
        object.__setattr__(self, "category", KeywordCategory(self.category))


BUNDLED_KEYWORDS = "keywords.csv"


def load_keyword_fixtures(path=None) -> list[KeywordFixture]:
    """Load keyword fixtures; with no path, the bundled illness, classic-car and arcade-game lists plus the named FT words.

    Keywords are kept verbatim, duplicates included.
    """
    path = _data_path(BUNDLED_KEYWORDS) if path is None else path
    if Path(path).stat().st_size == 0:
        return []
    out = []
    for lineno, (kw, cat, url, avail) in _rows(path, KEYWORD_HEADER):
        try:
            category = KeywordCategory(cat)
        except ValueError:
            raise FormatError(f"unknown category {cat!r}", lineno) from None
        if not kw:
            raise FormatError("empty keyword", lineno)
        out.append(KeywordFixture(kw, category, url, _parse_date(avail, lineno)))
    return out


def category_counts(fixtures) -> dict[str, int]:
    counts = Counter(f.category.value for f in fixtures)
    return {c.value: counts.get(c.value, 0) for c in KeywordCategory}


def duplicate_keywords(fixtures) -> dict[str, int]:
    """Keywords listed more than once within the same category."""
    counts = Counter((f.category.value, f.keyword) for f in fixtures)
    return {f"{cat}:{kw}": n for (cat, kw), n in counts.items() if n > 1}


class GeneratorKind(str, enum.Enum):
    IID_GAUSSIAN = "iid_gaussian"
    RANDOM_WALK = "random_walk"
    CONSTANT = "constant"


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a deterministic synthetic weekly series.

    ``start`` defaults to the first Sunday of 2004 for SVI series and to the
    matching trade Monday (eight days later) for return series. SVI output is
    clipped into [0, 100].
    """

    length_weeks: int
    generator: GeneratorKind = GeneratorKind.IID_GAUSSIAN
    seed: int = 0
    mean: float = 0.0
    stdev: float = 1.0
    unit: Unit = Unit.SIMPLE_RETURN
    start: date | None = None

    def __post_init__(self):
        object.__setattr__(self, "generator", GeneratorKind(self.generator))
        object.__setattr__(self, "unit", Unit(self.unit))
        if self.stdev < 0:
            raise ValueError("stdev must be non-negative")


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(int(seed) % 2**64)


def _synthetic_values(spec: SyntheticSpec, n: int) -> np.ndarray:
    if spec.generator is GeneratorKind.CONSTANT:
        return np.full(n, float(spec.mean))
    z = _rng(spec.seed).standard_normal(n)
    if spec.generator is GeneratorKind.IID_GAUSSIAN:
        return spec.mean + spec.stdev * z
    return spec.mean + np.cumsum(spec.stdev * z)


def generate(spec: SyntheticSpec) -> WeeklySeries:
    if spec.length_weeks <= 0:
        raise EmptySeries("synthetic series needs at least one week")
    if spec.start is None:
        start = DEFAULT_GT_START if spec.unit is Unit.SVI_POINTS else DEFAULT_GT_START + GT_TO_TRADE
    else:
        start = spec.start
    want = SUNDAY if spec.unit is Unit.SVI_POINTS else MONDAY
    if start.weekday() != want:
        raise CalendarViolation(f"synthetic start {start} is a {start.strftime('%A')}")
    values = _synthetic_values(spec, spec.length_weeks)
    if spec.unit is Unit.SVI_POINTS:
        values = np.clip(values, 0.0, 100.0)
    starts = tuple(start + i * WEEK for i in range(spec.length_weeks))
    return WeeklySeries(starts, values, spec.unit, series_id=f"synthetic:{spec.generator.value}:{spec.seed}")


def gt_normalize(raw) -> np.ndarray:
    """Rescale to GT's integer format: the maximum maps to 100 and the minimum to 0."""
    raw = np.asarray(raw, dtype=float)
    lo, hi = raw.min(), raw.max()
    if hi == lo:
        return np.zeros_like(raw)
    return np.round(100.0 * (raw - lo) / (hi - lo))


def trading_days(first: date, last: date, holidays=()) -> list[date]:
    """Weekdays in ``[first, last]`` minus ``holidays``."""
    skip = set(holidays)
    out, d = [], first
    while d <= last:
        if d.weekday() < 5 and d not in skip:
            out.append(d)
        d += timedelta(days=1)
    return out


def random_walk_prices(days, seed: int, drift: float = 0.0, vol: float = 0.01, start: float = 100.0) -> DailyPriceSeries:
    """Geometric random walk closes on the given trading days."""
    steps = _rng(seed).normal(drift, vol, len(days))
    closes = start * np.exp(np.cumsum(steps))
    return DailyPriceSeries(tuple(days), closes, series_id=f"rw:{seed}")


# The trending fixture: an integer SVI staircase rising from 0 to 100, each
# level held for PLATEAU weeks, traded against an upward-drifting market. With
# k = PLATEAU // 2 the correctly lagged contrarian rule is exactly balanced
# long/short on every plateau, while an un-lagged baseline is net long.
TRENDING_K = 2
TRENDING_PLATEAU = 2 * TRENDING_K
TRENDING_SEED = 20131017


def trending_fixture() -> tuple[WeeklySeries, DailyPriceSeries]:
    levels = np.repeat(np.arange(101.0), TRENDING_PLATEAU)
    starts = tuple(DEFAULT_GT_START + i * WEEK for i in range(len(levels)))
    svi = WeeklySeries(starts, levels, Unit.SVI_POINTS, series_id="trending_svi")
    first = starts[0] + GT_TO_TRADE
    last = starts[-1] + GT_TO_TRADE + timedelta(days=4)
    # ~+0.24%/week drift, ~1.8% weekly vol
    prices = random_walk_prices(trading_days(first - timedelta(days=3), last), TRENDING_SEED, drift=6e-4, vol=9e-3)
    return svi, DailyPriceSeries(prices.dates, prices.closes, series_id="trending_prices")


def load_trending_fixture() -> tuple[WeeklySeries, DailyPriceSeries]:
    """The bundled CSV copy of :func:`trending_fixture`."""
    return (
        load_svi_csv(_data_path("trending_svi.csv"), series_id="trending_svi"),
        load_price_csv(_data_path("trending_prices.csv"), series_id="trending_prices"),
    )


def fixture_path(name: str) -> Path:
    return _data_path(name)


__all__ = [
    "KeywordCategory",
    "KeywordFixture",
    "GeneratorKind",
    "SyntheticSpec",
    "category_counts",
    "duplicate_keywords",
    "fixture_path",
    "generate",
    "gt_normalize",
    "load_keyword_fixtures",
    "load_price_csv",
    "load_svi_csv",
    "load_trending_fixture",
    "random_walk_prices",
    "trading_days",
    "trending_fixture",
    "write_price_csv",
    "write_svi_csv",
]
