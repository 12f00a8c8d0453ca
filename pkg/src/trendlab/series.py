"""Calendar-aware weekly and daily series.

Google Trends weeks run Sunday to Saturday; trade weeks run Monday close to
Friday close. A GT week starting on Sunday ``d`` is paired with the trade week
starting on Monday ``d + 8``, the first full trading week after the GT week
has closed. Everything downstream relies on that pairing being the only place
where the two calendars meet.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import NamedTuple, Sequence

import numpy as np

from trendlab.errors import (
    CalendarViolation,
    DuplicateLabel,
    EmptySeries,
    FutureAccess,
    InvalidPrice,
    NoOverlap,
    OrderViolation,
    RangeViolation,
)

WEEK = timedelta(days=7)
# Sunday GT label -> Monday trade label.
GT_TO_TRADE = timedelta(days=8)

SUNDAY = 6
MONDAY = 0


class WeekKind(str, enum.Enum):
    GT_WEEK = "gt_week"
    TRADE_WEEK = "trade_week"


class Unit(str, enum.Enum):
    SVI_POINTS = "svi_points"
    SIMPLE_RETURN = "simple_return"


_START_WEEKDAY = {WeekKind.GT_WEEK: SUNDAY, WeekKind.TRADE_WEEK: MONDAY}
_DEFAULT_KIND = {Unit.SVI_POINTS: WeekKind.GT_WEEK, Unit.SIMPLE_RETURN: WeekKind.TRADE_WEEK}


@dataclass(frozen=True, order=True)
class WeekLabel:
    start_date: date
    kind: WeekKind = field(compare=False)

    def __post_init__(self):
        want = _START_WEEKDAY[WeekKind(self.kind)]
        if self.start_date.weekday() != want:
            raise CalendarViolation(
                f"{self.kind.value} label {self.start_date} falls on "
                f"{self.start_date.strftime('%A')}"
            )

    @property
    def end_date(self) -> date:
        """Last calendar day covered: Saturday for GT weeks, Friday for trade weeks."""
        span = 6 if self.kind is WeekKind.GT_WEEK else 4
        return self.start_date + timedelta(days=span)

    @property
    def days(self) -> list[date]:
        return [self.start_date + timedelta(days=i) for i in range((self.end_date - self.start_date).days + 1)]


def _readonly(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class WeeklySeries:
    """Immutable date-labelled weekly series.

    ``starts`` holds the label start dates (Sundays for GT weeks, Mondays for
    trade weeks). SVI series must be contiguous; return series may skip weeks
    that had fewer than two trading days.
    """

    starts: tuple[date, ...]
    values: np.ndarray
    unit: Unit = Unit.SVI_POINTS
    kind: WeekKind | None = None
    series_id: str = "series"

    def __post_init__(self):
        unit = Unit(self.unit)
        kind = WeekKind(self.kind) if self.kind is not None else _DEFAULT_KIND[unit]
        starts = tuple(self.starts)
        values = _readonly(self.values)
        object.__setattr__(self, "unit", unit)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "starts", starts)
        object.__setattr__(self, "values", values)

        if values.ndim != 1 or len(values) != len(starts):
            raise ValueError("starts and values must be 1-d and of equal length")
        want = _START_WEEKDAY[kind]
        for d in starts:
            if d.weekday() != want:
                raise CalendarViolation(f"{kind.value} label {d} falls on {d.strftime('%A')}")
        for prev, cur in zip(starts, starts[1:]):
            if cur == prev:
                raise DuplicateLabel(f"duplicate week {cur}")
            if cur < prev:
                raise CalendarViolation(f"labels not ascending at {cur}")
            if unit is Unit.SVI_POINTS and cur - prev != WEEK:
                raise CalendarViolation(f"missing GT week(s) between {prev} and {cur}")
        if not np.all(np.isfinite(values)):
            raise RangeViolation("non-finite value in series")
        if unit is Unit.SVI_POINTS and len(values) and (values.min() < 0 or values.max() > 100):
            raise RangeViolation("SVI values must lie in [0, 100]")

    def __len__(self) -> int:
        return len(self.starts)

    @property
    def labels(self) -> list[WeekLabel]:
        return [WeekLabel(d, self.kind) for d in self.starts]

    def index_of(self, start: date) -> int:
        lookup = self.__dict__.get("_index")
        if lookup is None:
            lookup = {d: i for i, d in enumerate(self.starts)}
            object.__setattr__(self, "_index", lookup)
        try:
            return lookup[start]
        except KeyError:
            raise KeyError(f"{self.series_id}: no week starting {start}") from None

    def read(self, start: date) -> float:
        return float(self.values[self.index_of(start)])

    def restrict(self, first: date | None = None, last: date | None = None) -> "WeeklySeries":
        """Sub-series of weeks whose label date lies in ``[first, last]``."""
        keep = [
            i
            for i, d in enumerate(self.starts)
            if (first is None or d >= first) and (last is None or d <= last)
        ]
        return self._take(keep)

    def with_values(self, values) -> "WeeklySeries":
        return WeeklySeries(self.starts, values, self.unit, self.kind, self.series_id)

    def _take(self, idx: Sequence[int]) -> "WeeklySeries":
        return WeeklySeries(
            tuple(self.starts[i] for i in idx),
            self.values[list(idx)],
            self.unit,
            self.kind,
            self.series_id,
        )

    def __eq__(self, other):
        if not isinstance(other, WeeklySeries):
            return NotImplemented
        return (
            self.starts == other.starts
            and self.unit == other.unit
            and self.kind == other.kind
            and np.array_equal(self.values, other.values)
        )

    def __repr__(self):
        span = f"{self.starts[0]}..{self.starts[-1]}" if self.starts else "empty"
        return f"WeeklySeries({self.series_id!r}, {self.unit.value}, n={len(self)}, {span})"


@dataclass(frozen=True, eq=False)
class DailyPriceSeries:
    dates: tuple[date, ...]
    closes: np.ndarray
    series_id: str = "prices"

    def __post_init__(self):
        dates = tuple(self.dates)
        closes = _readonly(self.closes)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "closes", closes)
        if closes.ndim != 1 or len(closes) != len(dates):
            raise ValueError("dates and closes must be 1-d and of equal length")
        for prev, cur in zip(dates, dates[1:]):
            if cur <= prev:
                raise OrderViolation(f"dates not strictly increasing at {cur}")
        bad = ~np.isfinite(closes) | (closes <= 0)
        if bad.any():
            i = int(np.argmax(bad))
            raise InvalidPrice(f"non-positive or non-finite close {closes[i]} on {dates[i]}")

    def __len__(self) -> int:
        return len(self.dates)

    def restrict(self, first: date | None = None, last: date | None = None) -> "DailyPriceSeries":
        keep = [
            i
            for i, d in enumerate(self.dates)
            if (first is None or d >= first) and (last is None or d <= last)
        ]
        return DailyPriceSeries(tuple(self.dates[i] for i in keep), self.closes[keep], self.series_id)

    def __eq__(self, other):
        if not isinstance(other, DailyPriceSeries):
            return NotImplemented
        return self.dates == other.dates and np.array_equal(self.closes, other.closes)


def week_monday(d: date) -> date:
    return d - timedelta(days=d.weekday())


def week_sunday(d: date) -> date:
    """Sunday starting the GT week that contains ``d``."""
    return d - timedelta(days=(d.weekday() + 1) % 7)


def weekly_returns(prices: DailyPriceSeries) -> WeeklySeries:
    """Monday-to-Friday simple returns, one per trade week.

    Each week's return runs from the first trading day on or after Monday to
    the last trading day on or before Friday, so a Monday or Friday holiday
    shortens the week instead of dropping it. Weekend rows are ignored and
    weeks with fewer than two trading days are omitted.
    """
    if len(prices) == 0:
        raise EmptySeries("price series is empty")
    if np.any(prices.closes <= 0):
        raise InvalidPrice("closes must be positive")

    weeks: dict[date, list[int]] = {}
    for i, d in enumerate(prices.dates):
        if d.weekday() >= 5:
            continue
        weeks.setdefault(week_monday(d), []).append(i)

    starts, rets = [], []
    for monday in sorted(weeks):
        idx = weeks[monday]
        if len(idx) < 2:
            continue
        first, last = prices.closes[idx[0]], prices.closes[idx[-1]]
        starts.append(monday)
        rets.append(last / first - 1.0)
    if not starts:
        raise EmptySeries("no week contains two or more trading days")
    return WeeklySeries(tuple(starts), rets, Unit.SIMPLE_RETURN, series_id=f"{prices.series_id}:weekly")


class AlignedPair(NamedTuple):
    gt_week: WeekLabel
    trade_week: WeekLabel


def pair_indices(svi: WeeklySeries, returns: WeeklySeries) -> tuple[np.ndarray, np.ndarray]:
    """Index arrays ``(gi, ri)`` such that GT week ``gi[j]`` trades in return week ``ri[j]``."""
    gi, ri = [], []
    for j, monday in enumerate(returns.starts):
        sunday = monday - GT_TO_TRADE
        try:
            gi.append(svi.index_of(sunday))
        except KeyError:
            continue
        ri.append(j)
    return np.asarray(gi, dtype=np.intp), np.asarray(ri, dtype=np.intp)


def align(svi: WeeklySeries, returns: WeeklySeries) -> list[AlignedPair]:
    """Pair each GT week with the trade week starting eight days after its Sunday."""
    if len(svi) == 0 or len(returns) == 0:
        raise EmptySeries("cannot align an empty series")
    gi, ri = pair_indices(svi, returns)
    if len(gi) == 0:
        raise NoOverlap(
            f"SVI {svi.starts[0]}..{svi.starts[-1]} does not precede any return week in "
            f"{returns.starts[0]}..{returns.starts[-1]}"
        )
    return [
        AlignedPair(WeekLabel(svi.starts[g], svi.kind), WeekLabel(returns.starts[r], returns.kind))
        for g, r in zip(gi, ri)
    ]


@dataclass
class AccessLog:
    """Every read made through a logged view, plus the reads that were refused."""

    reads: list[tuple[date, str, date]] = field(default_factory=list)
    violations: list[tuple[date, str, date]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.reads)


class LoggedView:
    """Read-only window onto a series that refuses entries dated after ``as_of``.

    Entries are dated by their label start date.
    """

    def __init__(self, series: WeeklySeries, as_of: date, log: AccessLog | None = None):
        if not isinstance(as_of, date):
            raise TypeError("as_of must be a date")
        self.series = series
        self.as_of = as_of
        self.log = log if log is not None else AccessLog()

    def read(self, start: date) -> float:
        entry = (start, self.series.series_id, self.as_of)
        self.log.reads.append(entry)
        if start > self.as_of:
            self.log.violations.append(entry)
            raise FutureAccess(start, self.series.series_id, self.as_of)
        return self.series.read(start)

    __getitem__ = read


def logged_view(series: WeeklySeries, as_of: date, log: AccessLog | None = None) -> tuple[LoggedView, AccessLog]:
    view = LoggedView(series, as_of, log)
    return view, view.log
