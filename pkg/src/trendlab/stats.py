"""Performance statistics and the transaction-cost model."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from datetime import date

import numpy as np

from trendlab.errors import InsufficientData, InvalidConfig, NoVariance

BP_PER_UNIT = 10_000.0


def t_stat(returns) -> float:
    """One-sample t statistic of the mean against zero: ``mean / stdev * sqrt(n)``.

    Uses the sample (n - 1) standard deviation.

    Raises:
        InsufficientData: fewer than two returns.
        NoVariance: all returns identical.
    """
    x = np.asarray(returns, dtype=float)
    n = x.size
    if n < 2:
        raise InsufficientData(f"t-stat needs at least 2 returns, got {n}")
    if np.all(x == x[0]):
        raise NoVariance("all returns are identical")
    sd = x.std(ddof=1)
    if sd == 0.0:
        raise NoVariance("zero sample standard deviation")
    return float(x.mean() / sd * math.sqrt(n))


def t_stats(matrix) -> np.ndarray:
    """Row-wise :func:`t_stat`; degenerate rows come back as NaN."""
    x = np.atleast_2d(np.asarray(matrix, dtype=float))
    n = x.shape[1]
    out = np.full(x.shape[0], np.nan)
    if n < 2:
        return out
    sd = x.std(axis=1, ddof=1)
    flat = np.all(x == x[:, :1], axis=1) | (sd == 0.0)
    ok = ~flat
    out[ok] = x[ok].mean(axis=1) / sd[ok] * math.sqrt(n)
    return out


class CostModel(str, enum.Enum):
    # Flat every weekend: enter Monday, exit Friday, two trades per active week.
    ROUND_TRIP = "round_trip"
    # Hold through weekends; trade only the change in position.
    ON_CHANGE = "on_change"


@dataclass(frozen=True)
class CostBreakdown:
    net: np.ndarray
    fees: np.ndarray
    trades: int
    total_fees: float


def apply_costs(positions, gross, cost_bps: float, model: CostModel = CostModel.ROUND_TRIP) -> CostBreakdown:
    """Charge ``cost_bps`` per unit traded and return net weekly returns.

    Under the default round-trip model every week with a nonzero position
    costs ``2 * cost_bps * 1e-4 * |position|``. The on-change model charges
    ``|p_t - p_{t-1}|`` units each week, including the initial entry and the
    final exit (booked on the last week).
    """
    if cost_bps < 0 or not math.isfinite(cost_bps):
        raise InvalidConfig(f"cost_bps must be a non-negative number, got {cost_bps}")
    p = np.asarray(positions, dtype=float)
    g = np.asarray(gross, dtype=float)
    if p.shape != g.shape:
        raise ValueError("positions and gross returns differ in length")
    model = CostModel(model)
    if model is CostModel.ROUND_TRIP:
        units = 2.0 * np.abs(p)
    else:
        units = np.abs(np.diff(p, prepend=0.0))
        if units.size:
            units[-1] += abs(p[-1])
    # divide by 1e4 rather than multiply by the inexact 1e-4
    fees = units * cost_bps / BP_PER_UNIT
    return CostBreakdown(
        net=g - fees,
        fees=fees,
        trades=int(round(units.sum())),
        total_fees=math.fsum(units) * cost_bps / BP_PER_UNIT,
    )


def cumulate(returns, compound: bool = False) -> np.ndarray:
    """Running performance: arithmetic sum by default, compounded product when asked."""
    r = np.asarray(returns, dtype=float)
    if compound:
        return np.cumprod(1.0 + r) - 1.0
    return np.cumsum(r)


@dataclass(frozen=True)
class WeekRecord:
    trade_week: date
    gt_week: date
    position: int
    gross_return: float
    net_return: float
    fee: float


@dataclass
class BacktestResult:
    weeks: list[WeekRecord]
    t_stat_gross: float
    t_stat_net: float
    n: int
    cum_gross: np.ndarray
    cum_net: np.ndarray
    total_fees: float
    trades: int
    # Why a t-stat is NaN, e.g. "NoVariance".
    t_stat_gross_error: str | None = None
    t_stat_net_error: str | None = None
    watermark: str | None = None
    config: object = None

    @property
    def positions(self) -> np.ndarray:
        return np.array([w.position for w in self.weeks], dtype=int)

    @property
    def gross(self) -> np.ndarray:
        return np.array([w.gross_return for w in self.weeks])

    @property
    def net(self) -> np.ndarray:
        return np.array([w.net_return for w in self.weeks])

    @property
    def trade_weeks(self) -> list[date]:
        return [w.trade_week for w in self.weeks]


def _safe_t(x) -> tuple[float, str | None]:
    try:
        return t_stat(x), None
    except (NoVariance, InsufficientData) as exc:
        return math.nan, exc.kind


def summarize(trade_weeks, gt_weeks, positions, gross, cost_bps, cost_model=CostModel.ROUND_TRIP,
              compound=False, config=None, watermark=None) -> BacktestResult:
    positions = np.asarray(positions, dtype=int)
    gross = np.asarray(gross, dtype=float)
    costs = apply_costs(positions, gross, cost_bps, cost_model)
    tg, tg_err = _safe_t(gross)
    tn, tn_err = _safe_t(costs.net)
    weeks = [
        WeekRecord(tw, gw, int(p), float(g), float(nr), float(f))
        for tw, gw, p, g, nr, f in zip(trade_weeks, gt_weeks, positions, gross, costs.net, costs.fees)
    ]
    return BacktestResult(
        weeks=weeks,
        t_stat_gross=tg,
        t_stat_net=tn,
        n=len(weeks),
        cum_gross=cumulate(gross, compound),
        cum_net=cumulate(costs.net, compound),
        total_fees=costs.total_fees,
        trades=costs.trades,
        t_stat_gross_error=tg_err,
        t_stat_net_error=tn_err,
        watermark=watermark,
        config=config,
    )
