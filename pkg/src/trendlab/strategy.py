"""The SVI-surprise contrarian strategy.

For each GT week t with a k-week right-aligned baseline ``v̄``:

    delta_t = v_t - v̄_{t-1}
    held position in the following trade week = -sign(delta_t)

In ``reference`` tie mode a tie (``v_t == v̄_{t-1}``) goes long, which is what
``pos = 2*(v > v̄_lagged) - 1; perf = -pos * r`` produces. ``deadband`` mode
stays flat while ``|delta_t| <= epsilon``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from datetime import date
from typing import Iterable

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from trendlab.errors import (
    AnachronisticKeyword,
    InsufficientHistory,
    InvalidConfig,
    NoOverlap,
)
from trendlab.series import (
    WEEK,
    DailyPriceSeries,
    Unit,
    WeekLabel,
    WeeklySeries,
    pair_indices,
    weekly_returns,
)
from trendlab.stats import BacktestResult, CostModel, summarize


class TiePolicy(str, enum.Enum):
    REFERENCE = "reference"
    DEADBAND = "deadband"


@dataclass(frozen=True)
class StrategyConfig:
    k: int = 10
    tie_policy: TiePolicy = TiePolicy.REFERENCE
    epsilon: float = 0.0
    invert: bool = False
    cost_bps: float = 0.0
    cost_model: CostModel = CostModel.ROUND_TRIP
    compound: bool = False

    def __post_init__(self):
        try:
            object.__setattr__(self, "tie_policy", TiePolicy(self.tie_policy))
            object.__setattr__(self, "cost_model", CostModel(self.cost_model))
        except ValueError as exc:
            raise InvalidConfig(str(exc)) from None
        if isinstance(self.k, bool) or not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise InvalidConfig(f"k must be a positive integer, got {self.k!r}")
        if not (self.epsilon >= 0 and math.isfinite(self.epsilon)):
            raise InvalidConfig(f"epsilon must be non-negative, got {self.epsilon}")
        if not (self.cost_bps >= 0 and math.isfinite(self.cost_bps)):
            raise InvalidConfig(f"cost_bps must be non-negative, got {self.cost_bps}")

    def as_dict(self) -> dict:
        return {
            "k": int(self.k),
            "tie_policy": self.tie_policy.value,
            "epsilon": float(self.epsilon),
            "invert": bool(self.invert),
            "cost_bps": float(self.cost_bps),
            "cost_model": self.cost_model.value,
            "compound": bool(self.compound),
        }


@dataclass(frozen=True)
class SignalRecord:
    gt_week: WeekLabel
    v: float
    baseline_prev: float
    delta: float
    position: int | None = None


# -- array core ---------------------------------------------------------------
# Shared by the single-series API below and by the batched null/randomization
# harnesses, which pass 2-d arrays (trials x weeks).


def rolling_mean(values: np.ndarray, k: int) -> np.ndarray:
    """Right-aligned k-point means along the last axis; output is ``k - 1`` shorter."""
    values = np.asarray(values, dtype=float)
    if values.shape[-1] < k:
        raise InsufficientHistory(f"need at least {k} weeks, got {values.shape[-1]}")
    return sliding_window_view(values, k, axis=-1).mean(axis=-1)


def surprise_arrays(values: np.ndarray, k: int, baseline_lag: int = 1):
    """Current value, baseline and surprise for weeks ``t = k .. n-1``.

    ``baseline_lag=1`` compares ``v_t`` with the mean of ``v_{t-k} .. v_{t-1}``.
    ``baseline_lag=0`` is a fault-injection switch: the baseline window then
    ends at ``t`` itself. Both cover the same weeks so their outputs line up.
    """
    if baseline_lag not in (0, 1):
        raise ValueError("baseline_lag must be 0 or 1")
    values = np.asarray(values, dtype=float)
    n = values.shape[-1]
    if n < k + 1:
        raise InsufficientHistory(f"surprise needs at least k+1={k + 1} weeks, got {n}")
    base = rolling_mean(values, k)  # base[..., j] = mean(values[..., j:j+k])
    baseline = base[..., 1:] if baseline_lag == 0 else base[..., :-1]
    current = values[..., k:]
    return current, baseline, current - baseline


def position_array(current, baseline, delta, config: StrategyConfig) -> np.ndarray:
    if config.tie_policy is TiePolicy.REFERENCE:
        pos = np.where(current > baseline, -1, 1)
    else:
        pos = np.where(np.abs(delta) > config.epsilon, -np.sign(delta), 0).astype(int)
    if config.invert:
        pos = -pos
    return pos.astype(np.int64)


# -- single-series API -------------------------------------------------------


def rolling_baseline(svi: WeeklySeries, k: int) -> WeeklySeries:
    """k-week right-aligned mean, labelled by the last week of each window."""
    if k < 1:
        raise InvalidConfig("k must be positive")
    means = rolling_mean(svi.values, k)
    return WeeklySeries(svi.starts[k - 1:], means, svi.unit, svi.kind, f"{svi.series_id}:mean{k}")


def surprise(svi: WeeklySeries, k: int, baseline_lag: int = 1) -> list[SignalRecord]:
    current, baseline, delta = surprise_arrays(svi.values, k, baseline_lag)
    labels = svi.labels[k:]
    return [
        SignalRecord(lab, float(v), float(b), float(d))
        for lab, v, b, d in zip(labels, current, baseline, delta)
    ]


def positions(records: Iterable[SignalRecord], config: StrategyConfig) -> list[SignalRecord]:
    records = list(records)
    if not records:
        return []
    cur = np.array([r.v for r in records])
    base = np.array([r.baseline_prev for r in records])
    delta = np.array([r.delta for r in records])
    pos = position_array(cur, base, delta, config)
    return [replace(r, position=int(p)) for r, p in zip(records, pos)]


def signal_for_week(current, history, gt_start: date, k: int, baseline_lag: int = 1):
    """Compute ``(v, baseline, delta)`` for one GT week by explicit reads.

    ``current`` and ``history`` are anything with ``read(date)``: a
    :class:`WeeklySeries` or a logged view. The surprise value is read through
    ``current`` and the baseline window through ``history``, so a causality
    audit can give each its own cut-off.
    """
    v = current.read(gt_start)
    first = 1 if baseline_lag == 1 else 0
    window = [history.read(gt_start - j * WEEK) for j in range(first, first + k)]
    # oldest first, same summation order as the window mean
    baseline = float(np.mean(window[::-1]))
    return v, baseline, v - baseline


@dataclass(frozen=True)
class Plan:
    """Which GT weeks feed which trade weeks, restricted to weeks with a baseline."""

    svi_index: np.ndarray
    ret_index: np.ndarray
    signal_index: np.ndarray  # index into the surprise arrays (svi_index - k)


def plan(svi: WeeklySeries, returns: WeeklySeries, k: int) -> Plan:
    gi, ri = pair_indices(svi, returns)
    if len(gi) == 0:
        raise NoOverlap("no GT week precedes any return week")
    keep = gi >= k
    gi, ri = gi[keep], ri[keep]
    return Plan(gi, ri, gi - k)


def _as_returns(prices) -> WeeklySeries:
    if isinstance(prices, WeeklySeries):
        if prices.unit is not Unit.SIMPLE_RETURN:
            raise TypeError("expected a simple_return series")
        return prices
    if isinstance(prices, DailyPriceSeries):
        return weekly_returns(prices)
    raise TypeError(f"expected prices or weekly returns, got {type(prices).__name__}")


def keyword_watermark(keyword, backtest_start: date, allow_anachronistic: bool) -> str | None:
    """Refuse a keyword that was not known before ``backtest_start`` unless overridden.

    Returns the watermark to attach to outputs when the override is used.
    """
    if keyword is None or keyword.availability_date < backtest_start:
        return None
    msg = (
        f"BIASED: keyword {keyword.keyword!r} available {keyword.availability_date} "
        f"is not before backtest start {backtest_start}"
    )
    if not allow_anachronistic:
        raise AnachronisticKeyword(msg)
    return msg


def run_backtest(
    svi: WeeklySeries,
    prices,
    config: StrategyConfig | None = None,
    *,
    keyword=None,
    allow_anachronistic: bool = False,
    baseline_lag: int = 1,
) -> BacktestResult:
    """Backtest the strategy for one SVI series against one asset.

    ``prices`` may be daily closes or already-computed weekly returns.
    ``keyword`` (a :class:`~trendlab.ingest.KeywordFixture`) enables the
    availability gate. ``baseline_lag=0`` runs the fault-injection build used
    to exercise the bug detectors; never use it for real results.
    """
    config = config or StrategyConfig()
    returns = _as_returns(prices)
    k = int(config.k)
    if len(svi) < k + 1:
        raise InsufficientHistory(f"SVI has {len(svi)} weeks, k={k} needs at least {k + 1}")
    pl = plan(svi, returns, k)
    if len(pl.svi_index) < 2:
        raise InsufficientHistory(f"only {len(pl.svi_index)} aligned week(s) have a k={k} baseline")

    current, baseline, delta = surprise_arrays(svi.values, k, baseline_lag)
    pos = position_array(current, baseline, delta, config)[pl.signal_index]
    r = returns.values[pl.ret_index]
    trade_weeks = [returns.starts[i] for i in pl.ret_index]
    gt_weeks = [svi.starts[i] for i in pl.svi_index]
    mark = keyword_watermark(keyword, trade_weeks[0], allow_anachronistic)
    return summarize(
        trade_weeks, gt_weeks, pos, pos * r, config.cost_bps, config.cost_model,
        config.compound, config=config, watermark=mark,
    )


@dataclass(frozen=True)
class SweepRow:
    k: int
    t_stat_gross: float
    t_stat_net: float
    n: int
    error: str | None = None


def sweep_k(svi: WeeklySeries, prices, base_config: StrategyConfig | None = None, k_range=range(2, 31)) -> list[SweepRow]:
    """One backtest per k; a k without enough history becomes a gap row instead of an error."""
    base_config = base_config or StrategyConfig()
    ks = sorted(set(int(k) for k in k_range))
    if not ks:
        raise InvalidConfig("k_range is empty")
    returns = _as_returns(prices)
    rows = []
    for k in ks:
        try:
            res = run_backtest(svi, returns, replace(base_config, k=k))
        except (InsufficientHistory, NoOverlap) as exc:
            rows.append(SweepRow(k, math.nan, math.nan, 0, exc.kind))
            continue
        rows.append(SweepRow(k, res.t_stat_gross, res.t_stat_net, res.n, res.t_stat_gross_error))
    return rows


__all__ = [
    "Plan",
    "SignalRecord",
    "StrategyConfig",
    "SweepRow",
    "TiePolicy",
    "keyword_watermark",
    "plan",
    "position_array",
    "positions",
    "rolling_baseline",
    "rolling_mean",
    "run_backtest",
    "signal_for_week",
    "surprise",
    "surprise_arrays",
    "sweep_k",
]
