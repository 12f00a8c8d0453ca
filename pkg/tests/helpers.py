"""Fixture builders shared by the test modules."""

from datetime import date, timedelta

import numpy as np

from trendlab.ingest import gt_normalize, random_walk_prices, trading_days
from trendlab.series import DailyPriceSeries, Unit, WeeklySeries

SUNDAY0 = date(2004, 1, 4)


def svi_series(values, start=SUNDAY0, series_id="svi"):
    starts = tuple(start + timedelta(weeks=i) for i in range(len(values)))
    return WeeklySeries(starts, values, Unit.SVI_POINTS, series_id=series_id)


def gt_like_svi(n, seed, start=SUNDAY0):
    """Integer 0-100 SVI with a persistent component, as GT would export it."""
    rng = np.random.default_rng(seed)
    raw = np.cumsum(rng.normal(0, 1, n)) * 0.3 + rng.normal(0, 1, n)
    return svi_series(gt_normalize(raw), start)


def prices_for(svi, seed, holiday_rate=0.0, drift=0.0, vol=0.01):
    """Daily closes covering every trade week paired with ``svi`` (plus a margin)."""
    rng = np.random.default_rng(seed + 1)
    first = svi.starts[0] + timedelta(days=8)
    last = svi.starts[-1] + timedelta(days=8 + 4)
    days = trading_days(first, last)
    if holiday_rate:
        days = [d for d in days if rng.random() >= holiday_rate]
    return random_walk_prices(days, seed, drift=drift, vol=vol)


def daily(pairs):
    ds, cs = zip(*pairs)
    return DailyPriceSeries(tuple(ds), cs)
