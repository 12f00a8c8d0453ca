"""Build an SVI surprise signal and backtest it.

Generates a GT-style integer SVI series and a random-walk price path, shows the
first few baselines, surprises and positions, then prints the weekly backtest.
"""

from datetime import date, timedelta

import numpy as np

from trendlab import StrategyConfig, WeeklySeries, positions, run_backtest, surprise
from trendlab.ingest import gt_normalize, random_walk_prices, trading_days

rng = np.random.default_rng(7)
n = 260
raw = np.cumsum(rng.normal(0, 1, n)) + rng.normal(0, 2, n)
start = date(2004, 1, 4)
svi = WeeklySeries(tuple(start + timedelta(weeks=i) for i in range(n)), gt_normalize(raw), series_id="demo")

days = trading_days(start + timedelta(days=8), start + timedelta(weeks=n, days=12))
prices = random_walk_prices(days, seed=7, vol=0.01)

config = StrategyConfig(k=10)
recs = positions(surprise(svi, config.k), config)
print("GT week      v     baseline  delta   position")
for r in recs[:6]:
    print(f"{r.gt_week.start_date}  {r.v:5.0f}  {r.baseline_prev:8.2f}  {r.delta:+6.2f}  {r.position:+d}")

res = run_backtest(svi, prices, config)
print(f"\n{res.n} trade weeks, first {res.trade_weeks[0]}, last {res.trade_weeks[-1]}")
print(f"t-stat {res.t_stat_gross:+.3f}, cumulative return {res.cum_gross[-1]:+.4f}")

# a dead band of one SVI point ignores GT rounding noise
flat = run_backtest(svi, prices, StrategyConfig(k=10, tie_policy="deadband", epsilon=1.0))
print(f"dead band: {int((flat.positions == 0).sum())} flat weeks, t-stat {flat.t_stat_gross:+.3f}")
