"""Fees, parameter sweeps and out-of-sample checks.

Charges 2 bps per trade on a weekend-flat strategy, sweeps the baseline length
k over 2..30, and splits the sample so in-sample and out-of-sample t-stats can
be compared.
"""

from datetime import date

from trendlab import SplitSpec, StrategyConfig, run_backtest, split_backtest, sweep_k
from trendlab.ingest import GeneratorKind, SyntheticSpec, generate, random_walk_prices, trading_days
from trendlab.series import Unit

svi = generate(SyntheticSpec(420, GeneratorKind.RANDOM_WALK, seed=5, mean=50, stdev=2, unit=Unit.SVI_POINTS))
prices = random_walk_prices(trading_days(date(2004, 1, 12), date(2012, 3, 30)), seed=5)

res = run_backtest(svi, prices, StrategyConfig(k=10, cost_bps=2))
print(f"{res.n} weeks, {res.trades} trades, fees {res.total_fees:.4f}")
print(f"cumulative gross {res.cum_gross[-1]:+.4f}  net {res.cum_net[-1]:+.4f}")
print(f"t gross {res.t_stat_gross:+.3f}  t net {res.t_stat_net:+.3f}")

print("\n k   t_gross   t_net")
for row in sweep_k(svi, prices, StrategyConfig(cost_bps=2)):
    print(f"{row.k:2d}  {row.t_stat_gross:+7.3f}  {row.t_stat_net:+7.3f}")

best = max(sweep_k(svi, prices), key=lambda r: r.t_stat_gross)
ins, outs = split_backtest(svi, prices, StrategyConfig(k=best.k), SplitSpec.at(date(2009, 1, 5)))
print(f"\nbest k={best.k}: in-sample t {ins.t_stat_gross:+.3f} ({ins.n} weeks), "
      f"out-of-sample t {outs.t_stat_gross:+.3f} ({outs.n} weeks)")
