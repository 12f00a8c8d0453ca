"""Backtesting Google-Trends SVI-surprise strategies, with the hygiene checks that keep them honest."""

from trendlab.errors import *  # noqa: F401,F403
from trendlab.hygiene import (
    NullStudyConfig,
    SplitSpec,
    availability_gate,
    causality_audit,
    null_study,
    randomization_bug_check,
    split_backtest,
)
from trendlab.ingest import (
    KeywordFixture,
    SyntheticSpec,
    generate,
    load_keyword_fixtures,
    load_price_csv,
    load_svi_csv,
)
from trendlab.series import DailyPriceSeries, WeeklySeries, align, logged_view, weekly_returns
from trendlab.stats import BacktestResult, apply_costs, cumulate, t_stat
from trendlab.strategy import StrategyConfig, positions, rolling_baseline, run_backtest, surprise, sweep_k

__version__ = "0.1.0"
