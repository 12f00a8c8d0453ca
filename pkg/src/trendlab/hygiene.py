"""Backtest hygiene: null calibration, randomization bug checks, look-ahead audits,
keyword availability gating and in/out-of-sample splits.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from datetime import date, timedelta

import numpy as np

from trendlab import ingest
from trendlab.errors import (
    DegenerateStudy,
    EmptySeries,
    FutureAccess,
    InsufficientHistory,
    InvalidConfig,
)
from trendlab.ingest import GeneratorKind, KeywordFixture, SyntheticSpec, category_counts
from trendlab.series import (
    GT_TO_TRADE,
    WEEK,
    DailyPriceSeries,
    Unit,
    WeeklySeries,
    logged_view,
    pair_indices,
)
from trendlab.stats import BacktestResult, t_stats
from trendlab.strategy import (
    StrategyConfig,
    _as_returns,
    plan,
    position_array,
    run_backtest,
    signal_for_week,
    surprise_arrays,
)

# P(|Z| > 1.95) for a standard normal.
TAIL_195 = math.erfc(1.95 / math.sqrt(2.0))


def derive_seed(master_seed: int, index: int) -> int:
    """Per-trial 64-bit seed; depends only on ``(master_seed, index)``."""
    ss = np.random.SeedSequence([int(master_seed) % 2**64, int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


# -- null calibration ---------------------------------------------------------

DEFAULT_SVI_TEMPLATE = SyntheticSpec(
    length_weeks=1, generator=GeneratorKind.IID_GAUSSIAN, mean=50.0, stdev=10.0, unit=Unit.SVI_POINTS
)


@dataclass(frozen=True)
class NullStudyConfig:
    """A null study: ``n_trials`` synthetic SVI series scored against one return stream.

    ``generator`` is a template; its seed is replaced per trial by
    :func:`derive_seed` and its length and start are fitted to the target.
    A :class:`SyntheticSpec` target is generated once, from its own seed.
    """

    n_trials: int
    target_returns: WeeklySeries | SyntheticSpec
    k: int = 10
    generator: SyntheticSpec = DEFAULT_SVI_TEMPLATE
    master_seed: int = 0
    strategy: StrategyConfig | None = None

    def __post_init__(self):
        if isinstance(self.n_trials, bool) or int(self.n_trials) != self.n_trials or self.n_trials < 1:
            raise InvalidConfig(f"n_trials must be a positive integer, got {self.n_trials!r}")

    @property
    def strategy_config(self) -> StrategyConfig:
        base = self.strategy or StrategyConfig()
        return replace(base, k=self.k)


@dataclass
class NullStudyResult:
    t_stats: np.ndarray
    trial_ids: np.ndarray
    seeds: list[int]
    mean: float
    stdev: float
    frac_above_195: float
    n_degenerate: int
    top: list[tuple[int, float]]
    bottom: list[tuple[int, float]]
    all_t_stats: np.ndarray = field(repr=False, default=None)

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.t_stats)))


def _target_returns(target) -> WeeklySeries:
    if isinstance(target, SyntheticSpec):
        return ingest.generate(replace(target, unit=Unit.SIMPLE_RETURN))
    return _as_returns(target)


def _null_calendar(returns: WeeklySeries, k: int) -> tuple[date, int]:
    """GT start and length covering every return week plus a k-week warm-up."""
    first = returns.starts[0] - GT_TO_TRADE - k * WEEK
    last = returns.starts[-1] - GT_TO_TRADE
    return first, (last - first).days // 7 + 1


def synthetic_svi_matrix(template: SyntheticSpec, seeds, start: date, length: int) -> np.ndarray:
    rows = [
        ingest.generate(replace(template, seed=s, start=start, length_weeks=length, unit=Unit.SVI_POINTS)).values
        for s in seeds
    ]
    return np.vstack(rows)


def score_matrix(svi_values: np.ndarray, returns_values: np.ndarray, pl, config: StrategyConfig,
                 baseline_lag: int = 1) -> np.ndarray:
    """Gross t-stats for each row pairing of SVI and return arrays on a shared calendar plan.

    Either argument may be 1-d (shared by all rows) or 2-d (one row per trial).
    """
    cur, base, delta = surprise_arrays(svi_values, config.k, baseline_lag)
    pos = position_array(cur, base, delta, config)[..., pl.signal_index]
    r = np.asarray(returns_values)[..., pl.ret_index]
    return t_stats(np.atleast_2d(pos * r))


def _summarize_null(all_t, seeds) -> NullStudyResult:
    ids = np.arange(len(all_t))
    ok = np.isfinite(all_t)
    if not ok.any():
        raise DegenerateStudy(f"all {len(all_t)} trials were degenerate (no variance)")
    t = all_t[ok]
    order = np.argsort(t, kind="stable")
    top = [(int(ids[ok][i]), float(t[i])) for i in order[::-1][:3]]
    bottom = [(int(ids[ok][i]), float(t[i])) for i in order[:3]]
    return NullStudyResult(
        t_stats=t,
        trial_ids=ids[ok],
        seeds=list(seeds),
        mean=float(t.mean()),
        stdev=float(t.std(ddof=1)) if t.size > 1 else math.nan,
        frac_above_195=float(np.mean(np.abs(t) > 1.95)),
        n_degenerate=int((~ok).sum()),
        top=top,
        bottom=bottom,
        all_t_stats=all_t,
    )


def null_study(config: NullStudyConfig) -> NullStudyResult:
    """Score ``n_trials`` independent synthetic SVI series against the target returns."""
    returns = _target_returns(config.target_returns)
    strat = config.strategy_config
    start, length = _null_calendar(returns, strat.k)
    frame = WeeklySeries(tuple(start + i * WEEK for i in range(length)), np.zeros(length), Unit.SVI_POINTS)
    pl = plan(frame, returns, strat.k)
    if len(pl.svi_index) < 2:
        raise InsufficientHistory("target return series is too short")
    seeds = [derive_seed(config.master_seed, i) for i in range(config.n_trials)]
    all_t = np.empty(config.n_trials)
    # chunked to bound memory on long studies
    for lo in range(0, config.n_trials, 500):
        chunk = seeds[lo:lo + 500]
        v = synthetic_svi_matrix(config.generator, chunk, start, length)
        all_t[lo:lo + len(chunk)] = score_matrix(v, returns.values, pl, strat)
    return _summarize_null(all_t, seeds)


def write_null_csv(result: NullStudyResult, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial", "seed", "t_stat"])
        for i, (s, t) in enumerate(zip(result.seeds, result.all_t_stats)):
            w.writerow([i, s, repr(float(t))])


def keyword_set_extremes(target_returns, set_sizes=(200, 100, 100, 100), k: int = 10,
                         master_seed: int = 0, generator: SyntheticSpec = DEFAULT_SVI_TEMPLATE):
    """Null stand-ins for keyword sets of the given sizes.

    Runs one null study per set size (seeded independently) and returns the
    studies; their ``max_abs``, ``top`` and ``bottom`` are what a keyword table
    would show if every keyword were noise.
    """
    out = []
    for j, size in enumerate(set_sizes):
        cfg = NullStudyConfig(size, target_returns, k=k, generator=generator,
                              master_seed=derive_seed(master_seed, j))
        out.append(null_study(cfg))
    return out


# -- randomization bug detector ---------------------------------------------


@dataclass
class ArmResult:
    name: str
    t_stats: np.ndarray
    mean: float
    threshold: float
    passed: bool
    n_degenerate: int


@dataclass
class BugCheckResult:
    verdict: str
    arms: dict[str, ArmResult]
    n_trials: int

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"


def _randomized(values: np.ndarray, rng: np.random.Generator, n: int, mode: str, clip=None) -> np.ndarray:
    if mode == "shuffle":
        return rng.permuted(np.broadcast_to(values, (n, values.size)), axis=1)
    if mode == "gaussian":
        draw = rng.normal(values.mean(), values.std(), size=(n, values.size))
        return np.clip(draw, *clip) if clip else draw
    raise ValueError(f"unknown randomization mode {mode!r}")


def randomization_bug_check(svi: WeeklySeries, prices, config: StrategyConfig | None = None,
                            n_trials: int = 500, seed: int = 0, mode: str = "shuffle",
                            baseline_lag: int = 1) -> BugCheckResult:
    """Re-run the pipeline with randomized inputs; persistent performance means a bug.

    Arms: (a) real SVI vs randomized returns, (b) randomized SVI vs real
    returns, (c) both randomized. An arm passes when its mean t-stat is within
    ``3 / sqrt(n_trials)`` of zero; the verdict is PASS only if all arms pass.
    ``baseline_lag=0`` runs the fault-injection build.
    """
    config = config or StrategyConfig()
    if n_trials < 1:
        raise InvalidConfig("n_trials must be positive")
    returns = _as_returns(prices)
    pl = plan(svi, returns, config.k)
    if len(pl.svi_index) < 2:
        raise InsufficientHistory("not enough aligned weeks")
    rng = np.random.default_rng(int(seed) % 2**64)
    v, r = svi.values, returns.values
    threshold = 3.0 / math.sqrt(n_trials)
    arms_in = {
        "a_real_svi_random_returns": (v, _randomized(r, rng, n_trials, mode)),
        "b_random_svi_real_returns": (_randomized(v, rng, n_trials, mode, clip=(0.0, 100.0)), r),
        "c_both_random": (
            _randomized(v, rng, n_trials, mode, clip=(0.0, 100.0)),
            _randomized(r, rng, n_trials, mode),
        ),
    }
    arms = {}
    for name, (sv, rv) in arms_in.items():
        t = score_matrix(sv, rv, pl, config, baseline_lag)
        ok = np.isfinite(t)
        mean = float(t[ok].mean()) if ok.any() else math.nan
        arms[name] = ArmResult(name, t[ok], mean, threshold, bool(ok.any() and abs(mean) <= threshold),
                               int((~ok).sum()))
    verdict = "PASS" if all(a.passed for a in arms.values()) else "FAIL"
    return BugCheckResult(verdict, arms, n_trials)


# -- causality audit -----------------------------------------------------------


@dataclass
class AuditReport:
    n_weeks: int
    n_reads: int
    violations: list[tuple[date, str, date]]
    mismatches: list[date]

    @property
    def clean(self) -> bool:
        return not self.violations and not self.mismatches


def causality_audit(svi: WeeklySeries, prices, config: StrategyConfig | None = None,
                    baseline_lag: int = 1) -> AuditReport:
    """Replay every position through logged views and compare with the engine.

    For the trade week starting Monday ``m`` (GT week Sunday ``d = m - 8``):

    * the surprise value may only use SVI dated on or before ``m - 2``, the
      Saturday that closes GT week ``d``;
    * the baseline ``v̄_{t-1}`` may only use SVI dated on or before ``d - 1``,
      i.e. it must be known before week ``d`` starts.

    Reads past either cut-off are logged as violations.
    """
    config = config or StrategyConfig()
    returns = _as_returns(prices)
    engine = run_backtest(svi, returns, config, baseline_lag=baseline_lag)
    engine_pos = dict(zip(engine.trade_weeks, engine.positions))
    violations, mismatches, n_reads = [], [], 0
    for gi, ri in zip(*pair_indices(svi, returns)):
        if gi < config.k:
            continue
        d, m = svi.starts[gi], returns.starts[ri]
        current, cur_log = logged_view(svi, m - timedelta(days=2))
        history, hist_log = logged_view(svi, d - timedelta(days=1))
        try:
            v, b, delta = signal_for_week(current, history, d, config.k, baseline_lag)
        except FutureAccess:
            pass
        else:
            pos = int(position_array(np.array([v]), np.array([b]), np.array([delta]), config)[0])
            if pos != engine_pos.get(m):
                mismatches.append(m)
        for log in (cur_log, hist_log):
            n_reads += len(log)
            violations.extend(log.violations)
    return AuditReport(engine.n, n_reads, violations, mismatches)


# -- keyword availability -----------------------------------------------------


@dataclass
class GateReport:
    backtest_start: date
    usable: list[KeywordFixture]
    anachronistic: list[KeywordFixture]

    def counts(self) -> dict[str, dict[str, int]]:
        return {"usable": category_counts(self.usable), "anachronistic": category_counts(self.anachronistic)}


def availability_gate(fixtures, backtest_start: date) -> GateReport:
    """Split keywords into those known before ``backtest_start`` and those that were not."""
    usable, late = [], []
    for f in fixtures:
        (usable if f.availability_date < backtest_start else late).append(f)
    return GateReport(backtest_start, usable, late)


# -- in/out-of-sample splits -------------------------------------------------


@dataclass(frozen=True)
class SplitSpec:
    """In-sample ends on ``in_sample_end``; out-of-sample starts on ``out_sample_start``.

    Neither date may fall inside a Monday-Friday trade week.
    """

    in_sample_end: date
    out_sample_start: date

    def __post_init__(self):
        if self.out_sample_start <= self.in_sample_end:
            raise InvalidConfig("out_sample_start must be after in_sample_end")
        if self.in_sample_end.weekday() < 4:
            raise InvalidConfig(f"in_sample_end {self.in_sample_end} cuts a trade week")
        if 0 < self.out_sample_start.weekday() < 5:
            raise InvalidConfig(f"out_sample_start {self.out_sample_start} cuts a trade week")

    @classmethod
    def at(cls, boundary: date) -> "SplitSpec":
        """Split at the trade week containing (or following) ``boundary``; that week goes out-of-sample."""
        wd = boundary.weekday()
        monday = boundary - timedelta(days=wd) if wd < 5 else boundary + timedelta(days=7 - wd)
        return cls(monday - timedelta(days=1), monday)


def _aligned_count(svi: WeeklySeries, returns: WeeklySeries) -> int:
    return len(pair_indices(svi, returns)[0])


def split_backtest(svi: WeeklySeries, prices: DailyPriceSeries, config: StrategyConfig | None,
                   split: SplitSpec) -> tuple[BacktestResult, BacktestResult]:
    """Independent in-sample and out-of-sample backtests.

    No price crosses the boundary. The out-of-sample baseline may warm up on
    SVI from before the boundary.
    """
    config = config or StrategyConfig()
    need = config.k + 2
    results = []
    for label, s, p in (
        ("in-sample", svi.restrict(last=split.in_sample_end), prices.restrict(last=split.in_sample_end)),
        ("out-of-sample", svi, prices.restrict(first=split.out_sample_start)),
    ):
        if len(s) == 0 or len(p) == 0:
            raise InsufficientHistory(f"{label}: no data")
        try:
            returns = _as_returns(p)
        except EmptySeries:
            raise InsufficientHistory(f"{label}: no complete trade week") from None
        if _aligned_count(s, returns) < need:
            raise InsufficientHistory(f"{label}: fewer than k+2={need} aligned weeks")
        results.append(run_backtest(s, returns, config))
    return results[0], results[1]
