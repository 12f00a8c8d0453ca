"""Command-line entry point.

    trendlab backtest SVI.csv PRICES.csv [--k 10 --cost-bps 2 --out DIR]
    trendlab sweep SVI.csv PRICES.csv --k-min 2 --k-max 30
    trendlab nullcheck [--prices PRICES.csv | --synthetic] --trials 2000 --k 10
    trendlab keywords [FIXTURES.csv] --start 2004-01-01

Exit codes: 0 success, 1 usage, 2 data error, 3 engine error. Errors are also
written to stderr as ``{"error": {"kind": ..., "message": ...}}``.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
from datetime import date, datetime, timezone
from pathlib import Path

from trendlab import __version__, hygiene, ingest
from trendlab.errors import DataError, EngineError, TrendlabError
from trendlab.ingest import SyntheticSpec
from trendlab.stats import BacktestResult
from trendlab.strategy import StrategyConfig, keyword_watermark, run_backtest, sweep_k

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_ENGINE = 0, 1, 2, 3


class UsageError(Exception):
    kind = "UsageError"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _num(x):
    """JSON-safe float: NaN and infinities become null."""
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _fmt(x) -> str:
    return repr(float(x))


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    now = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return now.replace(microsecond=0).isoformat()


def master_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("TRENDLAB_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"TRENDLAB_SEED={env!r} is not an integer") from None
    return 0


def _config(args) -> StrategyConfig:
    return StrategyConfig(
        k=args.k,
        tie_policy=args.tie_policy,
        epsilon=args.epsilon,
        invert=args.invert,
        cost_bps=args.cost_bps,
        cost_model=args.cost_model,
        compound=args.compound,
    )


def manifest(command: str, args, config: StrategyConfig | None, inputs) -> dict:
    return {
        "command": command,
        "config": config.as_dict() if config else None,
        "input_paths": [str(p) for p in inputs],
        "master_seed": master_seed(args),
        "engine_version": __version__,
        "timestamp": _timestamp(),
    }


class Outputs:
    """Writes payload files into one directory and records their hashes in ``manifest.json``."""

    def __init__(self, out_dir, man: dict):
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.manifest = man
        self.hashes: dict[str, str] = {}

    def write_text(self, name: str, text: str, payload: str | None = None):
        (self.dir / name).write_text(text, encoding="utf-8", newline="")
        self.hashes[name] = _sha256(text if payload is None else payload)

    def write_csv(self, name: str, header, rows, comment: str | None = None):
        lines = []
        if comment:
            lines.append(f"# {comment}\n")
        buf = _CsvBuffer()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        self.write_text(name, "".join(lines) + buf.text)

    def write_json(self, name: str, payload: dict):
        """Write ``payload`` with the manifest embedded; the hash covers the payload only."""
        self.write_text(name, _dump({**payload, "manifest": self.manifest}), payload=_dump(payload))

    def close(self):
        (self.dir / "manifest.json").write_text(
            _dump({**self.manifest, "payload_sha256": self.hashes}), encoding="utf-8"
        )


class _CsvBuffer:
    def __init__(self):
        self.parts = []

    def write(self, s):
        self.parts.append(s)

    @property
    def text(self):
        return "".join(self.parts)


def _result_rows(res: BacktestResult):
    for w, cg, cn in zip(res.weeks, res.cum_gross, res.cum_net):
        yield [w.trade_week.isoformat(), w.position, _fmt(w.gross_return), _fmt(w.net_return), _fmt(cg), _fmt(cn)]


RESULT_HEADER = ["trade_week", "position", "gross", "net", "cum_gross", "cum_net"]


def _summary(res: BacktestResult) -> dict:
    return {
        "t_stat_gross": _num(res.t_stat_gross),
        "t_stat_net": _num(res.t_stat_net),
        "t_stat_gross_error": res.t_stat_gross_error,
        "t_stat_net_error": res.t_stat_net_error,
        "n": res.n,
        "trades": res.trades,
        "total_fees": _num(res.total_fees),
        "first_trade_week": res.weeks[0].trade_week.isoformat() if res.weeks else None,
        "last_trade_week": res.weeks[-1].trade_week.isoformat() if res.weeks else None,
        "watermark": res.watermark,
    }


def _write_backtest(out: Outputs, res: BacktestResult, prefix: str = ""):
    out.write_csv(f"{prefix}result.csv", RESULT_HEADER, _result_rows(res), comment=res.watermark)
    out.write_json(f"{prefix}summary.json", _summary(res))


def _keyword(args):
    if not args.keyword:
        if args.allow_anachronistic:
            raise UsageError("--allow-anachronistic needs --keyword")
        return None
    fixtures = ingest.load_keyword_fixtures(args.keywords)
    for f in fixtures:
        if f.keyword == args.keyword:
            return f
    raise UsageError(f"keyword {args.keyword!r} not found in fixtures")


def cmd_backtest(args) -> int:
    config = _config(args)
    svi = ingest.load_svi_csv(args.svi)
    prices = ingest.load_price_csv(args.prices)
    kw = _keyword(args)
    out = Outputs(args.out, manifest("backtest", args, config, [args.svi, args.prices]))
    if args.split:
        split = hygiene.SplitSpec.at(args.split)
        ins, outs = hygiene.split_backtest(svi, prices, config, split)
        for res in (ins, outs):
            # gate against each segment's own start
            res.watermark = _gate(kw, res, args.allow_anachronistic)
        _write_backtest(out, ins, "in_sample_")
        _write_backtest(out, outs, "out_sample_")
        out.write_json("summary.json", {
            "split": {"in_sample_end": split.in_sample_end.isoformat(),
                      "out_sample_start": split.out_sample_start.isoformat()},
            "in_sample": _summary(ins),
            "out_sample": _summary(outs),
        })
    else:
        res = run_backtest(svi, prices, config, keyword=kw, allow_anachronistic=args.allow_anachronistic)
        _write_backtest(out, res)
    out.close()
    return EXIT_OK


def _gate(kw, res: BacktestResult, allow: bool):
    return keyword_watermark(kw, res.weeks[0].trade_week, allow)


def cmd_sweep(args) -> int:
    if args.k_min > args.k_max:
        raise UsageError(f"--k-min {args.k_min} exceeds --k-max {args.k_max}")
    if args.k_min < 1:
        raise UsageError("--k-min must be at least 1")
    config = _config(args)
    svi = ingest.load_svi_csv(args.svi)
    prices = ingest.load_price_csv(args.prices)
    rows = sweep_k(svi, prices, config, range(args.k_min, args.k_max + 1))
    man = manifest("sweep", args, config, [args.svi, args.prices])
    man["k_range"] = [args.k_min, args.k_max]
    out = Outputs(args.out, man)
    out.write_csv(
        "sweep.csv",
        ["k", "t_stat_gross", "t_stat_net", "n"],
        ([r.k, _fmt(r.t_stat_gross), _fmt(r.t_stat_net), r.n] for r in rows),
    )
    out.close()
    return EXIT_OK


def cmd_nullcheck(args) -> int:
    if args.trials < 100:
        raise UsageError(f"--trials must be at least 100, got {args.trials}")
    seed = master_seed(args)
    config = _config(args)
    if args.prices:
        target = ingest.load_price_csv(args.prices)
        inputs = [args.prices]
    else:
        target = SyntheticSpec(args.weeks, seed=hygiene.derive_seed(seed, 2**32), stdev=0.02)
        inputs = []
    study = hygiene.null_study(hygiene.NullStudyConfig(
        args.trials, target, k=args.k, master_seed=seed, strategy=config))
    n_ok = study.t_stats.size
    tail_sd = math.sqrt(hygiene.TAIL_195 * (1 - hygiene.TAIL_195) / n_ok)
    mean_ok = abs(study.mean) <= 3 * study.stdev / math.sqrt(n_ok) if n_ok > 1 else False
    tail_ok = abs(study.frac_above_195 - hygiene.TAIL_195) <= 3 * tail_sd
    man = manifest("nullcheck", args, config, inputs)
    man["trials"] = args.trials
    if not args.prices:
        man["synthetic_returns"] = {"weeks": args.weeks, "stdev": 0.02}
    out = Outputs(args.out, man)
    hygiene.write_null_csv(study, out.dir / "null.csv")
    out.hashes["null.csv"] = _sha256((out.dir / "null.csv").read_text(encoding="utf-8"))
    out.write_json("null_summary.json", {
        "n_trials": args.trials,
        "n_degenerate": study.n_degenerate,
        "mean": _num(study.mean),
        "stdev": _num(study.stdev),
        "frac_above_195": study.frac_above_195,
        "expected_frac_above_195": hygiene.TAIL_195,
        "top": [[i, t] for i, t in study.top],
        "bottom": [[i, t] for i, t in study.bottom],
        "verdict": "PASS" if (mean_ok and tail_ok) else "FAIL",
    })
    out.close()
    return EXIT_OK


def cmd_keywords(args) -> int:
    start = args.start
    fixtures = ingest.load_keyword_fixtures(args.fixtures)
    report = hygiene.availability_gate(fixtures, start)
    counts = report.counts()
    print(f"backtest start {start.isoformat()}")
    for part in ("usable", "anachronistic"):
        items = getattr(report, part)
        by_cat = ", ".join(f"{c}={n}" for c, n in counts[part].items())
        print(f"{part}: {len(items)} ({by_cat})")
    for f in report.anachronistic:
        print(f"  anachronistic: {f.keyword} [{f.category.value}] available {f.availability_date}")
    dups = ingest.duplicate_keywords(fixtures)
    if dups:
        print("duplicates: " + ", ".join(f"{k} x{n}" for k, n in sorted(dups.items())))
    if args.out:
        out = Outputs(args.out, manifest("keywords", args, None, [args.fixtures or "<bundled>"]))
        out.write_json("gate.json", {
            "backtest_start": start.isoformat(),
            "counts": counts,
            "anachronistic": [f.keyword for f in report.anachronistic],
            "duplicates": dups,
        })
        out.close()
    return EXIT_OK


def _iso_date(text: str) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an ISO date: {text!r}") from None


def _strategy_flags(p):
    p.add_argument("--k", type=int, default=10, help="baseline length in weeks (default 10)")
    p.add_argument("--tie-policy", choices=["reference", "deadband"], default="reference")
    p.add_argument("--epsilon", type=float, default=0.0, help="dead band in SVI points")
    p.add_argument("--invert", action="store_true", help="trade the opposite of the contrarian rule")
    p.add_argument("--cost-bps", type=float, default=0.0, help="cost per trade in basis points")
    p.add_argument("--cost-model", choices=["round_trip", "on_change"], default="round_trip")
    p.add_argument("--compound", action="store_true", help="compounded instead of summed cumulative curves")
    p.add_argument("--seed", type=int, default=None, help="master seed (falls back to $TRENDLAB_SEED)")
    p.add_argument("--out", default=".", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="trendlab", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"trendlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("backtest", help="run one SVI series against one asset")
    p.add_argument("svi")
    p.add_argument("prices")
    _strategy_flags(p)
    p.add_argument("--split", type=_iso_date, help="in/out-of-sample boundary date")
    p.add_argument("--keyword", help="keyword the SVI file belongs to (enables the availability gate)")
    p.add_argument("--keywords", help="keyword fixture file (default: bundled)")
    p.add_argument("--allow-anachronistic", action="store_true",
                   help="run a keyword not known before the backtest start; outputs are watermarked")
    p.set_defaults(func=cmd_backtest)

    p = sub.add_parser("sweep", help="t-stat as a function of k")
    p.add_argument("svi")
    p.add_argument("prices")
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=30)
    _strategy_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("nullcheck", help="t-stat distribution for random SVI series")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--prices", help="score against this asset's weekly returns")
    src.add_argument("--synthetic", action="store_true", help="score against iid synthetic returns (default)")
    p.add_argument("--weeks", type=int, default=416, help="synthetic return length (default 416)")
    p.add_argument("--trials", type=int, default=2000)
    _strategy_flags(p)
    p.set_defaults(func=cmd_nullcheck)

    p = sub.add_parser("keywords", help="keyword availability report")
    p.add_argument("fixtures", nargs="?", default=None, help="fixture CSV (default: bundled)")
    p.add_argument("--start", type=_iso_date, default=date(2004, 1, 1))
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_keywords)
    return parser


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": {"kind": kind, "message": message}}) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        return _fail("UsageError", str(exc), EXIT_USAGE)
    except FileNotFoundError as exc:
        return _fail("FileNotFound", f"{exc.filename}: {exc.strerror}", EXIT_DATA)
    except DataError as exc:
        return _fail(exc.kind, str(exc), EXIT_DATA)
    except (EngineError, TrendlabError) as exc:
        return _fail(exc.kind, str(exc), EXIT_ENGINE)
    except OSError as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_DATA)


if __name__ == "__main__":
    raise SystemExit(main())
