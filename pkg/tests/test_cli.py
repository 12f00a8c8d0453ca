import csv
import json
import subprocess
import sys

import pytest

from helpers import gt_like_svi, prices_for
from trendlab.cli import main
from trendlab.ingest import write_price_csv, write_svi_csv
from trendlab.strategy import StrategyConfig, run_backtest


@pytest.fixture
def files(tmp_path):
    svi = gt_like_svi(200, seed=21)
    prices = prices_for(svi, 21, holiday_rate=0.02)
    write_svi_csv(svi, tmp_path / "svi.csv")
    write_price_csv(prices, tmp_path / "px.csv")
    return tmp_path, svi, prices


def _run(*args):
    return main([str(a) for a in args])


def _read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(line for line in fh if not line.startswith("#")))


def test_backtest_outputs(files):
    d, svi, prices = files
    assert _run("backtest", d / "svi.csv", d / "px.csv", "--k", 10, "--cost-bps", 2, "--out", d / "o") == 0
    res = run_backtest(svi, prices, StrategyConfig(k=10, cost_bps=2))
    rows = _read_rows(d / "o" / "result.csv")
    assert len(rows) == res.n
    assert [float(r["net"]) for r in rows] == res.net.tolist()
    summary = json.loads((d / "o" / "summary.json").read_text())
    assert summary["t_stat_gross"] == res.t_stat_gross
    assert summary["manifest"]["config"]["k"] == 10
    assert "result.csv" in json.loads((d / "o" / "manifest.json").read_text())["payload_sha256"]


def test_invert_negates_t(files):
    d, *_ = files
    _run("backtest", d / "svi.csv", d / "px.csv", "--out", d / "a")
    _run("backtest", d / "svi.csv", d / "px.csv", "--invert", "--out", d / "b")
    ta = json.loads((d / "a" / "summary.json").read_text())["t_stat_gross"]
    tb = json.loads((d / "b" / "summary.json").read_text())["t_stat_gross"]
    assert tb == -ta


def test_missing_file(files, capsys):
    d, *_ = files
    assert _run("backtest", d / "nope.csv", d / "px.csv", "--out", d / "o") == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["kind"] == "FileNotFound"


def test_bad_data_and_engine_errors(files, capsys):
    d, *_ = files
    (d / "bad.csv").write_text("week_start,value\n2004-01-05,3\n")
    assert _run("backtest", d / "bad.csv", d / "px.csv", "--out", d / "o") == 2
    assert json.loads(capsys.readouterr().err)["error"]["kind"] == "CalendarViolation"
    assert _run("backtest", d / "svi.csv", d / "px.csv", "--k", 500, "--out", d / "o") == 3
    assert json.loads(capsys.readouterr().err)["error"]["kind"] == "InsufficientHistory"


def test_sweep(files):
    d, svi, prices = files
    assert _run("sweep", d / "svi.csv", d / "px.csv", "--out", d / "s") == 0
    rows = _read_rows(d / "s" / "sweep.csv")
    assert [int(r["k"]) for r in rows] == list(range(2, 31))
    _run("backtest", d / "svi.csv", d / "px.csv", "--k", 12, "--out", d / "b12")
    t12 = json.loads((d / "b12" / "summary.json").read_text())["t_stat_gross"]
    assert float(rows[10]["t_stat_gross"]) == t12
    assert _run("sweep", d / "svi.csv", d / "px.csv", "--k-min", 9, "--k-max", 3) == 1


def test_nullcheck_deterministic(tmp_path, monkeypatch):
    assert _run("nullcheck", "--trials", 10, "--out", tmp_path / "x") == 1
    monkeypatch.setenv("TRENDLAB_SEED", "17")
    for name in ("a", "b"):
        assert _run("nullcheck", "--trials", 200, "--weeks", 200, "--out", tmp_path / name) == 0
    a = (tmp_path / "a" / "null.csv").read_bytes()
    assert a == (tmp_path / "b" / "null.csv").read_bytes()
    summary = json.loads((tmp_path / "a" / "null_summary.json").read_text())
    assert summary["manifest"]["master_seed"] == 17
    assert summary["verdict"] in ("PASS", "FAIL")


def test_payload_hashes_ignore_timestamp(files, monkeypatch):
    d, *_ = files
    hashes = []
    for i, epoch in enumerate(("1000000000", "1700000000")):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", epoch)
        _run("backtest", d / "svi.csv", d / "px.csv", "--out", d / f"r{i}")
        hashes.append(json.loads((d / f"r{i}" / "manifest.json").read_text())["payload_sha256"])
    assert hashes[0] == hashes[1]
    assert (d / "r0" / "result.csv").read_bytes() == (d / "r1" / "result.csv").read_bytes()


def test_keywords(tmp_path, capsys):
    assert _run("keywords", "--out", tmp_path / "g") == 0
    text = capsys.readouterr().out
    assert "usable: 381" in text and "anachronistic: 8" in text
    gate = json.loads((tmp_path / "g" / "gate.json").read_text())
    assert gate["counts"]["anachronistic"]["finance"] == 8
    (tmp_path / "empty.csv").write_text("")
    assert _run("keywords", tmp_path / "empty.csv") == 0
    assert "usable: 0" in capsys.readouterr().out


def test_anachronistic_keyword(files):
    d, *_ = files
    assert _run("backtest", d / "svi.csv", d / "px.csv", "--keyword", "debt", "--out", d / "k") == 3
    assert _run("backtest", d / "svi.csv", d / "px.csv", "--keyword", "debt",
                "--allow-anachronistic", "--out", d / "k") == 0
    assert (d / "k" / "result.csv").read_text().startswith("# BIASED")
    assert _run("backtest", d / "svi.csv", d / "px.csv", "--keyword", "Gorf", "--out", d / "g") == 0


def test_split(files):
    d, svi, prices = files
    assert _run("backtest", d / "svi.csv", d / "px.csv", "--split", "2006-06-14", "--out", d / "sp") == 0
    ins = _read_rows(d / "sp" / "in_sample_result.csv")
    outs = _read_rows(d / "sp" / "out_sample_result.csv")
    whole = run_backtest(svi, prices, StrategyConfig())
    assert [float(r["gross"]) for r in ins + outs] == whole.gross.tolist()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "trendlab", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "trendlab" in proc.stdout
