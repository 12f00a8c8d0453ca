from datetime import date

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from helpers import svi_series
from trendlab.errors import (
    CalendarViolation,
    DataError,
    DuplicateLabel,
    EmptySeries,
    FormatError,
    InvalidPrice,
    OrderViolation,
    RangeViolation,
)
from trendlab.ingest import (
    GeneratorKind,
    KeywordCategory,
    SyntheticSpec,
    category_counts,
    duplicate_keywords,
    generate,
    gt_normalize,
    load_keyword_fixtures,
    load_price_csv,
    load_svi_csv,
    load_trending_fixture,
    trending_fixture,
    write_price_csv,
    write_svi_csv,
)
from trendlab.series import Unit


def _write(tmp_path, text, name="f.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_svi_round_trip(tmp_path):
    s = svi_series([0, 5, 100, 42])
    p = tmp_path / "svi.csv"
    write_svi_csv(s, p)
    assert load_svi_csv(p) == s


@pytest.mark.parametrize("body,err", [
    ("week_start,value\n2004-01-05,3\n", CalendarViolation),
    ("week_start,value\n2004-01-04,3\n2004-01-04,4\n", DuplicateLabel),
    ("week_start,value\n2004-01-04,101\n", RangeViolation),
    ("week_start,value\n2004-01-04,3\n2004-01-18,4\n", CalendarViolation),
    ("week_start,value\n2004-01-11,3\n2004-01-04,4\n", CalendarViolation),
    ("week_start,value\n2004-01-04,abc\n", FormatError),
    ("week_start,value\n2004-13-04,3\n", FormatError),
    ("wk,value\n2004-01-04,3\n", FormatError),
    ("week_start,value\n", EmptySeries),
])
def test_svi_loader_errors(tmp_path, body, err):
    with pytest.raises(err):
        load_svi_csv(_write(tmp_path, body))


def test_format_error_carries_row(tmp_path):
    with pytest.raises(FormatError) as exc:
        load_svi_csv(_write(tmp_path, "week_start,value\n2004-01-04,3\n2004-01-11,x\n"))
    assert exc.value.row == 3


def test_price_loader(tmp_path):
    p = _write(tmp_path, "date,close\n2004-01-12,100.5\n2004-01-13,101\n")
    prices = load_price_csv(p)
    out = tmp_path / "again.csv"
    write_price_csv(prices, out)
    assert load_price_csv(out) == prices
    with pytest.raises(InvalidPrice):
        load_price_csv(_write(tmp_path, "date,close\n2004-01-12,-1\n", "neg.csv"))
    with pytest.raises(OrderViolation):
        load_price_csv(_write(tmp_path, "date,close\n2004-01-13,1\n2004-01-12,1\n", "ord.csv"))


@settings(max_examples=150, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.text(max_size=200))
def test_loader_fuzz_raises_only_typed_errors(tmp_path, text):
    p = _write(tmp_path, "week_start,value\n" + text, "fuzz.csv")
    try:
        load_svi_csv(p)
    except DataError:
        pass


def test_bundled_keywords():
    kws = load_keyword_fixtures()
    counts = category_counts(kws)
    assert counts == {"illness": 200, "classic_car": 84, "arcade_game": 97, "finance": 8}
    dups = duplicate_keywords(kws)
    assert dups == {"classic_car:Ferrari 250 GTO": 2, "classic_car:Porsche 911": 2, "arcade_game:Gorf": 2}
    fin = [k for k in kws if k.category is KeywordCategory.FINANCE]
    assert all(k.availability_date == date(2011, 6, 30) for k in fin)


def test_keyword_file_edge_cases(tmp_path):
    assert load_keyword_fixtures(_write(tmp_path, "", "empty.csv")) == []
    bad = "keyword,category,source_url,availability_date\nx,cheese,u,2004-01-01\n"
    with pytest.raises(FormatError):
        load_keyword_fixtures(_write(tmp_path, bad, "bad.csv"))


def test_generator_is_deterministic():
    spec = SyntheticSpec(50, GeneratorKind.RANDOM_WALK, seed=7)
    a, b = generate(spec), generate(spec)
    assert a == b
    assert generate(SyntheticSpec(50, seed=8)) != generate(SyntheticSpec(50, seed=7))
    assert a.starts[0] == date(2004, 1, 12)


def test_generator_svi_clipped_and_constant():
    s = generate(SyntheticSpec(30, mean=50, stdev=100, seed=1, unit=Unit.SVI_POINTS))
    assert s.values.min() >= 0 and s.values.max() <= 100
    c = generate(SyntheticSpec(5, GeneratorKind.CONSTANT, mean=0.01))
    assert np.all(c.values == 0.01)
    with pytest.raises(EmptySeries):
        generate(SyntheticSpec(0))


def test_gt_normalize():
    out = gt_normalize([2.0, 4.0, 3.0])
    assert list(out) == [0.0, 100.0, 50.0]
    assert list(gt_normalize([1.0, 1.0])) == [0.0, 0.0]


def test_trending_fixture_matches_bundle():
    svi, prices = trending_fixture()
    lsvi, lprices = load_trending_fixture()
    assert svi == lsvi and prices == lprices
    assert len(svi) == 404 and svi.values[-1] == 100
