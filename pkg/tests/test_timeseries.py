import math

import numpy as np
import pytest

from ardlkit.timeseries import (
    AlignmentError,
    Dataset,
    LoadError,
    TimeSeries,
    align,
    difference,
    lag,
    load_csv,
    transform,
    write_csv,
)
from oracles import longest_observed_window


def _ts(name, start, vals):
    return TimeSeries(name, start, np.asarray(vals, dtype=float))


def test_series_basics():
    s = _ts("gdp", 1970, [1.0, 2.0, np.nan, 4.0])
    assert len(s) == 4
    assert s.end_year == 1973
    assert list(s.years) == [1970, 1971, 1972, 1973]
    assert list(s.observed) == [True, True, False, True]


def test_series_values_are_frozen():
    s = _ts("x", 2000, [1.0, 2.0])
    with pytest.raises(ValueError):
        s.values[0] = 9.0


def test_series_equality_treats_nan_as_equal():
    a = _ts("x", 2000, [1.0, np.nan])
    b = _ts("x", 2000, [1.0, np.nan])
    c = _ts("x", 2000, [1.0, 2.0])
    assert a == b
    assert a != c
    assert a != _ts("y", 2000, [1.0, np.nan])


def test_series_rejects_empty_and_2d():
    with pytest.raises(ValueError):
        TimeSeries("x", 2000, np.array([]))
    with pytest.raises(ValueError):
        TimeSeries("x", 2000, np.zeros((2, 2)))


def test_transform_ln_family():
    s = _ts("gdp_pc", 1970, [math.e, math.e**2, np.nan])
    ln = transform(s, "ln")
    assert ln.name == "gdp_pc_ln"
    assert ln.start_year == 1970
    np.testing.assert_allclose(ln.values[:2], [1.0, 2.0], rtol=1e-12)
    assert math.isnan(ln.values[2])

    sq = transform(s, "ln_squared")
    assert sq.name == "gdp_pc_ln2"
    np.testing.assert_allclose(sq.values[:2], [1.0, 4.0], rtol=1e-12)

    cu = transform(s, "ln_cubed")
    assert cu.name == "gdp_pc_ln3"
    np.testing.assert_allclose(cu.values[:2], [1.0, 8.0], rtol=1e-12)


def test_transform_identity_is_noop():
    s = _ts("pop", 1970, [1.0, 2.0])
    assert transform(s, "identity") is s


def test_transform_rejects_nonpositive_with_year_and_name():
    s = _ts("emis", 1970, [1.0, 0.0, 2.0])
    with pytest.raises(ValueError, match=r"'emis' at year 1971"):
        transform(s, "ln")
    s2 = _ts("emis", 1970, [1.0, np.nan, -3.0])
    with pytest.raises(ValueError, match="1972"):
        transform(s2, "ln_squared")


def test_transform_unknown_kind():
    with pytest.raises(ValueError, match="unknown transform"):
        transform(_ts("x", 2000, [1.0]), "log10")


def test_difference_matches_numpy_and_shifts_start():
    rng = np.random.default_rng(7)
    v = rng.normal(size=30)
    s = _ts("x", 1960, v)
    d1 = difference(s)
    assert d1.start_year == 1961
    np.testing.assert_array_equal(d1.values, np.diff(v))
    d2 = difference(s, order=2)
    assert d2.start_year == 1962
    np.testing.assert_array_equal(d2.values, np.diff(v, n=2))
    # differencing twice equals order=2
    assert difference(d1) == TimeSeries("x", 1962, np.diff(v, n=2))


def test_difference_propagates_missing():
    s = _ts("x", 2000, [1.0, np.nan, 3.0, 4.0])
    d = difference(s)
    assert math.isnan(d.values[0]) and math.isnan(d.values[1])
    assert d.values[2] == 1.0


def test_difference_rejects_short_series():
    with pytest.raises(ValueError, match="too short"):
        difference(_ts("x", 2000, [1.0, 2.0]), order=2)
    with pytest.raises(ValueError):
        difference(_ts("x", 2000, [1.0]), order=0)


def test_lag_shifts_years_and_composes():
    v = np.arange(10.0)
    s = _ts("x", 1990, v)
    l2 = lag(s, 2)
    assert l2.start_year == 1992
    assert len(l2) == 8
    # value at year t is s at t-2
    assert l2.values[0] == v[0]
    assert lag(lag(s, 2), 3) == lag(s, 5)
    assert lag(s, 0) is s


def test_lag_bounds():
    s = _ts("x", 1990, np.arange(3.0))
    with pytest.raises(ValueError):
        lag(s, -1)
    with pytest.raises(ValueError):
        lag(s, 3)


def test_align_simple_overlap():
    d = Dataset.from_series(
        "AAA",
        [
            _ts("a", 1960, np.ones(50)),            # 1960..2009
            _ts("b", 1970, np.ones(48)),            # 1970..2017
        ],
    )
    f = align(d, ["a", "b"], min_window=20)
    assert f.year_range == (1970, 2009)
    assert f.columns == ("a", "b")
    assert f.n_rows == 40
    assert f.notes == ()


def test_align_interior_gap_splits_and_notes():
    v = np.ones(40)
    v[25] = np.nan                      # 1985 missing
    d = Dataset.from_series("AAA", [_ts("a", 1960, v), _ts("b", 1960, np.ones(40))])
    f = align(d, ["a", "b"], min_window=10)
    # sides are 1960..1984 (25y) and 1986..1999 (14y); longer side wins
    assert f.year_range == (1960, 1984)
    assert any("interior gap" in n and n.startswith("a:") for n in f.notes)


def test_align_tie_prefers_earliest_window():
    v = np.ones(21)
    v[10] = np.nan                      # two 10-year sides
    d = Dataset.from_series("AAA", [_ts("a", 1960, v)])
    f = align(d, ["a"], min_window=5)
    assert f.year_range == (1960, 1969)


def test_align_too_short_names_binding_series():
    d = Dataset.from_series(
        "AAA",
        [_ts("a", 1960, np.ones(50)), _ts("b", 2000, np.ones(5))],
    )
    with pytest.raises(AlignmentError, match=r"b: 5 observed years"):
        align(d, ["a", "b"], min_window=20)


def test_align_unknown_series():
    d = Dataset.from_series("AAA", [_ts("a", 1960, np.ones(30))])
    with pytest.raises(KeyError, match="lacks series: zz"):
        align(d, ["a", "zz"])


def test_align_matches_bruteforce_window_finder():
    rng = np.random.default_rng(1234)
    for _ in range(60):
        n = int(rng.integers(25, 60))
        k = int(rng.integers(1, 4))
        masks = rng.random((k, n)) > 0.15
        series = []
        for i in range(k):
            vals = rng.normal(size=n)
            vals[~masks[i]] = np.nan
            series.append(_ts(f"s{i}", 1950, vals))
        d = Dataset.from_series("AAA", series)
        expect = longest_observed_window({f"s{i}": masks[i] for i in range(k)})
        if expect is None or expect[1] < 5:
            with pytest.raises(AlignmentError):
                align(d, [s.name for s in series], min_window=5)
        else:
            start, length = expect
            f = align(d, [s.name for s in series], min_window=5)
            assert f.first_year == 1950 + start
            assert f.n_rows == length
            assert not np.isnan(f.data).any()


def test_align_column_content_matches_source():
    a = _ts("a", 1970, np.arange(30.0))
    b = _ts("b", 1975, np.arange(100.0, 125.0))
    d = Dataset.from_series("AAA", [a, b])
    f = align(d, ["b", "a"], min_window=10)
    assert f.year_range == (1975, 1999)
    np.testing.assert_array_equal(f.col("a"), np.arange(5.0, 30.0))
    np.testing.assert_array_equal(f.col("b"), np.arange(100.0, 125.0))
    with pytest.raises(KeyError):
        f.col("zz")


def test_dataset_add_and_duplicate():
    d = Dataset.from_series("AAA", [_ts("a", 1960, np.ones(3))])
    d2 = d.with_series(_ts("b", 1960, np.ones(3)))
    assert set(d2.names) == {"a", "b"}
    assert d.names == ("a",)            # original untouched
    with pytest.raises(ValueError, match="already present"):
        d2.with_series(_ts("a", 1970, np.ones(3)))
    with pytest.raises(ValueError, match="duplicate series"):
        Dataset.from_series("AAA", [_ts("a", 1960, np.ones(3))] * 2)


# ---- CSV round trips ----------------------------------------------------


def test_wide_roundtrip_with_gaps(tmp_path):
    v = np.array([1.5, np.nan, 3.25, 4.0])
    d = Dataset.from_series(
        "BRA", [_ts("gdp", 1970, v), _ts("pop", 1971, np.array([7.0, 8.0]))]
    )
    p = tmp_path / "BRA.csv"
    write_csv(d, p, layout="wide")
    res = load_csv(p, layout="wide")
    assert res.report.n_missing == 3      # one interior NaN + two out-of-span pads
    assert res.report.n_unparseable == 0
    back = res.single()
    assert back.country == "BRA"
    assert back["gdp"] == d["gdp"]
    assert back["pop"] == d["pop"]


def test_wide_country_from_stem_or_override(tmp_path):
    p = tmp_path / "CHL.csv"
    body = "".join(f"{2000 + i},{float(i)}\n" for i in range(20))
    p.write_text("year,x\n" + body)
    assert load_csv(p).single().country == "CHL"
    assert load_csv(p, country="CHI").single().country == "CHI"


def test_wide_gap_years_fill_missing(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("year,x\n2000,1.0\n2003,4.0\n")
    s = load_csv(p).single()["x"]
    assert s.start_year == 2000 and len(s) == 4
    assert math.isnan(s.values[1]) and math.isnan(s.values[2])


def test_wide_trims_unobserved_edges(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("year,x,y\n2000,,1.0\n2001,2.0,\n2002,NA,3.0\n")
    res = load_csv(p)
    x, y = res.single()["x"], res.single()["y"]
    assert (x.start_year, x.end_year) == (2001, 2001)
    assert (y.start_year, y.end_year) == (2000, 2002)
    assert math.isnan(y.values[1])


def test_all_missing_column_is_dropped(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("year,x,y\n2000,NA,1.0\n2001,,2.0\n")
    assert load_csv(p).single().names == ("y",)


def test_unparseable_cells_count_and_load_missing(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("year,x\n2000,12.5\n2001,n/a\n2002,1.0e1\n")
    res = load_csv(p)
    assert res.report.n_unparseable == 1
    assert res.report.n_missing == 1
    s = res.single()["x"]
    np.testing.assert_array_equal(s.observed, [True, False, True])
    assert s.values[2] == 10.0


def test_duplicate_year_is_hard_error(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("year,x\n2000,1\n2000,2\n")
    with pytest.raises(LoadError, match="duplicate year 2000"):
        load_csv(p)


def test_empty_file_is_hard_error(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("year,x\n")
    with pytest.raises(LoadError, match="no data rows"):
        load_csv(p)
    p2 = tmp_path / "b.csv"
    p2.write_text("")
    with pytest.raises(LoadError):
        load_csv(p2)


def test_wide_requires_year_header(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("anno,x\n2000,1\n")
    with pytest.raises(LoadError, match="'year' column"):
        load_csv(p)


def test_long_roundtrip_multicountry(tmp_path):
    d1 = Dataset.from_series("ARG", [_ts("gdp", 1970, np.array([1.0, np.nan, 3.0]))])
    d2 = Dataset.from_series("BOL", [_ts("gdp", 1980, np.array([5.5, 6.5]))])
    p = tmp_path / "panel.csv"
    write_csv([d1, d2], p, layout="long")
    res = load_csv(p, layout="long")
    assert set(res.datasets) == {"ARG", "BOL"}
    assert res.datasets["ARG"]["gdp"] == d1["gdp"]
    assert res.datasets["BOL"]["gdp"] == d2["gdp"]
    with pytest.raises(ValueError, match="exactly one"):
        res.single()


def test_long_duplicate_triple_is_hard_error(tmp_path):
    p = tmp_path / "panel.csv"
    p.write_text(
        "country,year,variable,value\nARG,2000,gdp,1.0\nARG,2000,gdp,2.0\n"
    )
    with pytest.raises(LoadError, match="duplicate observation"):
        load_csv(p, layout="long")


def test_long_header_check(tmp_path):
    p = tmp_path / "panel.csv"
    p.write_text("iso,year,var,val\nARG,2000,gdp,1.0\n")
    with pytest.raises(LoadError, match="long layout needs header"):
        load_csv(p, layout="long")


def test_unknown_layout():
    with pytest.raises(ValueError, match="unknown layout"):
        load_csv("whatever.csv", layout="tall")


def test_roundtrip_random_values_exact(tmp_path):
    rng = np.random.default_rng(99)
    vals = rng.normal(scale=1e4, size=40)
    vals[rng.random(40) < 0.2] = np.nan
    if np.isnan(vals[0]):
        vals[0] = 1.0
    if np.isnan(vals[-1]):
        vals[-1] = 2.0
    d = Dataset.from_series("PER", [_ts("x9", 1960, vals)])
    p = tmp_path / "PER.csv"
    write_csv(d, p)
    back = load_csv(p).single()["x9"]
    assert back == d["x9"]             # bit-exact via repr round trip
