"""Manifest parsing, alias mapping, and per-country loading."""

import json

import numpy as np
import pytest

from ardlkit.manifest import ManifestError, load_country, load_manifest
from ardlkit.timeseries import Dataset, TimeSeries, write_csv


def _write_manifest(tmp_path, doc, name="manifest.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def _basic_doc():
    return {
        "countries": {
            "AAA": {"file": "AAA.csv"},
            "BBB": {"file": "data/BBB.csv", "layout": "long"},
        },
        "aliases": {"co2": "co2_pc"},
        "overrides": {"AAA": {"M3": {"drop": ["x4"]}}},
    }


def _toy_dataset(country="AAA", names=("co2_pc", "gdp_pc")):
    rng = np.random.default_rng(3)
    series = {
        n: TimeSeries(n, 1990, np.abs(rng.normal(5.0, 1.0, 25)) + 0.5) for n in names
    }
    return Dataset(country=country, series=series)


class TestLoadManifest:
    def test_happy_path(self, tmp_path):
        m = load_manifest(_write_manifest(tmp_path, _basic_doc()))
        assert set(m.countries) == {"AAA", "BBB"}
        assert m.countries["AAA"].layout == "wide"
        assert m.countries["BBB"].layout == "long"
        assert m.path_for("AAA") == tmp_path / "AAA.csv"
        assert m.path_for("BBB") == tmp_path / "data" / "BBB.csv"
        assert m.aliases == {"co2": "co2_pc"}
        assert m.drops_for("AAA", "M3") == ("x4",)
        assert m.drops_for("AAA", "M1") == ()
        assert m.drops_for("BBB", "M3") == ()

    def test_defaults_optional_sections(self, tmp_path):
        m = load_manifest(_write_manifest(tmp_path, {"countries": {"AAA": {"file": "a.csv"}}}))
        assert m.aliases == {}
        assert m.drops_for("AAA", "M2") == ()

    @pytest.mark.parametrize(
        "mangle, fragment",
        [
            (lambda d: [], "object"),
            (lambda d: {"aliases": {}}, "countries"),
            (lambda d: {"countries": {}}, "non-empty"),
            (lambda d: {"countries": {"AAA": {}}}, "file"),
            (lambda d: {"countries": {"AAA": {"file": "a.csv", "layout": "tall"}}}, "layout"),
            (
                lambda d: {"countries": {"AAA": {"file": "a.csv"}}, "aliases": {"x": 3}},
                "alias",
            ),
            (
                lambda d: {
                    "countries": {"AAA": {"file": "a.csv"}},
                    "aliases": {"a": "co2_pc", "b": "co2_pc"},
                },
                "two aliases map to",
            ),
            (
                lambda d: {
                    "countries": {"AAA": {"file": "a.csv"}},
                    "overrides": {"AAA": {"M1": {"rename": []}}},
                },
                "unknown keys",
            ),
            (
                lambda d: {
                    "countries": {"AAA": {"file": "a.csv"}},
                    "overrides": {"AAA": {"M1": {"drop": "x4"}}},
                },
                "list",
            ),
        ],
    )
    def test_rejects_malformed(self, tmp_path, mangle, fragment):
        with pytest.raises(ManifestError, match=fragment):
            load_manifest(_write_manifest(tmp_path, mangle(_basic_doc())))


class TestLoadCountry:
    def test_wide_with_aliases(self, tmp_path):
        data = _toy_dataset(names=("co2", "gdp_pc"))
        write_csv(data, tmp_path / "AAA.csv", layout="wide")
        doc = {
            "countries": {"AAA": {"file": "AAA.csv"}},
            "aliases": {"co2": "co2_pc"},
        }
        m = load_manifest(_write_manifest(tmp_path, doc))
        loaded, report = load_country(m, "AAA")
        assert set(loaded.series) == {"co2_pc", "gdp_pc"}
        assert report.n_missing == 0
        np.testing.assert_array_equal(
            loaded.series["co2_pc"].values, data.series["co2"].values
        )

    def test_alias_collision_with_existing_column(self, tmp_path):
        data = _toy_dataset(names=("co2", "co2_pc"))
        write_csv(data, tmp_path / "AAA.csv", layout="wide")
        doc = {
            "countries": {"AAA": {"file": "AAA.csv"}},
            "aliases": {"co2": "co2_pc"},
        }
        m = load_manifest(_write_manifest(tmp_path, doc))
        with pytest.raises(ManifestError, match="co2_pc"):
            load_country(m, "AAA")

    def test_long_layout_selects_country(self, tmp_path):
        a = _toy_dataset("AAA")
        b = _toy_dataset("BBB")
        write_csv([a, b], tmp_path / "panel.csv", layout="long")
        doc = {"countries": {"BBB": {"file": "panel.csv", "layout": "long"}}}
        m = load_manifest(_write_manifest(tmp_path, doc))
        loaded, _ = load_country(m, "BBB")
        assert loaded.country == "BBB"
        assert set(loaded.series) == {"co2_pc", "gdp_pc"}

    def test_long_layout_missing_country(self, tmp_path):
        write_csv([_toy_dataset("AAA")], tmp_path / "panel.csv", layout="long")
        doc = {"countries": {"ZZZ": {"file": "panel.csv", "layout": "long"}}}
        m = load_manifest(_write_manifest(tmp_path, doc))
        with pytest.raises(ManifestError, match="ZZZ"):
            load_country(m, "ZZZ")

    def test_unknown_code(self, tmp_path):
        m = load_manifest(_write_manifest(tmp_path, _basic_doc()))
        with pytest.raises(ManifestError, match="not in manifest"):
            load_country(m, "QQQ")
