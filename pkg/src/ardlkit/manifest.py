"""Dataset manifest: which file holds each country and how columns map.

The manifest is a JSON object:

    {
      "countries": {"ARG": {"file": "ARG.csv", "layout": "wide"}, ...},
      "aliases":   {"provider_name": "canonical_name", ...},
      "overrides": {"CUBA": {"M3": {"drop": ["x4"]}, ...}, ...}
    }

File paths resolve relative to the manifest's directory. Aliases rename
series on load so model presets can rely on canonical variable names.
Overrides drop control variables for specific (country, model) cells, for
countries whose source data lack a series entirely.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .timeseries import Dataset, LoadReport, TimeSeries, load_csv

__all__ = ["CountryEntry", "Manifest", "ManifestError", "load_country", "load_manifest"]


class ManifestError(ValueError):
    """Malformed manifest content."""


@dataclass(frozen=True)
class CountryEntry:
    file: str
    layout: str = "wide"


@dataclass(frozen=True)
class Manifest:
    root: Path
    countries: dict[str, CountryEntry]
    aliases: dict[str, str] = field(default_factory=dict)
    overrides: dict[str, dict[str, tuple[str, ...]]] = field(default_factory=dict)

    def path_for(self, code: str) -> Path:
        return self.root / self.countries[code].file

    def drops_for(self, code: str, model: str) -> tuple[str, ...]:
        return self.overrides.get(code, {}).get(model, ())


def _expect(cond: bool, msg: str):
    if not cond:
        raise ManifestError(msg)


def load_manifest(path) -> Manifest:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: invalid JSON ({exc})") from None
    _expect(isinstance(raw, dict), f"{path}: manifest must be a JSON object")
    _expect("countries" in raw, f"{path}: manifest lacks 'countries'")
    _expect(
        isinstance(raw["countries"], dict) and raw["countries"],
        f"{path}: 'countries' must be a non-empty object",
    )

    countries: dict[str, CountryEntry] = {}
    for code, entry in raw["countries"].items():
        _expect(isinstance(entry, dict), f"{path}: country {code!r} entry must be an object")
        _expect("file" in entry, f"{path}: country {code!r} lacks 'file'")
        layout = entry.get("layout", "wide")
        _expect(layout in ("wide", "long"), f"{path}: country {code!r} has unknown layout {layout!r}")
        countries[code] = CountryEntry(file=str(entry["file"]), layout=layout)

    aliases = raw.get("aliases", {})
    _expect(isinstance(aliases, dict), f"{path}: 'aliases' must be an object")
    _expect(
        all(isinstance(k, str) and isinstance(v, str) for k, v in aliases.items()),
        f"{path}: alias entries must map name to name",
    )
    if len(set(aliases.values())) != len(aliases):
        targets = sorted(aliases.values())
        dup = next(t for i, t in enumerate(targets[1:]) if t == targets[i])
        raise ManifestError(f"{path}: two aliases map to {dup!r}")

    overrides_raw = raw.get("overrides", {})
    _expect(isinstance(overrides_raw, dict), f"{path}: 'overrides' must be an object")
    overrides: dict[str, dict[str, tuple[str, ...]]] = {}
    for code, per_model in overrides_raw.items():
        _expect(isinstance(per_model, dict), f"{path}: overrides for {code!r} must be an object")
        out: dict[str, tuple[str, ...]] = {}
        for model, rules in per_model.items():
            _expect(isinstance(rules, dict), f"{path}: override {code}/{model} must be an object")
            unknown = set(rules) - {"drop"}
            _expect(not unknown, f"{path}: override {code}/{model} has unknown keys {sorted(unknown)}")
            drop = rules.get("drop", [])
            _expect(
                isinstance(drop, list) and all(isinstance(v, str) for v in drop),
                f"{path}: override {code}/{model} 'drop' must be a list of names",
            )
            out[model] = tuple(drop)
        overrides[code] = out

    return Manifest(
        root=path.parent.resolve(),
        countries=countries,
        aliases=aliases,
        overrides=overrides,
    )


def _apply_aliases(d: Dataset, aliases: dict[str, str]) -> Dataset:
    if not aliases:
        return d
    renamed: dict[str, TimeSeries] = {}
    for name, s in d.series.items():
        new = aliases.get(name, name)
        if new in renamed:
            raise ManifestError(
                f"alias collision in dataset {d.country!r}: two series map to {new!r}"
            )
        renamed[new] = TimeSeries(new, s.start_year, s.values) if new != name else s
    return Dataset(d.country, renamed)


def load_country(manifest: Manifest, code: str) -> tuple[Dataset, LoadReport]:
    """Load one country's data per the manifest, aliases applied."""
    if code not in manifest.countries:
        raise ManifestError(f"country {code!r} not in manifest")
    entry = manifest.countries[code]
    res = load_csv(manifest.path_for(code), layout=entry.layout, country=code)
    if entry.layout == "long":
        if code not in res.datasets:
            raise ManifestError(f"{entry.file}: no rows for country {code!r}")
        d = res.datasets[code]
    else:
        d = res.single()
    return _apply_aliases(d, manifest.aliases), res.report
