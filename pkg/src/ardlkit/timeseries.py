"""Annual time-series containers, transforms, and sample alignment.

Series are year-indexed float arrays with NaN marking missing observations.
All containers are immutable after construction; operations return new
objects. Alignment finds the maximal contiguous window over which every
requested series is observed — interior gaps split the sample and the longer
side wins, never interpolation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "AlignedFrame",
    "AlignmentError",
    "Dataset",
    "LoadError",
    "LoadReport",
    "LoadResult",
    "TimeSeries",
    "align",
    "difference",
    "lag",
    "load_csv",
    "transform",
    "write_csv",
]

_MISSING_TOKENS = {"", "NA"}

_LOG_SUFFIX = {"ln": "_ln", "ln_squared": "_ln2", "ln_cubed": "_ln3"}


class LoadError(ValueError):
    """Structural problem in an input file (duplicates, empty, bad header)."""


class AlignmentError(ValueError):
    """No usable common window across the requested series."""


@dataclass(frozen=True)
class TimeSeries:
    """A named annual series starting at `start_year`; NaN means missing."""

    name: str
    start_year: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size < 1:
            raise ValueError(f"series {self.name!r} needs a 1-d array of length >= 1")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size

    @property
    def end_year(self) -> int:
        return self.start_year + len(self) - 1

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.start_year, self.end_year + 1)

    @property
    def observed(self) -> np.ndarray:
        return ~np.isnan(self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.name == other.name
            and self.start_year == other.start_year
            and len(self) == len(other)
            and bool(np.all((self.values == other.values) | (np.isnan(self.values) & np.isnan(other.values))))
        )

    __hash__ = None


@dataclass(frozen=True)
class Dataset:
    """A country's series, keyed by name."""

    country: str
    series: dict[str, TimeSeries] = field(default_factory=dict)

    @classmethod
    def from_series(cls, country: str, items) -> "Dataset":
        out: dict[str, TimeSeries] = {}
        for ts in items:
            if ts.name in out:
                raise ValueError(f"duplicate series name {ts.name!r} in dataset {country!r}")
            out[ts.name] = ts
        return cls(country, out)

    def __contains__(self, name: str) -> bool:
        return name in self.series

    def __getitem__(self, name: str) -> TimeSeries:
        return self.series[name]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.series)

    def with_series(self, ts: TimeSeries, replace: bool = False) -> "Dataset":
        """New Dataset with `ts` added (or replaced when allowed)."""
        if ts.name in self.series and not replace:
            raise ValueError(f"series {ts.name!r} already present in dataset {self.country!r}")
        merged = dict(self.series)
        merged[ts.name] = ts
        return Dataset(self.country, merged)


@dataclass(frozen=True)
class AlignedFrame:
    """Dense, gap-free matrix of the requested columns over a year window."""

    first_year: int
    last_year: int
    columns: tuple[str, ...]
    data: np.ndarray
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        d = np.asarray(self.data, dtype=np.float64)
        if d.shape != (self.last_year - self.first_year + 1, len(self.columns)):
            raise ValueError("frame shape does not match year range and columns")
        if np.isnan(d).any():
            raise ValueError("aligned frame must not contain missing values")
        d = d.copy()
        d.setflags(write=False)
        object.__setattr__(self, "data", d)

    @property
    def year_range(self) -> tuple[int, int]:
        return (self.first_year, self.last_year)

    @property
    def n_rows(self) -> int:
        return self.data.shape[0]

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.first_year, self.last_year + 1)

    def col(self, name: str) -> np.ndarray:
        try:
            j = self.columns.index(name)
        except ValueError:
            raise KeyError(f"no column {name!r} in frame") from None
        return self.data[:, j]


# ---- element-wise operations --------------------------------------------


def transform(s: TimeSeries, kind: str) -> TimeSeries:
    """Log-family or identity transform.

    kind is one of ``ln``, ``ln_squared``, ``ln_cubed``, ``identity``. The
    ln family requires strictly positive observed values and suffixes the
    name with ``_ln`` / ``_ln2`` / ``_ln3``; missing stays missing.
    """
    if kind == "identity":
        return s
    if kind not in _LOG_SUFFIX:
        raise ValueError(f"unknown transform kind {kind!r}")
    bad = s.observed & (s.values <= 0.0)
    if bad.any():
        year = int(s.years[bad][0])
        raise ValueError(
            f"non-positive value in series {s.name!r} at year {year}; "
            "log transform undefined"
        )
    with np.errstate(invalid="ignore"):
        logs = np.log(s.values)
    power = {"ln": 1, "ln_squared": 2, "ln_cubed": 3}[kind]
    return TimeSeries(s.name + _LOG_SUFFIX[kind], s.start_year, logs**power)


def difference(s: TimeSeries, order: int = 1) -> TimeSeries:
    """Repeated first differences; output shortens by `order` at the front."""
    if order < 1:
        raise ValueError("order must be >= 1")
    if len(s) <= order:
        raise ValueError(
            f"series {s.name!r} has length {len(s)}, too short to difference {order} time(s)"
        )
    return TimeSeries(s.name, s.start_year + order, np.diff(s.values, n=order))


def lag(s: TimeSeries, k: int) -> TimeSeries:
    """Shift by k years: value at year t equals s at year t-k.

    The output stays within the original year span, so it holds len(s) - k
    values starting at start_year + k. lag(lag(s, a), b) == lag(s, a + b).
    """
    if k < 0:
        raise ValueError("lag must be >= 0")
    if k >= len(s):
        raise ValueError(f"lag {k} >= series length {len(s)}")
    if k == 0:
        return s
    return TimeSeries(s.name, s.start_year + k, s.values[: len(s) - k])


# ---- alignment ----------------------------------------------------------


def _observed_on_grid(s: TimeSeries, first: int, last: int) -> np.ndarray:
    mask = np.zeros(last - first + 1, dtype=bool)
    lo = s.start_year - first
    mask[lo : lo + len(s)] = s.observed
    return mask


def align(d: Dataset, names, min_window: int = 20) -> AlignedFrame:
    """Maximal contiguous window over which every named series is observed.

    Interior gaps split the sample; the longest side wins (earliest window on
    ties) and a note records the split. Raises AlignmentError, listing the
    binding series, when no window of at least `min_window` years exists.
    """
    names = list(names)
    if not names:
        raise ValueError("align needs at least one series name")
    missing = [n for n in names if n not in d]
    if missing:
        raise KeyError(f"dataset {d.country!r} lacks series: {', '.join(missing)}")

    series = [d[n] for n in names]
    first = min(s.start_year for s in series)
    last = max(s.end_year for s in series)
    masks = {s.name: _observed_on_grid(s, first, last) for s in series}
    joint = np.ones(last - first + 1, dtype=bool)
    for m in masks.values():
        joint &= m

    # longest run of True in joint; first one wins ties
    best_start, best_len = 0, 0
    i = 0
    n = joint.size
    while i < n:
        if joint[i]:
            j = i
            while j < n and joint[j]:
                j += 1
            if j - i > best_len:
                best_start, best_len = i, j - i
            i = j
        else:
            i += 1

    if best_len < min_window:
        spans = sorted(
            (int(m.sum()), name) for name, m in masks.items()
        )
        detail = "; ".join(
            f"{name}: {count} observed years" for count, name in spans[:5]
        )
        raise AlignmentError(
            f"no common window of >= {min_window} years for dataset "
            f"{d.country!r} (longest is {best_len}); most binding: {detail}"
        )

    notes = []
    for s in series:
        obs = s.observed
        if obs.any():
            span = obs[np.argmax(obs) : len(obs) - np.argmax(obs[::-1])]
            if not span.all():
                notes.append(
                    f"{s.name}: interior gap splits the sample; "
                    "using the longest contiguous side"
                )

    w0 = first + best_start
    w1 = w0 + best_len - 1
    cols = np.empty((best_len, len(series)))
    for j, s in enumerate(series):
        offset = w0 - s.start_year
        cols[:, j] = s.values[offset : offset + best_len]
    return AlignedFrame(w0, w1, tuple(names), cols, tuple(notes))


# ---- CSV input/output ---------------------------------------------------


@dataclass(frozen=True)
class LoadReport:
    """Counts of cells that loaded as missing."""

    n_missing: int = 0
    n_unparseable: int = 0
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class LoadResult:
    """Datasets keyed by country plus the load report."""

    datasets: dict[str, Dataset]
    report: LoadReport

    def single(self) -> Dataset:
        """The only dataset in the result (wide-layout convenience)."""
        if len(self.datasets) != 1:
            raise ValueError(f"expected exactly one country, found {len(self.datasets)}")
        return next(iter(self.datasets.values()))


def _parse_cell(token: str):
    """(value, was_missing, was_unparseable)."""
    token = token.strip()
    if token in _MISSING_TOKENS:
        return math.nan, True, False
    try:
        return float(token), False, False
    except ValueError:
        return math.nan, True, True


def _series_from_year_map(name: str, cells: dict[int, float]) -> TimeSeries | None:
    """Build a series spanning the observed years, NaN-filling interior gaps.

    Leading and trailing missing years are trimmed so the span is canonical;
    a variable with no observed value at all yields None.
    """
    observed_years = sorted(yr for yr, v in cells.items() if not math.isnan(v))
    if not observed_years:
        return None
    first, last = observed_years[0], observed_years[-1]
    vals = np.full(last - first + 1, np.nan)
    for yr, v in cells.items():
        if first <= yr <= last:
            vals[yr - first] = v
    return TimeSeries(name, first, vals)


def load_csv(path, layout: str = "wide", country: str | None = None) -> LoadResult:
    """Load annual data from CSV.

    wide layout: header ``year,var1,var2,...``; one country per file (name
    from `country` or the file stem). long layout: header
    ``country,year,variable,value``. Blank and ``NA`` cells load as missing;
    unparseable numeric cells also load as missing and are counted
    separately. Duplicate (country, year, variable) observations and empty
    files are hard errors.
    """
    if layout not in ("wide", "long"):
        raise ValueError(f"unknown layout {layout!r}")
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if len(rows) < 2:
        raise LoadError(f"{path}: no data rows")
    header = [c.strip() for c in rows[0]]

    n_missing = 0
    n_unparseable = 0

    if layout == "wide":
        if not header or header[0].lower() != "year":
            raise LoadError(f"{path}: wide layout needs a leading 'year' column")
        variables = header[1:]
        if not variables:
            raise LoadError(f"{path}: no variable columns")
        cname = country if country is not None else path.stem
        cells: dict[str, dict[int, float]] = {v: {} for v in variables}
        seen_years = set()
        for r in rows[1:]:
            try:
                year = int(r[0])
            except (ValueError, IndexError):
                raise LoadError(f"{path}: unparseable year cell {r[0]!r}") from None
            if year in seen_years:
                raise LoadError(f"{path}: duplicate year {year}")
            seen_years.add(year)
            for v, token in zip(variables, r[1:]):
                val, was_missing, was_bad = _parse_cell(token)
                n_missing += was_missing
                n_unparseable += was_bad
                cells[v][year] = val
            # short rows: absent trailing cells are missing
            n_missing += max(0, len(variables) - (len(r) - 1))
        built = (_series_from_year_map(v, cells[v]) for v in variables)
        datasets = {cname: Dataset.from_series(cname, (s for s in built if s is not None))}
    elif layout == "long":
        if [h.lower() for h in header[:4]] != ["country", "year", "variable", "value"]:
            raise LoadError(f"{path}: long layout needs header country,year,variable,value")
        cells_by_country: dict[str, dict[str, dict[int, float]]] = {}
        seen: set[tuple[str, int, str]] = set()
        for r in rows[1:]:
            if len(r) < 4:
                raise LoadError(f"{path}: short row {r!r}")
            cname, variable = r[0].strip(), r[2].strip()
            try:
                year = int(r[1])
            except ValueError:
                raise LoadError(f"{path}: unparseable year cell {r[1]!r}") from None
            key = (cname, year, variable)
            if key in seen:
                raise LoadError(f"{path}: duplicate observation {key}")
            seen.add(key)
            val, was_missing, was_bad = _parse_cell(r[3])
            n_missing += was_missing
            n_unparseable += was_bad
            cells_by_country.setdefault(cname, {}).setdefault(variable, {})[year] = val
        datasets = {}
        for cname, per_var in cells_by_country.items():
            built = (_series_from_year_map(v, m) for v, m in per_var.items())
            datasets[cname] = Dataset.from_series(cname, (s for s in built if s is not None))

    return LoadResult(datasets, LoadReport(n_missing, n_unparseable))


def _format_cell(v: float) -> str:
    return "" if math.isnan(v) else repr(v)


def write_csv(data, path, layout: str = "wide") -> None:
    """Write a Dataset (wide) or an iterable of Datasets (long) to CSV.

    Missing values become empty cells, so load_csv(write_csv(d)) round-trips.
    """
    path = Path(path)
    if layout == "wide":
        d: Dataset = data
        names = list(d.names)
        if not names:
            raise ValueError("dataset has no series")
        first = min(d[n].start_year for n in names)
        last = max(d[n].end_year for n in names)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["year"] + names)
            for year in range(first, last + 1):
                row = [str(year)]
                for n in names:
                    s = d[n]
                    if s.start_year <= year <= s.end_year:
                        row.append(_format_cell(float(s.values[year - s.start_year])))
                    else:
                        row.append("")
                w.writerow(row)
    elif layout == "long":
        datasets = [data] if isinstance(data, Dataset) else list(data)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["country", "year", "variable", "value"])
            for d in datasets:
                for n in d.names:
                    s = d[n]
                    for year, v in zip(s.years, s.values):
                        w.writerow([d.country, str(year), n, _format_cell(float(v))])
    else:
        raise ValueError(f"unknown layout {layout!r}")
