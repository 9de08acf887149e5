"""ARDL design construction, SIC lag search, and the bounds cointegration test.

The regression explains the differenced dependent variable with its own
lagged differences, current and lagged differences of every level regressor,
and the lagged levels themselves. The joint F-test on the lagged-level block
is compared against lower/upper critical bounds for the three-way
cointegration decision.
"""

from __future__ import annotations

import enum
import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from .regression import OlsFit, _rss_only, ols, wald_f
from .timeseries import AlignedFrame

__all__ = [
    "ArdlFit",
    "BoundsTestResult",
    "CriticalBounds",
    "Decision",
    "Design",
    "LagOrder",
    "ModelSpec",
    "SelectionResult",
    "bounds_test",
    "build_design",
    "decide",
    "critical_bounds",
    "fit_ardl",
    "select_lags",
]

# Small-sample critical bounds for the joint level-term F-test, keyed by
# (k, significance, variant). k counts level regressors excluding the
# dependent's own lag. Two published k=5 rows exist for different sample
# windows; the shorter-sample row is the "alt" variant.
_BOUNDS_TABLE: dict[tuple[int, float, str], tuple[float, float]] = {
    (2, 0.01, "primary"): (4.8, 5.725),
    (2, 0.05, "primary"): (3.368, 4.205),
    (4, 0.05, "primary"): (2.763, 3.813),
    (5, 0.05, "primary"): (2.694, 3.829),
    (5, 0.05, "alt"): (2.67, 3.78),
    (6, 0.05, "primary"): (2.591, 3.766),
}

_ALPHAS = (0.01, 0.05, 0.10)


class Decision(enum.Enum):
    COINTEGRATED = "Cointegrated"
    INCONCLUSIVE = "Inconclusive"
    NOT_COINTEGRATED = "NotCointegrated"


@dataclass(frozen=True)
class ModelSpec:
    """Which columns enter the regression and how.

    `income` names the log-income column; its squared (and optionally cubed)
    companion columns are found by appending ``2`` / ``3`` to that name, the
    convention the log transforms produce. `dependent` is the log-emissions
    level column; differencing happens inside the design builder.
    """

    dependent: str
    income: str
    income_order: int = 2
    controls: tuple[str, ...] = ()
    include_intercept: bool = True

    def __post_init__(self):
        object.__setattr__(self, "controls", tuple(self.controls))
        if self.income_order not in (2, 3):
            raise ValueError(f"income_order must be 2 or 3, got {self.income_order}")
        terms = self.level_terms
        if len(set(terms)) != len(terms):
            raise ValueError(f"model variables must be distinct: {terms}")

    @property
    def income_terms(self) -> tuple[str, ...]:
        terms = (self.income, self.income + "2")
        if self.income_order == 3:
            terms += (self.income + "3",)
        return terms

    @property
    def regressors(self) -> tuple[str, ...]:
        """Level regressors other than the dependent, in design order."""
        return self.income_terms + self.controls

    @property
    def level_terms(self) -> tuple[str, ...]:
        return (self.dependent,) + self.regressors

    @property
    def k(self) -> int:
        return len(self.regressors)


@dataclass(frozen=True)
class LagOrder:
    """Short-run lag orders: `dep` for the dependent's own differences,
    one entry per level regressor for the rest."""

    dep: int
    regressors: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "regressors", tuple(int(q) for q in self.regressors))
        if self.dep < 1:
            raise ValueError("dependent lag order must be >= 1")
        if any(q < 0 for q in self.regressors):
            raise ValueError("regressor lag orders must be >= 0")

    @property
    def total(self) -> int:
        return self.dep + sum(self.regressors)

    @property
    def max_lag(self) -> int:
        return max(self.dep, max(self.regressors, default=0))

    def as_tuple(self) -> tuple[int, ...]:
        return (self.dep,) + self.regressors

    def __str__(self) -> str:
        return "(" + ",".join(str(v) for v in self.as_tuple()) + ")"


@dataclass(frozen=True)
class Design:
    """Assembled regression arrays plus the metadata needed downstream."""

    y: np.ndarray
    X: np.ndarray
    column_names: tuple[str, ...]
    level_indices: tuple[int, ...]
    first_year: int
    last_year: int


@dataclass(frozen=True)
class ArdlFit:
    spec: ModelSpec
    lags: LagOrder
    ols: OlsFit
    level_indices: tuple[int, ...]
    first_year: int
    last_year: int

    @property
    def k(self) -> int:
        return len(self.level_indices) - 1

    @property
    def column_names(self) -> tuple[str, ...]:
        return self.ols.column_names


def _short_run_names(spec: ModelSpec, lags: LagOrder) -> list[str]:
    names = []
    if spec.include_intercept:
        names.append("const")
    for j in range(1, lags.dep + 1):
        names.append(f"d_{spec.dependent}_l{j}")
    for name, q in zip(spec.regressors, lags.regressors):
        names.append(f"d_{name}")
        names.extend(f"d_{name}_l{j}" for j in range(1, q + 1))
    return names


def build_design(
    frame: AlignedFrame,
    spec: ModelSpec,
    lags: LagOrder,
    common_lag: int | None = None,
) -> Design:
    """Assemble y and X for the ARDL regression on `frame`.

    Column order is fixed: intercept; dependent difference lags 1..m;
    per-regressor difference lags 0..q; then every lagged level (dependent
    first). `common_lag` trims the sample as if the maximum lag were that
    value, so fits with different lag orders share one sample during
    selection.

    Returns a Design whose first_year is the year of the first usable row.
    """
    if len(lags.regressors) != len(spec.regressors):
        raise ValueError(
            f"lag order has {len(lags.regressors)} regressor entries, "
            f"model has {len(spec.regressors)} regressors"
        )
    missing = [c for c in spec.level_terms if c not in frame.columns]
    if missing:
        raise KeyError(f"frame lacks columns: {', '.join(missing)}")

    lmax = lags.max_lag
    if common_lag is not None:
        if common_lag < lmax:
            raise ValueError(f"common_lag {common_lag} < maximum lag {lmax}")
        lmax = common_lag
    t0 = lmax + 1
    n = frame.n_rows
    rows = n - t0

    levels = {c: frame.col(c) for c in spec.level_terms}
    diffs = {c: np.diff(v) for c, v in levels.items()}

    names = _short_run_names(spec, lags)
    n_levels = len(spec.level_terms)
    n_cols = len(names) + n_levels
    if rows <= n_cols:
        raise ValueError(
            f"insufficient sample: {rows} usable rows after lag {lmax}, "
            f"need more than {n_cols} (one per column)"
        )

    cols = []
    if spec.include_intercept:
        cols.append(np.ones(rows))
    d_dep = diffs[spec.dependent]
    for j in range(1, lags.dep + 1):
        cols.append(d_dep[t0 - 1 - j : n - 1 - j])
    for name, q in zip(spec.regressors, lags.regressors):
        d = diffs[name]
        for j in range(q + 1):
            cols.append(d[t0 - 1 - j : n - 1 - j])
    for c in spec.level_terms:
        cols.append(levels[c][t0 - 1 : n - 1])
        names.append(f"{c}_lm1")

    X = np.column_stack(cols)
    y = d_dep[t0 - 1 :].copy()
    level_indices = tuple(range(n_cols - n_levels, n_cols))
    return Design(
        y=y,
        X=X,
        column_names=tuple(names),
        level_indices=level_indices,
        first_year=frame.first_year + t0,
        last_year=frame.last_year,
    )


def fit_ardl(frame: AlignedFrame, spec: ModelSpec, lags: LagOrder) -> ArdlFit:
    """Estimate the ARDL regression on the maximal sample for these lags."""
    design = build_design(frame, spec, lags)
    fit = ols(design.X, design.y, design.column_names)
    return ArdlFit(
        spec=spec,
        lags=lags,
        ols=fit,
        level_indices=design.level_indices,
        first_year=design.first_year,
        last_year=design.last_year,
    )


# ---- lag selection ------------------------------------------------------


@dataclass(frozen=True)
class SelectionResult:
    """Winner of the SIC search plus bookkeeping about the search itself."""

    order: LagOrder
    sic: float
    n_evaluated: int
    n_skipped: int
    exhaustive: bool
    notes: tuple[str, ...] = ()


def _sic_value(rss: float, n: int, p: int) -> float:
    if rss <= 0.0:
        return -np.inf
    return n * np.log(rss / n) + p * np.log(n)


class _CommonSampleEvaluator:
    """Shares the lagged-column pool across candidates on one common sample."""

    def __init__(self, frame: AlignedFrame, spec: ModelSpec, max_lag: int):
        self.spec = spec
        self.max_m = max(1, max_lag)
        self.max_q = max_lag
        lmax = self.max_m
        t0 = lmax + 1
        n = frame.n_rows
        self.rows = n - t0
        levels = {c: frame.col(c) for c in spec.level_terms}
        diffs = {c: np.diff(v) for c, v in levels.items()}

        def lagged(d, j):
            return d[t0 - 1 - j : n - 1 - j]

        self.y = diffs[spec.dependent][t0 - 1 :]
        self.const = np.ones(self.rows) if spec.include_intercept else None
        self.dep_lags = [lagged(diffs[spec.dependent], j) for j in range(1, self.max_m + 1)]
        self.reg_lags = [
            [lagged(diffs[name], j) for j in range(self.max_q + 1)]
            for name in spec.regressors
        ]
        self.level_block = [levels[c][t0 - 1 : n - 1] for c in spec.level_terms]

    def max_columns(self, order: LagOrder) -> int:
        base = 1 if self.const is not None else 0
        return base + order.dep + sum(q + 1 for q in order.regressors) + len(self.level_block)

    def sic(self, order: LagOrder) -> float | None:
        """SIC on the common sample, or None when the design is singular."""
        cols = []
        if self.const is not None:
            cols.append(self.const)
        cols.extend(self.dep_lags[: order.dep])
        for i, q in enumerate(order.regressors):
            cols.extend(self.reg_lags[i][: q + 1])
        cols.extend(self.level_block)
        X = np.column_stack(cols)
        if self.rows <= X.shape[1]:
            return None
        rss = _rss_only(X, self.y)
        if rss is None:
            return None
        return _sic_value(rss, self.rows, X.shape[1])


def _candidate_grid(n_groups: int, max_lag: int):
    ms = range(1, max(1, max_lag) + 1)
    qs = range(0, max_lag + 1)
    for m in ms:
        for combo in itertools.product(qs, repeat=n_groups):
            yield LagOrder(m, combo)


def select_lags(
    frame: AlignedFrame,
    spec: ModelSpec,
    max_lag: int = 4,
    budget: int = 1_000_000,
) -> SelectionResult:
    """SIC-minimizing lag order over the full grid up to `max_lag`.

    Every candidate is scored on the common sample implied by `max_lag`, so
    the criterion values are comparable. Ties break toward the smallest
    total lag count, then lexicographically. Grids larger than `budget`
    fall back to a deterministic coordinate search with a warning.
    """
    if max_lag < 0:
        raise ValueError("max_lag must be >= 0")
    ev = _CommonSampleEvaluator(frame, spec, max_lag)
    k = len(spec.regressors)
    grid_size = max(1, max_lag) * (max_lag + 1) ** k

    notes: list[str] = []
    best: tuple[float, int, tuple[int, ...]] | None = None
    best_order: LagOrder | None = None
    n_eval = 0
    n_skip = 0

    def consider(order: LagOrder) -> float | None:
        nonlocal best, best_order, n_eval, n_skip
        s = ev.sic(order)
        n_eval += 1
        if s is None:
            n_skip += 1
            return None
        key = (s, order.total, order.as_tuple())
        if best is None or key < best:
            best, best_order = key, order
        return s

    if grid_size <= budget:
        for order in _candidate_grid(k, max_lag):
            consider(order)
        exhaustive = True
    else:
        msg = (
            f"lag grid has {grid_size} candidates, over the budget of {budget}; "
            "using a staged coordinate search (result may not be the global optimum)"
        )
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append(msg)
        exhaustive = False
        current = [1] + [0] * k
        cache: dict[tuple[int, ...], float | None] = {}

        def scored(vec) -> float | None:
            key = tuple(vec)
            if key not in cache:
                order = LagOrder(vec[0], tuple(vec[1:]))
                cache[key] = consider(order)
            return cache[key]

        scored(current)
        for _ in range(10):
            changed = False
            for pos in range(k + 1):
                lo = 1 if pos == 0 else 0
                choices = []
                for v in range(lo, max_lag + 1 if pos else max(1, max_lag) + 1):
                    trial = list(current)
                    trial[pos] = v
                    s = scored(trial)
                    if s is not None:
                        choices.append((s, sum(trial), tuple(trial), trial))
                if choices:
                    choices.sort(key=lambda c: c[:3])
                    if choices[0][3] != current:
                        current = choices[0][3]
                        changed = True
            if not changed:
                break

    if best_order is None:
        raise ValueError("every candidate lag order produced a rank-deficient design")
    return SelectionResult(
        order=best_order,
        sic=float(best[0]),
        n_evaluated=n_eval,
        n_skipped=n_skip,
        exhaustive=exhaustive,
        notes=tuple(notes),
    )


# ---- critical bounds and the test ---------------------------------------


@dataclass(frozen=True)
class CriticalBounds:
    lower: float
    upper: float
    source: str = "table"

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"bounds must satisfy lower < upper, got {self.lower}, {self.upper}")

    def __iter__(self):
        yield self.lower
        yield self.upper


def critical_bounds(
    k: int,
    significance: float = 0.05,
    n_obs: int | None = None,
    variant: str = "primary",
    allow_simulation: bool = False,
    simulation_kwargs: dict | None = None,
) -> CriticalBounds:
    """Lower/upper F-bounds for `k` level regressors at `significance`.

    Published small-sample values cover the (k, significance) cells listed
    in the embedded table; other cells can be Monte Carlo simulated when
    `allow_simulation` is set and `n_obs` is given (result flagged
    ``simulated``).
    """
    if not 2 <= k <= 7:
        raise ValueError(f"k must be in 2..7, got {k}")
    if significance not in _ALPHAS:
        raise ValueError(f"significance must be one of {_ALPHAS}, got {significance}")
    hit = _BOUNDS_TABLE.get((k, significance, variant))
    if hit is not None:
        return CriticalBounds(hit[0], hit[1], "table")
    if not allow_simulation:
        raise ValueError(
            f"no tabulated bounds for k={k} at {significance:.0%} "
            f"(variant {variant!r}); pass allow_simulation=True to estimate them"
        )
    if n_obs is None:
        raise ValueError("simulation fallback needs n_obs")
    from .critval import McConfig, simulate_bounds

    cfg = McConfig(k=k, n_obs=n_obs, **(simulation_kwargs or {}))
    est = simulate_bounds(cfg)
    lo, hi = est.bounds[significance]
    return CriticalBounds(lo, hi, "simulated")


@dataclass(frozen=True)
class BoundsTestResult:
    f_stat: float
    k: int
    bounds: dict[float, CriticalBounds] = field(repr=False)
    decision: Decision = Decision.INCONCLUSIVE
    significance_used: float = 0.05

    def bound_pair(self, significance: float | None = None) -> CriticalBounds:
        return self.bounds[self.significance_used if significance is None else significance]


def decide(f_stat: float, bounds: CriticalBounds) -> Decision:
    """Three-way call: above the upper bound, below the lower, or in between."""
    if f_stat > bounds.upper:
        return Decision.COINTEGRATED
    if f_stat < bounds.lower:
        return Decision.NOT_COINTEGRATED
    return Decision.INCONCLUSIVE


def bounds_test(
    fit: ArdlFit,
    significance: float = 0.05,
    bounds: dict[float, tuple[float, float]] | None = None,
    variant: str = "primary",
) -> BoundsTestResult:
    """Joint F-test that every lagged-level coefficient is zero.

    The restriction covers the whole level block, the dependent's own lag
    included; the intercept stays unrestricted. F above the upper bound
    means cointegration, below the lower bound means none, anywhere in
    [lower, upper] is inconclusive (boundary inclusive). `bounds` overrides
    the table, mapping significance to a (lower, upper) pair.
    """
    if not fit.level_indices:
        raise ValueError("fit has no level block to test")
    f = wald_f(fit.ols, fit.level_indices)
    k = fit.k

    table: dict[float, CriticalBounds] = {}
    if bounds is not None:
        for alpha, pair in bounds.items():
            table[alpha] = pair if isinstance(pair, CriticalBounds) else CriticalBounds(*pair, "override")
    else:
        for alpha in _ALPHAS:
            try:
                table[alpha] = critical_bounds(k, alpha, variant=variant)
            except ValueError:
                continue
    if significance not in table:
        raise ValueError(
            f"no bounds available at significance {significance} for k={k}"
        )

    b = table[significance]
    return BoundsTestResult(
        f_stat=float(f),
        k=k,
        bounds=table,
        decision=decide(f, b),
        significance_used=significance,
    )
