"""Monte Carlo estimation of small-sample bounds critical values.

Each replication draws an independent random-walk dependent series under the
no-cointegration null, plus k regressors: serially uncorrelated noise for
the lower-bound population, independent random walks for the upper. The
bounds regression (first difference on intercept and lagged levels) gives
one F per population per replication; bounds are upper-tail quantiles.

The F restriction covers the intercept together with the level block (the
restricted model has no regressors at all). This is the variant whose
quantiles line up with the published small-sample tables; restricting the
levels alone sits several tenths higher.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .regression import _rss_only

__all__ = ["McBounds", "McConfig", "simulate_bounds"]

ALPHAS = (0.10, 0.05, 0.01)

_MAX_ATTEMPTS = 50


@dataclass(frozen=True)
class McConfig:
    k: int
    n_obs: int
    replications: int = 20000
    seed: int = 0
    bootstrap_replications: int = 200
    case: str = "intercept_no_trend"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.n_obs < 20:
            raise ValueError("n_obs must be >= 20")
        if self.replications < 1000:
            raise ValueError("replications must be >= 1000")
        if self.bootstrap_replications < 2:
            raise ValueError("bootstrap_replications must be >= 2")
        if self.case != "intercept_no_trend":
            raise ValueError(f"unsupported case {self.case!r}")


@dataclass(frozen=True)
class McBounds:
    """Empirical bounds per significance with bootstrap quantile errors."""

    config: McConfig
    bounds: dict[float, tuple[float, float]]
    stderrs: dict[float, tuple[float, float]]
    n_resampled: int
    f_lower: np.ndarray
    f_upper: np.ndarray

    def __post_init__(self):
        for a in (self.f_lower, self.f_upper):
            a.setflags(write=False)


def _stream(seed: int, domain: int, index: int) -> np.random.Generator:
    """Independent substream (domain, index) of the root seed.

    Uses the spawn-key mechanism of numpy's SeedSequence over the Philox
    counter generator, so any (domain, index) pair is reachable directly and
    the draw is identical no matter which worker produces it.
    """
    ss = np.random.SeedSequence(seed, spawn_key=(domain, index))
    return np.random.Generator(np.random.Philox(ss))


def _f_stat(dep: np.ndarray, regressors: np.ndarray) -> float | None:
    """Bounds-test F for one simulated system, None on rank failure."""
    y = np.diff(dep)
    X = np.column_stack([np.ones(y.size), dep[:-1], regressors[:-1, :]])
    p = X.shape[1]
    dof = y.size - p
    if dof <= 0:
        raise ValueError(f"n_obs too small: {dof} residual degrees of freedom")
    rss_full = _rss_only(X, y)
    if rss_full is None or rss_full <= 0.0:
        return None
    yl = y.astype(np.longdouble)
    rss_restricted = float(yl @ yl)
    f = ((rss_restricted - rss_full) / p) / (rss_full / dof)
    return max(float(f), 0.0)


def _simulate_range(cfg: McConfig, lo: int, hi: int):
    """F pairs for replication indices [lo, hi); resamples on rank failure."""
    n, k, reps = cfg.n_obs, cfg.k, cfg.replications
    f_low = np.empty(hi - lo)
    f_up = np.empty(hi - lo)
    resampled = 0
    for i in range(lo, hi):
        for attempt in range(_MAX_ATTEMPTS):
            rng = _stream(cfg.seed, 0, attempt * reps + i)
            dep = np.cumsum(rng.standard_normal(n))
            noise_regs = rng.standard_normal((n, k))
            walk_regs = np.cumsum(rng.standard_normal((n, k)), axis=0)
            fl = _f_stat(dep, noise_regs)
            fu = _f_stat(dep, walk_regs)
            if fl is not None and fu is not None:
                f_low[i - lo] = fl
                f_up[i - lo] = fu
                break
            resampled += 1
        else:
            raise RuntimeError(f"replication {i} failed {_MAX_ATTEMPTS} resample attempts")
    return f_low, f_up, resampled


def simulate_bounds(cfg: McConfig, workers: int = 1) -> McBounds:
    """Monte Carlo lower/upper critical bounds for cfg's (k, n_obs).

    Deterministic given cfg.seed and invariant to `workers`: every
    replication has its own generator substream, and quantiles are taken in
    one pass after all F values are collected. Rank-deficient draws are
    resampled from fresh substreams; more than 1% of them is an error.
    """
    reps = cfg.replications
    if workers <= 1:
        f_low, f_up, resampled = _simulate_range(cfg, 0, reps)
    else:
        edges = np.linspace(0, reps, workers + 1).astype(int)
        chunks = [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
        f_low = np.empty(reps)
        f_up = np.empty(reps)
        resampled = 0
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_simulate_range, cfg, a, b) for a, b in chunks]
            for (a, b), fut in zip(chunks, futures):
                part_low, part_up, part_res = fut.result()
                f_low[a:b] = part_low
                f_up[a:b] = part_up
                resampled += part_res

    if resampled > 0.01 * reps:
        raise RuntimeError(
            f"{resampled} rank-failure resamples out of {reps} replications (> 1%)"
        )

    bounds = {
        alpha: (
            float(np.quantile(f_low, 1.0 - alpha)),
            float(np.quantile(f_up, 1.0 - alpha)),
        )
        for alpha in ALPHAS
    }

    # paired bootstrap over replications for quantile standard errors
    B = cfg.bootstrap_replications
    boot = {alpha: np.empty((B, 2)) for alpha in ALPHAS}
    for b in range(B):
        rng = _stream(cfg.seed, 1, b)
        idx = rng.integers(0, reps, size=reps)
        low_b = f_low[idx]
        up_b = f_up[idx]
        for alpha in ALPHAS:
            boot[alpha][b, 0] = np.quantile(low_b, 1.0 - alpha)
            boot[alpha][b, 1] = np.quantile(up_b, 1.0 - alpha)
    stderrs = {
        alpha: (
            float(np.std(boot[alpha][:, 0], ddof=1)),
            float(np.std(boot[alpha][:, 1], ddof=1)),
        )
        for alpha in ALPHAS
    }

    return McBounds(
        config=cfg,
        bounds=bounds,
        stderrs=stderrs,
        n_resampled=resampled,
        f_lower=f_low,
        f_upper=f_up,
    )
