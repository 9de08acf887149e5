"""Least-squares core: QR estimation, Wald F tests, SIC, and t-based significance.

Everything downstream (lag search, bounds test, long-run inference) funnels
through `ols`, so this module is deliberately conservative: the factorization
runs in extended precision (`np.longdouble`) via a pivoted Householder QR,
never through the normal equations, and rank problems fail loudly with the
offending column names.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "OlsFit",
    "RankDeficientError",
    "Significance",
    "ols",
    "sic",
    "student_t_pvalue",
    "t_marks",
    "wald_f",
]

# Pivot magnitudes below RANK_RTOL times the largest pivot mark a column as
# linearly dependent on its predecessors.
RANK_RTOL = 1e-10


class RankDeficientError(ValueError):
    """Raised when the design matrix has (numerically) dependent columns."""

    def __init__(self, columns: tuple[str, ...]):
        self.columns = columns
        super().__init__(
            "design matrix is rank deficient; dependent columns: "
            + ", ".join(columns)
        )


class Significance(enum.Enum):
    """Coarsest two-sided significance level cleared by a t-ratio."""

    P1 = "1%"
    P5 = "5%"
    P10 = "10%"
    NONE = "none"

    @classmethod
    def from_pvalue(cls, p: float) -> "Significance":
        if p <= 0.01:
            return cls.P1
        if p <= 0.05:
            return cls.P5
        if p <= 0.10:
            return cls.P10
        return cls.NONE

    @property
    def threshold(self) -> float | None:
        """The level as a fraction, or None for NONE."""
        return {"1%": 0.01, "5%": 0.05, "10%": 0.10}.get(self.value)

    @property
    def letter(self) -> str:
        """Table superscript: a) for 1%, b) for 5%, c) for 10%."""
        return {"1%": "a)", "5%": "b)", "10%": "c)"}.get(self.value, "")

    def significant_at(self, alpha: float) -> bool:
        """True if this mark clears the two-sided level `alpha`."""
        t = self.threshold
        return t is not None and t <= alpha + 1e-12


@dataclass(frozen=True)
class OlsFit:
    """Result of an OLS fit.

    X and y are retained (read-only) so restricted models can be re-estimated
    for F tests.
    """

    coefficients: np.ndarray
    stderr: np.ndarray
    residuals: np.ndarray
    sigma2: float
    covariance: np.ndarray
    n_obs: int
    n_params: int
    column_names: tuple[str, ...]
    X: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)

    @property
    def rss(self) -> float:
        return float(self.residuals @ self.residuals)

    @property
    def dof(self) -> int:
        return self.n_obs - self.n_params

    @property
    def tvalues(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.stderr > 0.0, self.coefficients / self.stderr, 0.0)


# ---- QR kernel ----------------------------------------------------------


def _qr_factor(A: np.ndarray):
    """Column-pivoted Householder QR, in place on the longdouble copy A.

    Returns (R, piv, reflectors) where R is p x p upper triangular, piv maps
    factor position -> original column, and reflectors is a list of
    (offset, v, vnorm2) Householder vectors for applying Q'.
    """
    n, p = A.shape
    piv = np.arange(p)
    reflectors = []
    for j in range(p):
        # Re-measure remaining columns each step; cheap at these sizes and
        # immune to the norm-downdating cancellation problem.
        norms2 = np.einsum("ij,ij->j", A[j:, j:], A[j:, j:])
        k = j + int(np.argmax(norms2))
        if k != j:
            A[:, [j, k]] = A[:, [k, j]]
            piv[[j, k]] = piv[[k, j]]
        x = A[j:, j]
        alpha = np.sqrt(np.dot(x, x))
        if x[0] > 0:
            alpha = -alpha
        v = x.copy()
        v[0] -= alpha
        vnorm2 = np.dot(v, v)
        if vnorm2 > 0.0:
            w = (v @ A[j:, j:]) * (2.0 / vnorm2)
            A[j:, j:] -= np.outer(v, w)
        A[j, j] = alpha
        if j + 1 <= n - 1:
            A[j + 1 :, j] = 0.0
        reflectors.append((j, v, vnorm2))
    return A[:p, :p], piv, reflectors


def _apply_qt(reflectors, y: np.ndarray) -> np.ndarray:
    z = y.copy()
    for j, v, vnorm2 in reflectors:
        if vnorm2 > 0.0:
            z[j:] -= v * (np.dot(v, z[j:]) * 2.0 / vnorm2)
    return z


def _back_substitute(R: np.ndarray, z: np.ndarray) -> np.ndarray:
    p = R.shape[0]
    b = np.zeros(p, dtype=R.dtype)
    for i in range(p - 1, -1, -1):
        b[i] = (z[i] - np.dot(R[i, i + 1 :], b[i + 1 :])) / R[i, i]
    return b


def _check_rank(R: np.ndarray, piv: np.ndarray, names: tuple[str, ...]) -> None:
    d = np.abs(np.diag(R))
    largest = d.max() if d.size else 0.0
    if largest == 0.0:
        raise RankDeficientError(names)
    bad = d < RANK_RTOL * largest
    if bad.any():
        raise RankDeficientError(tuple(names[piv[j]] for j in np.nonzero(bad)[0]))


def _solve_ls(X: np.ndarray, y: np.ndarray, names: tuple[str, ...]):
    """Longdouble QR solve. Returns (beta, residuals, rss, R, piv)."""
    A = np.asarray(X, dtype=np.longdouble).copy()
    yl = np.asarray(y, dtype=np.longdouble)
    R, piv, reflectors = _qr_factor(A)
    _check_rank(R, piv, names)
    z = _apply_qt(reflectors, yl)
    bp = _back_substitute(R, z[: R.shape[0]])
    beta = np.empty_like(bp)
    beta[piv] = bp
    resid = yl - np.asarray(X, dtype=np.longdouble) @ beta
    rss = float(np.dot(resid, resid))
    return beta, resid, rss, R, piv


def _rss_only(X: np.ndarray, y: np.ndarray) -> float | None:
    """RSS of the least-squares fit, or None if X is rank deficient.

    Same kernel as `ols` minus the covariance work; used by the lag-grid
    search and the Monte Carlo loop where only RSS matters.
    """
    A = np.asarray(X, dtype=np.longdouble).copy()
    yl = np.asarray(y, dtype=np.longdouble)
    R, piv, reflectors = _qr_factor(A)
    d = np.abs(np.diag(R))
    largest = d.max() if d.size else 0.0
    if largest == 0.0 or (d < RANK_RTOL * largest).any():
        return None
    z = _apply_qt(reflectors, yl)
    p = R.shape[0]
    # Householder leaves ||Q'y|| = ||y||; the tail beyond p is the residual.
    tail = z[p:]
    return float(np.dot(tail, tail))


def _inv_gram_from_r(R: np.ndarray, piv: np.ndarray) -> np.ndarray:
    """(X'X)^{-1} from the triangular factor, unpermuted."""
    p = R.shape[0]
    Rinv = np.zeros((p, p), dtype=R.dtype)
    for i in range(p - 1, -1, -1):
        Rinv[i, i] = 1.0 / R[i, i]
        for j in range(i + 1, p):
            Rinv[i, j] = -np.dot(R[i, i + 1 : j + 1], Rinv[i + 1 : j + 1, j]) / R[i, i]
    C = Rinv @ Rinv.T
    out = np.empty_like(C)
    out[np.ix_(piv, piv)] = C
    return out


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


# ---- public operations --------------------------------------------------


def ols(X, y, names: tuple[str, ...] | None = None) -> OlsFit:
    """Ordinary least squares via column-pivoted Householder QR.

    Parameters
    ----------
    X : (n, p) array_like
        Design matrix, n > p, full column rank.
    y : (n,) array_like
        Response.
    names : tuple of str, optional
        Column labels used in reports and error messages; defaults to
        ``x0..x{p-1}``.

    Returns
    -------
    OlsFit
        Coefficients, standard errors, residuals, sigma2 = RSS/(n-p), and
        covariance = sigma2 * (X'X)^{-1}, all derived from the decomposition.

    Raises
    ------
    RankDeficientError
        If any pivot falls below 1e-10 of the largest (naming the columns).
    ValueError
        If n <= p.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be 2-dimensional")
    n, p = X.shape
    if y.shape != (n,):
        raise ValueError(f"y has shape {y.shape}, expected ({n},)")
    if names is None:
        names = tuple(f"x{j}" for j in range(p))
    if len(names) != p:
        raise ValueError("names length does not match column count")
    if n <= p:
        raise ValueError(f"need more observations than parameters (n={n}, p={p})")

    beta, resid, rss, R, piv = _solve_ls(X, y, tuple(names))
    dof = n - p
    sigma2 = rss / dof
    cov = sigma2 * _inv_gram_from_r(R, piv)
    cov = 0.5 * (cov + cov.T)  # exact symmetry
    stderr = np.sqrt(np.maximum(np.diag(cov), 0.0))

    return OlsFit(
        coefficients=_freeze(beta.astype(np.float64)),
        stderr=_freeze(stderr.astype(np.float64)),
        residuals=_freeze(resid.astype(np.float64)),
        sigma2=float(sigma2),
        covariance=_freeze(cov.astype(np.float64)),
        n_obs=n,
        n_params=p,
        column_names=tuple(names),
        X=_freeze(X.copy()),
        y=_freeze(y.copy()),
    )


def wald_f(fit: OlsFit, restricted) -> float:
    """F statistic for the joint null that the given coefficients are zero.

    The restricted model is re-estimated with those columns deleted and the
    statistic computed from the RSS difference:

        F = ((RSS_r - RSS_f) / q) / (RSS_f / (n - p))

    An empty restriction compares the model with itself and returns 0.0.

    Raises
    ------
    ValueError
        If the restriction covers every column (no regressor remains), or if
        an index is out of range.
    """
    restricted = sorted(set(int(i) for i in restricted))
    p = fit.n_params
    if not restricted:
        return 0.0
    if any(i < 0 or i >= p for i in restricted):
        raise ValueError(f"restricted indices out of range 0..{p - 1}")
    if len(restricted) == p:
        raise ValueError("cannot restrict every column; no regressors would remain")

    keep = [j for j in range(p) if j not in restricted]
    names_r = tuple(fit.column_names[j] for j in keep)
    _, _, rss_r, _, _ = _solve_ls(fit.X[:, keep], fit.y, names_r)
    rss_f = fit.rss
    q = len(restricted)
    f = ((rss_r - rss_f) / q) / (rss_f / fit.dof)
    # RSS_r >= RSS_f mathematically; clip the rounding dust.
    return max(float(f), 0.0)


def sic(fit: OlsFit) -> float:
    """Schwarz information criterion: n*ln(RSS/n) + p*ln(n). Lower is better.

    A perfect fit (RSS = 0) returns -inf, which sorts ahead of every real
    candidate.
    """
    rss = fit.rss
    n = fit.n_obs
    if rss <= 0.0:
        return float("-inf")
    return n * math.log(rss / n) + fit.n_params * math.log(n)


def t_marks(fit: OlsFit) -> tuple[Significance, ...]:
    """Two-sided t significance mark for every coefficient.

    A zero standard error with a nonzero coefficient is numerically degenerate
    (the fit is exact in that direction); it is marked 1% and a warning is
    emitted rather than dividing by zero.
    """
    if fit.dof < 1:
        raise ValueError("no residual degrees of freedom for t inference")
    marks = []
    for b, se, name in zip(fit.coefficients, fit.stderr, fit.column_names):
        if se == 0.0:
            if b != 0.0:
                warnings.warn(
                    f"zero standard error for nonzero coefficient {name!r}; "
                    "marking 1% (numerical degeneracy)",
                    RuntimeWarning,
                    stacklevel=2,
                )
                marks.append(Significance.P1)
            else:
                marks.append(Significance.NONE)
            continue
        p = student_t_pvalue(b / se, fit.dof)
        marks.append(Significance.from_pvalue(p))
    return tuple(marks)


# ---- Student-t tail probability -----------------------------------------
#
# Computed from the regularized incomplete beta function so results do not
# depend on any external statistical library or platform-specific erf.


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    MAXIT = 300
    EPS = 3e-16
    FPMIN = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            return h
    raise RuntimeError(f"incomplete beta continued fraction failed for a={a}, b={b}, x={x}")


def _betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # The continued fraction converges fast only on one side of the mean;
    # use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) on the other.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_pvalue(t: float, dof: int) -> float:
    """Two-sided p-value of a Student-t statistic with `dof` degrees of freedom."""
    if dof < 1:
        raise ValueError("dof must be >= 1")
    t = float(t)
    if not math.isfinite(t):
        return 0.0
    x = dof / (dof + t * t)
    return _betainc_reg(0.5 * dof, 0.5, x)
