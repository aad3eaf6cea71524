"""Two-sample Hotelling tests, scalar t-tests and the Simes combination test."""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .core.linalg import (
    as_data_matrix,
    check_same_dim,
    cholesky,
    pooled_scatter_unchecked,
    quadratic_form_chol,
)
from .core.special import f_sf, t_two_sided_pvalue
from .errors import (
    DegenerateDof,
    DomainError,
    EmptyInput,
    InsufficientSamples,
    ZeroVariance,
)


@dataclass(frozen=True)
class TestOutcome:
    """Result of a hypothesis test.

    ``df`` is ``(d1, d2)`` for F-referenced tests, ``(nu,)`` for t-tests and
    ``None`` for tests with a normal or permutation reference law.
    """

    __test__ = False  # keep pytest from collecting this class

    method: str
    statistic: float
    p_value: float
    df: tuple = None
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if not np.isfinite(self.statistic):
            raise DomainError(f"{self.method}: statistic is not finite ({self.statistic})")
        if not 0.0 <= self.p_value <= 1.0:
            raise DomainError(f"{self.method}: p-value {self.p_value} outside [0, 1]")


def _two_samples(X, Y, delta=None):
    X = as_data_matrix(X, "X")
    Y = as_data_matrix(Y, "Y")
    check_same_dim(X, Y)
    if delta is not None:
        X = X - np.broadcast_to(np.asarray(delta, dtype=float), (X.shape[1],))
    return X, Y


def hotelling_pvalue(t2, m, n):
    """p-value of the F-scaled two-sample statistic on ``m`` dimensions."""
    return f_sf(t2, m, n - m - 1)


def hotelling_two_sample(X, Y, delta=None):
    """Two-sample Hotelling test with pooled covariance.

    The statistic is already scaled to follow F(p, n - p - 1) under the null,
    with ``n = n_X + n_Y``. ``delta`` tests ``mu_X - mu_Y = delta``.
    """
    X, Y = _two_samples(X, Y, delta)
    nx, ny = X.shape[0], Y.shape[0]
    n, p = nx + ny, X.shape[1]
    if n < p + 2:
        raise InsufficientSamples(f"Hotelling needs n >= p + 2 (n={n}, p={p})")
    S = pooled_scatter_unchecked(X, Y)
    L = cholesky(0.5 * (S + S.T))
    d = X.mean(axis=0) - Y.mean(axis=0)
    q = quadratic_form_chol(L, d)
    t2 = (n - p - 1) / ((n - 2) * p) * (nx * ny / n) * q
    return TestOutcome(
        "hotelling", t2, float(hotelling_pvalue(t2, p, n)), (float(p), float(n - p - 1))
    )


def welch_dof(tr_x, tr2_x, tr_y, tr2_y, p, nx, ny):
    """Approximate degrees of freedom for the unequal-covariance statistic.

    ``tr_x = tr(Sx S^-1)`` and ``tr2_x = tr((Sx S^-1)^2)`` with ``Sx`` the
    covariance of the group-X mean and ``S = Sx + Sy``; likewise for Y. Each
    group is weighted by the inverse of its covariance degrees of freedom, so
    p = 1 gives the Welch-Satterthwaite value.
    """
    denom = (tr2_x + tr_x**2) / (nx - 1) + (tr2_y + tr_y**2) / (ny - 1)
    return (p + p * p) / denom


def welch_hotelling(X, Y, delta=None):
    """Hotelling-type test without the equal-covariance assumption.

    Uses ``T2 = d' (Sx/nx + Sy/ny)^-1 d`` referred to
    ``nu p / (nu - p + 1) * F(p, nu - p + 1)``; ``extras['nu']`` holds nu.
    """
    X, Y = _two_samples(X, Y, delta)
    nx, ny = X.shape[0], Y.shape[0]
    p = X.shape[1]
    if nx < 2 or ny < 2:
        raise InsufficientSamples("each group needs at least two observations")
    Zx = X - X.mean(axis=0)
    Zy = Y - Y.mean(axis=0)
    Vx = Zx.T @ Zx / ((nx - 1) * nx)
    Vy = Zy.T @ Zy / ((ny - 1) * ny)
    V = Vx + Vy
    L = cholesky(0.5 * (V + V.T))
    d = X.mean(axis=0) - Y.mean(axis=0)
    t2 = quadratic_form_chol(L, d)

    # L^-1 Vx L^-T shares its spectrum with Vx V^-1
    Wx = solve_triangular(L, Zx.T, lower=True, check_finite=False)
    Wy = solve_triangular(L, Zy.T, lower=True, check_finite=False)
    Ax = Wx @ Wx.T / ((nx - 1) * nx)
    Ay = Wy @ Wy.T / ((ny - 1) * ny)
    nu = welch_dof(np.trace(Ax), np.sum(Ax * Ax), np.trace(Ay), np.sum(Ay * Ay), p, nx, ny)
    df2 = nu - p + 1
    if not df2 > 0:
        raise DegenerateDof(f"nu - p + 1 = {df2} is not positive")
    f = t2 * df2 / (nu * p)
    return TestOutcome(
        "welch_hotelling", t2, float(f_sf(f, p, df2)), (float(p), float(df2)), {"nu": float(nu)}
    )


def _vector(x, name):
    x = np.asarray(x, dtype=float).ravel()
    if x.size < 2:
        raise InsufficientSamples(f"{name} needs at least two observations")
    if not np.all(np.isfinite(x)):
        raise DomainError(f"{name} contains non-finite entries")
    return x


def column_t_tests(X, Y, equal_var=True):
    """Column-wise two-sided t statistics, degrees of freedom and p-values."""
    nx, ny = X.shape[0], Y.shape[0]
    d = X.mean(axis=0) - Y.mean(axis=0)
    vx = X.var(axis=0, ddof=1)
    vy = Y.var(axis=0, ddof=1)
    if equal_var:
        df = float(nx + ny - 2)
        sp2 = ((nx - 1) * vx + (ny - 1) * vy) / df
        if np.any(sp2 <= 0):
            raise ZeroVariance("pooled variance is zero")
        se2 = sp2 * (1.0 / nx + 1.0 / ny)
        df = np.full(d.shape, df)
    else:
        ax, ay = vx / nx, vy / ny
        se2 = ax + ay
        if np.any(se2 <= 0):
            raise ZeroVariance("both sample variances are zero")
        df = se2**2 / (ax**2 / (nx - 1) + ay**2 / (ny - 1))
    t = d / np.sqrt(se2)
    return t, df, np.asarray(t_two_sided_pvalue(t, df), dtype=float).reshape(t.shape)


def pooled_t_test(x, y):
    """Two-sided two-sample t-test with pooled variance."""
    x = _vector(x, "x")
    y = _vector(y, "y")
    t, df, pv = column_t_tests(x[:, None], y[:, None], equal_var=True)
    return TestOutcome("pooled_t", float(t[0]), float(pv[0]), (float(df[0]),))


def welch_t_test(x, y):
    """Two-sided Welch t-test with Welch-Satterthwaite degrees of freedom."""
    x = _vector(x, "x")
    y = _vector(y, "y")
    t, df, pv = column_t_tests(x[:, None], y[:, None], equal_var=False)
    return TestOutcome("welch_t", float(t[0]), float(pv[0]), (float(df[0]),))


def _check_pvals(p):
    p = np.asarray(p, dtype=float)
    if p.size == 0:
        raise EmptyInput("no p-values to combine")
    if np.any(~((p >= 0) & (p <= 1))):
        raise DomainError("p-values must lie in [0, 1]")
    return p


def simes_along(P, axis=0):
    """Simes combination of the p-values along ``axis`` (no validation)."""
    P = np.sort(P, axis=axis)
    k = P.shape[axis]
    shape = [1] * P.ndim
    shape[axis] = k
    ranks = np.arange(1, k + 1, dtype=float).reshape(shape)
    return np.clip(np.min(P * (k / ranks), axis=axis), 0.0, 1.0)


def simes(pvals):
    """Simes global-null p-value ``min_l p_(l) k / l``."""
    p = _check_pvals(pvals).ravel()
    return float(simes_along(p))


def bonferroni(pvals):
    p = _check_pvals(pvals).ravel()
    return float(min(1.0, p.size * p.min()))


def marginal_simes_test(X, Y, equal_var=True, delta=None):
    """Column-wise t-tests combined by Simes.

    ``equal_var=False`` switches the column tests to Welch.
    """
    X, Y = _two_samples(X, Y, delta)
    _, _, pv = column_t_tests(X, Y, equal_var=equal_var)
    s = float(simes_along(pv))
    return TestOutcome("simes", s, s, None, {"min_p": float(pv.min()), "k": float(pv.size)})
