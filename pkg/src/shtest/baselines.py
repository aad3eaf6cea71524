"""Competitor high-dimensional two-sample tests: SD, CQ and random projection.

All three work when p exceeds the sample size. Trace quantities are computed
through n x n Gram matrices so the cost stays linear in p.
"""

import numpy as np

from .classic import TestOutcome, _two_samples
from .core.linalg import cholesky, pooled_scatter_unchecked, quadratic_form_chol
from .core.rng import as_generator
from .core.special import f_sf, norm_sf
from .errors import ConfigInvalid, InsufficientSamples, ZeroVariance


def sd_test(X, Y):
    """Diagonal-scaled Hotelling test with a normal reference law.

    The pooled covariance is replaced by its diagonal; the centred, scaled
    quadratic form is compared to the upper tail of N(0, 1).
    """
    X, Y = _two_samples(X, Y)
    nx, ny = X.shape[0], Y.shape[0]
    p = X.shape[1]
    n = nx + ny
    N = n - 2
    if N < 2:
        raise InsufficientSamples("SD needs n_X + n_Y >= 4")
    Zx = X - X.mean(axis=0)
    Zy = Y - Y.mean(axis=0)
    var = (np.sum(Zx**2, axis=0) + np.sum(Zy**2, axis=0)) / N
    if np.any(var <= 0):
        raise ZeroVariance("a pooled column variance is zero")
    d = X.mean(axis=0) - Y.mean(axis=0)
    tau = nx * ny / n
    # R = Zs' Zs / N, so tr(R^2) = ||Zs Zs'||_F^2 / N^2
    Zs = np.vstack([Zx, Zy]) / np.sqrt(var)
    G = Zs @ Zs.T
    tr_r2 = np.sum(G * G) / N**2
    c = 1.0 + tr_r2 / p**1.5
    num = tau * np.sum(d * d / var) - N * p / (N - 2.0)
    stat = num / np.sqrt(2.0 * (tr_r2 - p * p / N) * c)
    return TestOutcome("sd", float(stat), float(norm_sf(stat)), None, {"tr_r2": float(tr_r2)})


def _trace_sq(Z):
    """Leave-two-out unbiased estimate of tr(Sigma^2) from the rows of ``Z``."""
    n = Z.shape[0]
    G = Z @ Z.T
    g = G.sum(axis=1)
    dg = np.diag(G)
    # A[j, k] = (Z_j - mean without j, k)' Z_k
    A = G - (g[None, :] - G - dg[None, :]) / (n - 2)
    P = A * A.T
    return (P.sum() - np.trace(P)) / (n * (n - 1))


def _cross_trace(X, Y):
    """Leave-one-out unbiased estimate of tr(Sigma_X Sigma_Y)."""
    nx, ny = X.shape[0], Y.shape[0]
    C = X @ Y.T
    # (X_l - mean without l)' Y_k and (Y_k - mean without k)' X_l
    a = C - (C.sum(axis=0)[None, :] - C) / (nx - 1)
    b = C - (C.sum(axis=1)[:, None] - C) / (ny - 1)
    return np.sum(a * b) / (nx * ny)


def cq_test(X, Y):
    """Two-sample test based on an unbiased estimate of ``||mu_X - mu_Y||^2``.

    The statistic drops the within-sample diagonal terms, so it has mean zero
    under the null; it is standardized by an estimate of its null standard
    deviation and referred to the upper tail of N(0, 1). ``statistic`` is the
    raw U-statistic; ``extras`` keeps the variance estimate and the
    standardized value ``z``.
    """
    X, Y = _two_samples(X, Y)
    nx, ny = X.shape[0], Y.shape[0]
    if nx < 4 or ny < 4:
        raise InsufficientSamples("the trace estimators need at least 4 rows per group")
    Gx = X @ X.T
    Gy = Y @ Y.T
    sx, sy = X.sum(axis=0), Y.sum(axis=0)
    within_x = (Gx.sum() - np.trace(Gx)) / (nx * (nx - 1))
    within_y = (Gy.sum() - np.trace(Gy)) / (ny * (ny - 1))
    cross = sx @ sy / (nx * ny)
    t = within_x + within_y - 2.0 * cross
    var = (
        2.0 / (nx * (nx - 1)) * _trace_sq(X)
        + 2.0 / (ny * (ny - 1)) * _trace_sq(Y)
        + 4.0 / (nx * ny) * _cross_trace(X, Y)
    )
    if not var > 0:
        raise ZeroVariance(f"estimated null variance is not positive ({var})")
    z = t / np.sqrt(var)
    return TestOutcome("cq", float(t), float(norm_sf(z)), None, {"z": float(z), "var": float(var)})


def default_k(n_total, p):
    """Projection dimension: half the total sample size, capped by ``p`` and ``n - 2``."""
    return max(1, min(n_total // 2, n_total - 2, p))


def lopes_test(X, Y, k=None, rng=None):
    """Hotelling test on a random Gaussian projection of the data.

    Parameters
    ----------
    X, Y : array_like, shapes (n_X, p) and (n_Y, p)
    k : int, optional
        Projection dimension, default :func:`default_k`. Must satisfy
        ``1 <= k <= n - 2``.
    rng : RngState, Generator or int, optional
        Source of the p x k projection matrix.
    """
    X, Y = _two_samples(X, Y)
    nx, ny = X.shape[0], Y.shape[0]
    n, p = nx + ny, X.shape[1]
    k = default_k(n, p) if k is None else int(k)
    if not 1 <= k <= n - 2:
        raise ConfigInvalid(f"projection dimension k={k} must satisfy 1 <= k <= n-2={n - 2}")
    P = as_generator(rng).standard_normal((p, k))
    Xp, Yp = X @ P, Y @ P
    S = pooled_scatter_unchecked(Xp, Yp)
    L = cholesky(0.5 * (S + S.T))
    d = Xp.mean(axis=0) - Yp.mean(axis=0)
    t2 = nx * ny / n * quadratic_form_chol(L, d)
    f = t2 * (n - k - 1) / ((n - 2) * k)
    return TestOutcome(
        "lopes", float(t2), float(f_sf(f, k, n - k - 1)), (float(k), float(n - k - 1)), {"k": float(k)}
    )
