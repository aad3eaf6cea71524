"""Data validation, summary statistics and SPD solves.

A data matrix is a 2-D float array with observations in rows and dimensions in
columns. Positive definiteness is decided by Cholesky factorization only: a
pivot at or below ``PIVOT_RTOL * max(diag)`` means singular.
"""

import numpy as np
from scipy.linalg import solve_triangular

from ..errors import DimensionMismatch, DomainError, SingularCovariance

PIVOT_RTOL = 1e-12
SYMMETRY_RTOL = 1e-10


def as_data_matrix(X, name="X"):
    """Validate and return ``X`` as an (n, p) float array.

    A 1-D input is read as n observations of a single dimension.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DimensionMismatch(f"{name} must be a 2-D array, got {X.ndim} dimensions")
    n, p = X.shape
    if n < 2 or p < 1:
        raise DimensionMismatch(f"{name} needs at least 2 rows and 1 column, got {X.shape}")
    if not np.all(np.isfinite(X)):
        raise DomainError(f"{name} contains non-finite entries")
    return X


def check_same_dim(X, Y):
    if X.shape[1] != Y.shape[1]:
        raise DimensionMismatch(
            f"samples have different dimensions: {X.shape[1]} vs {Y.shape[1]}"
        )


def column_means(X):
    return as_data_matrix(X).mean(axis=0)


def _scatter(X):
    Z = X - X.mean(axis=0)
    return Z.T @ Z


def pooled_scatter_unchecked(X, Y):
    """Pooled covariance without the positive-definiteness check."""
    n = X.shape[0] + Y.shape[0]
    return (_scatter(X) + _scatter(Y)) / (n - 2)


def pooled_covariance(X, Y):
    """Pooled covariance estimate of two samples sharing a covariance matrix.

    Raises
    ------
    SingularCovariance
        If the estimate does not admit a Cholesky factorization.
    """
    X = as_data_matrix(X, "X")
    Y = as_data_matrix(Y, "Y")
    check_same_dim(X, Y)
    S = pooled_scatter_unchecked(X, Y)
    S = 0.5 * (S + S.T)
    cholesky(S)
    return S


def cholesky(S):
    """Lower Cholesky factor of a symmetric positive-definite matrix."""
    S = np.atleast_2d(np.asarray(S, dtype=float))
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {S.shape}")
    scale = np.max(np.abs(S)) if S.size else 0.0
    if not np.allclose(S, S.T, rtol=0.0, atol=SYMMETRY_RTOL * max(scale, 1e-300)):
        raise DomainError("matrix is not symmetric")
    try:
        L = np.linalg.cholesky(S)
    except np.linalg.LinAlgError as exc:
        raise SingularCovariance(f"covariance matrix is singular ({exc})") from None
    _check_pivots(L, S)
    return L


def _check_pivots(L, S):
    pivots = np.diagonal(L, axis1=-2, axis2=-1) ** 2
    ref = np.max(np.diagonal(S, axis1=-2, axis2=-1), axis=-1, keepdims=True)
    if np.any(~(pivots > PIVOT_RTOL * ref)):
        raise SingularCovariance("covariance matrix is numerically singular (Cholesky pivot below tolerance)")


def quadratic_form_inv(S, v):
    """``v' S^{-1} v`` via Cholesky and a triangular solve."""
    v = np.asarray(v, dtype=float)
    L = cholesky(S)
    if v.shape != (L.shape[0],):
        raise DimensionMismatch(f"vector of length {v.shape} does not match {L.shape}")
    return quadratic_form_chol(L, v)


def quadratic_form_chol(L, v):
    z = solve_triangular(L, v, lower=True, check_finite=False)
    return float(z @ z)


def batched_cholesky(S):
    """Cholesky factors of a stack of SPD matrices, shape (..., k, k)."""
    try:
        L = np.linalg.cholesky(S)
    except np.linalg.LinAlgError as exc:
        raise SingularCovariance(f"covariance matrix is singular ({exc})") from None
    _check_pivots(L, S)
    return L


def batched_forward_substitute(L, R):
    """Solve ``L X = R`` for a stack of lower-triangular ``L``.

    ``L`` has shape (c, k, k) and ``R`` (c, k, r). Row-by-row substitution
    vectorized over the stack; for small k this beats a batched LU solve.
    """
    c, k, _ = L.shape
    X = np.empty(R.shape)
    X[:, 0, :] = R[:, 0, :] / L[:, 0, 0, None]
    for i in range(1, k):
        acc = np.einsum("cj,cjr->cr", L[:, i, :i], X[:, :i, :])
        X[:, i, :] = (R[:, i, :] - acc) / L[:, i, i, None]
    return X
