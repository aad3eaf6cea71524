"""Simes-Hotelling random-subset tests.

``sh_test`` draws ``B`` random ``m``-subsets of the ``p`` dimensions, runs a
two-sample Hotelling test on each subset and combines the ``B`` p-values with
Simes (or Bonferroni). ``psh_test`` calibrates the same construction by label
permutation, and ``thulin_test`` averages the subset statistics instead of
combining p-values.

Subsets are drawn independently of each other (a subset may recur). Draw ``i``
consumes row ``i`` of a ``(B, m)`` block of uniforms from the configured
stream, so extending ``B`` never changes earlier draws.
"""

import enum
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import rankdata

from .classic import TestOutcome, _two_samples, simes_along
from .core.linalg import (
    batched_cholesky,
    batched_forward_substitute,
    pooled_scatter_unchecked,
)
from .core.rng import DEFAULT_SEED, RngState, as_generator
from .core.special import f_sf
from .errors import ConfigInvalid, DegenerateDof

# subsets per batched factorization; bounds the gathered (chunk, m, m) block
_CHUNK_ELEMS = 2_000_000

_SUBSET_STREAM = 0
_SHUFFLE_STREAM = 1


class Combiner(str, enum.Enum):
    SIMES = "simes"
    BONFERRONI = "bonferroni"
    MEAN_STAT = "mean_stat"


def default_m(n_total, p):
    """Subset size: half the total sample size, capped by ``p`` and ``n - 2``."""
    return max(1, min(n_total // 2, p, n_total - 2))


def default_b(p):
    """Number of subset draws, ``ceil(p ln p)``."""
    if p < 2:
        return 1
    return math.ceil(p * math.log(p))


@dataclass(frozen=True)
class ShConfig:
    """Parameters of the SH family of tests.

    ``m`` and ``B`` left as ``None`` resolve to :func:`default_m` and
    :func:`default_b` for the data at hand. ``L`` is the permutation count
    used by :func:`psh_test` and :func:`thulin_test`.
    """

    m: int = None
    B: int = None
    L: int = 250
    equal_cov: bool = True
    combiner: Combiner = Combiner.SIMES
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        object.__setattr__(self, "combiner", Combiner(self.combiner))

    def resolve(self, n_total, p):
        """Fill defaults and validate against the data shape."""
        m = default_m(n_total, p) if self.m is None else int(self.m)
        B = default_b(p) if self.B is None else int(self.B)
        if not 1 <= m <= min(p, n_total - 2):
            raise ConfigInvalid(
                f"subset size m={m} must satisfy 1 <= m <= min(p={p}, n-2={n_total - 2})"
            )
        if B < 1:
            raise ConfigInvalid(f"B must be at least 1, got {B}")
        if self.L < 1:
            raise ConfigInvalid(f"L must be at least 1, got {self.L}")
        return replace(self, m=m, B=B)


def draw_subsets(p, m, B, rng):
    """``B`` independent uniform ``m``-subsets of ``range(p)``, each sorted.

    Partial Fisher-Yates shuffle driven by one row of uniforms per draw.
    """
    if not 1 <= m <= p:
        raise ConfigInvalid(f"cannot draw {m} of {p} dimensions")
    U = as_generator(rng).random((B, m))
    perm = np.tile(np.arange(p, dtype=np.intp), (B, 1))
    rows = np.arange(B)
    for j in range(m):
        k = j + np.minimum((U[:, j] * (p - j)).astype(np.intp), p - j - 1)
        tmp = perm[rows, j].copy()
        perm[rows, j] = perm[rows, k]
        perm[rows, k] = tmp
    return np.sort(perm[:, :m], axis=1)


def sample_subset(p, m, rng):
    """One uniform draw of ``m`` distinct sorted indices from ``range(p)``."""
    return draw_subsets(p, m, 1, rng)[0]


def _chunks(B, m):
    step = max(1, _CHUNK_ELEMS // (m * m))
    for s in range(0, B, step):
        yield slice(s, min(B, s + step))


def _pooled_subset_pvalues(X, Y, idx):
    nx, ny = X.shape[0], Y.shape[0]
    n, m = nx + ny, idx.shape[1]
    S = pooled_scatter_unchecked(X, Y)
    d = X.mean(axis=0) - Y.mean(axis=0)
    q = np.empty(idx.shape[0])
    for sl in _chunks(idx.shape[0], m):
        ii = idx[sl]
        L = batched_cholesky(S[ii[:, :, None], ii[:, None, :]])
        z = batched_forward_substitute(L, d[ii][:, :, None])[:, :, 0]
        q[sl] = np.einsum("ij,ij->i", z, z)
    t2 = (n - m - 1) / ((n - 2) * m) * (nx * ny / n) * q
    return t2, np.asarray(f_sf(t2, m, n - m - 1), dtype=float).reshape(t2.shape), None


def _welch_subset_pvalues(X, Y, idx):
    nx, ny = X.shape[0], Y.shape[0]
    m = idx.shape[1]
    Zx = X - X.mean(axis=0)
    Zy = Y - Y.mean(axis=0)
    cx, cy = (nx - 1) * nx, (ny - 1) * ny
    V = Zx.T @ Zx / cx + Zy.T @ Zy / cy
    d = X.mean(axis=0) - Y.mean(axis=0)
    B = idx.shape[0]
    t2 = np.empty(B)
    tr_x = np.empty(B)
    tr2_x = np.empty(B)
    for sl in _chunks(B, m):
        ii = idx[sl]
        L = batched_cholesky(V[ii[:, :, None], ii[:, None, :]])
        z = batched_forward_substitute(L, d[ii][:, :, None])[:, :, 0]
        t2[sl] = np.einsum("ij,ij->i", z, z)
        # W = L^-1 Zx_S'; L^-1 Vx_S L^-T = W W' / cx
        W = batched_forward_substitute(L, np.transpose(Zx[:, ii], (1, 2, 0)))
        G = W @ np.transpose(W, (0, 2, 1)) / cx
        tr_x[sl] = np.einsum("ckk->c", G)
        tr2_x[sl] = np.einsum("ckl,ckl->c", G, G)
    # L^-1 (Vx + Vy) L^-T = I, so the Y-side traces follow from the X side
    tr_y = m - tr_x
    tr2_y = m - 2.0 * tr_x + tr2_x
    nu = (m + m * m) / ((tr2_x + tr_x**2) / (nx - 1) + (tr2_y + tr_y**2) / (ny - 1))
    df2 = nu - m + 1
    if np.any(~(df2 > 0)):
        raise DegenerateDof("nu - m + 1 is not positive for some subset")
    f = t2 * df2 / (nu * m)
    return t2, np.asarray(f_sf(f, m, df2), dtype=float).reshape(t2.shape), nu


def subset_pvalues(X, Y, idx, equal_cov=True):
    """Hotelling statistics and p-values for each row of subset indices ``idx``.

    Returns ``(statistics, p_values, nu)``; ``nu`` is ``None`` for the pooled
    test and the per-subset degrees of freedom for the unequal-covariance one.
    """
    X, Y = _two_samples(X, Y)
    idx = np.atleast_2d(np.asarray(idx, dtype=np.intp))
    if equal_cov:
        return _pooled_subset_pvalues(X, Y, idx)
    return _welch_subset_pvalues(X, Y, idx)


def _combine(pvals, combiner):
    if combiner is Combiner.SIMES:
        return float(simes_along(pvals))
    if combiner is Combiner.BONFERRONI:
        return float(min(1.0, pvals.size * pvals.min()))
    raise ConfigInvalid(f"combiner {combiner.value} is not a p-value combiner")


def sh_test(X, Y, cfg=None):
    """Simes-Hotelling test of equal mean vectors, usable when p > n.

    Parameters
    ----------
    X, Y : array_like, shapes (n_X, p) and (n_Y, p)
    cfg : ShConfig, optional
        Subset size, number of draws, covariance model, combiner and seed.

    Returns
    -------
    TestOutcome
        ``statistic`` and ``p_value`` both hold the combined p-value;
        ``extras`` records ``m``, ``B`` and the smallest subset p-value.
    """
    X, Y = _two_samples(X, Y)
    cfg = (cfg or ShConfig()).resolve(X.shape[0] + Y.shape[0], X.shape[1])
    if cfg.combiner is Combiner.MEAN_STAT:
        raise ConfigInvalid("sh_test combines p-values; use thulin_test for mean_stat")
    idx = draw_subsets(X.shape[1], cfg.m, cfg.B, RngState(cfg.seed, _SUBSET_STREAM))
    _, pv, _ = subset_pvalues(X, Y, idx, cfg.equal_cov)
    combined = _combine(pv, cfg.combiner)
    name = "sh" if cfg.equal_cov else "sh_welch"
    extras = {"m": float(cfg.m), "B": float(cfg.B), "min_p": float(pv.min())}
    return TestOutcome(name, combined, combined, None, extras)


def _permutation_statistics(X, Y, idx, L, rng):
    """Subset Hotelling statistics under the observed and ``L`` shuffled labelings.

    Column 0 of the returned ``(B, L + 1)`` array is the observed labeling.
    The total scatter of the pooled sample does not depend on the labels, so
    each subset is factorized once and the within-group form follows from
    ``d' W^-1 d = r / (1 - c r)`` with ``r = d' T^-1 d`` and
    ``c = n_X n_Y / n``.
    """
    nx, ny = X.shape[0], Y.shape[0]
    n, m = nx + ny, idx.shape[1]
    A = np.vstack([X, Y])
    A = A - A.mean(axis=0)
    T = A.T @ A
    gen = as_generator(rng)
    labels = np.empty((n, L + 1))
    base = np.r_[np.full(nx, 1.0 / nx), np.full(ny, -1.0 / ny)]
    labels[:, 0] = base
    for j in range(1, L + 1):
        labels[:, j] = base[gen.permutation(n)]
    D = A.T @ labels  # (p, L+1) mean differences
    c = nx * ny / n
    B = idx.shape[0]
    r = np.empty((B, L + 1))
    step = max(1, _CHUNK_ELEMS // (m * max(m, L + 1)))
    for s in range(0, B, step):
        ii = idx[s : s + step]
        Lc = batched_cholesky(T[ii[:, :, None], ii[:, None, :]])
        U = batched_forward_substitute(Lc, D[ii])
        r[s : s + step] = np.einsum("cij,cij->cj", U, U)
    q = (n - 2) * r / (1.0 - c * r)
    return (n - m - 1) / ((n - 2) * m) * c * q


def _check_permutation_cfg(X, Y, cfg):
    X, Y = _two_samples(X, Y)
    cfg = (cfg or ShConfig()).resolve(X.shape[0] + Y.shape[0], X.shape[1])
    if not cfg.equal_cov:
        raise ConfigInvalid("permutation tests use the pooled statistic (equal_cov=True)")
    return X, Y, cfg


def psh_test(X, Y, cfg=None):
    """Permutation calibration of the Simes-Hotelling test.

    Each subset statistic gets a permutation p-value against its own ``L + 1``
    labelings, the per-labeling p-values are combined across subsets with the
    configured combiner, and the observed combination is ranked among all
    ``L + 1`` combinations. Exact under exchangeability of the pooled rows.
    """
    X, Y, cfg = _check_permutation_cfg(X, Y, cfg)
    if cfg.combiner is Combiner.MEAN_STAT:
        raise ConfigInvalid("psh_test combines p-values; use thulin_test for mean_stat")
    idx = draw_subsets(X.shape[1], cfg.m, cfg.B, RngState(cfg.seed, _SUBSET_STREAM))
    T2 = _permutation_statistics(X, Y, idx, cfg.L, RngState(cfg.seed, _SHUFFLE_STREAM))
    L1 = cfg.L + 1
    # P[i, j] = #{k : T[i, k] >= T[i, j]} / (L + 1)
    P = rankdata(-T2, method="max", axis=1) / L1
    if cfg.combiner is Combiner.SIMES:
        comb = simes_along(P, axis=0)
    else:
        comb = np.minimum(1.0, P.shape[0] * P.min(axis=0))
    p_perm = float(np.count_nonzero(comb[0] >= comb) / L1)
    extras = {
        "m": float(cfg.m),
        "B": float(cfg.B),
        "L": float(cfg.L),
        "combined_observed": float(comb[0]),
    }
    return TestOutcome("psh", float(comb[0]), p_perm, None, extras)


def thulin_test(X, Y, cfg=None):
    """Permutation test of the mean subset Hotelling statistic.

    The same ``B`` subsets are reused under every shuffle;
    ``p = (1 + #{shuffles with statistic >= observed}) / (L + 1)``.
    """
    X, Y, cfg = _check_permutation_cfg(X, Y, cfg)
    idx = draw_subsets(X.shape[1], cfg.m, cfg.B, RngState(cfg.seed, _SUBSET_STREAM))
    T2 = _permutation_statistics(X, Y, idx, cfg.L, RngState(cfg.seed, _SHUFFLE_STREAM))
    stat = T2.mean(axis=0)
    p = (1 + np.count_nonzero(stat[1:] >= stat[0])) / (cfg.L + 1)
    extras = {"m": float(cfg.m), "B": float(cfg.B), "L": float(cfg.L)}
    return TestOutcome("thulin", float(stat[0]), float(p), None, extras)
