"""Explicit, splittable random state and multivariate normal sampling.

Every random draw in the package flows from an :class:`RngState` value. A state
names a stream of the counter-based Philox generator keyed by ``(seed,
stream)`` through numpy's ``SeedSequence``, so identical states give identical
draws on every platform and independent streams can be derived for replicates,
subsets or workers without coordination. Normal variates come from numpy's
ziggurat sampler (``Generator.standard_normal``).
"""

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, DomainError
from .linalg import cholesky

DEFAULT_SEED = 20180417
_U64 = 2**64


@dataclass(frozen=True)
class RngState:
    seed: int
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not 0 <= int(v) < _U64:
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {v!r}")
            object.__setattr__(self, name, int(v))

    def generator(self):
        """A fresh generator positioned at the start of this stream."""
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.Philox(ss))

    def derive(self, *keys):
        """Child state identified by this state and a path of integer keys."""
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream, *map(int, keys)))
        return RngState(int(ss.generate_state(1, np.uint64)[0]), 0)


def as_generator(rng):
    """Accept an RngState, a Generator, an int seed or None."""
    if isinstance(rng, RngState):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None:
        return RngState(DEFAULT_SEED).generator()
    return RngState(int(rng)).generator()


def mvn_sample(mean, cov, n, rng, *, chol=None):
    """Draw ``n`` i.i.d. rows from N(mean, cov) as ``mean + L z``.

    Parameters
    ----------
    mean : array_like, shape (p,)
    cov : array_like, shape (p, p)
        Ignored when ``chol`` (its lower Cholesky factor) is supplied.
    n : int
    rng : RngState or numpy Generator

    Returns
    -------
    ndarray, shape (n, p)
    """
    mean = np.asarray(mean, dtype=float)
    L = cholesky(cov) if chol is None else np.asarray(chol, dtype=float)
    if L.shape != (mean.shape[0], mean.shape[0]):
        raise DimensionMismatch(f"mean of length {mean.shape[0]} vs covariance {L.shape}")
    z = as_generator(rng).standard_normal((int(n), mean.shape[0]))
    return mean + z @ L.T
