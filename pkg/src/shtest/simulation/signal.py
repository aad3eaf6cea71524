"""Mean-shift signals and marginal noise for the simulation study."""

import enum
import math
from dataclasses import dataclass

import numpy as np

from ..core.rng import as_generator
from ..errors import ConfigInvalid

N_GROUPS = 5


class NoiseKind(str, enum.Enum):
    NONE = "none"
    LAPLACE = "laplace"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class SignalSpec:
    """Sparse mean shift on ``p`` dimensions.

    ``beta`` is the proportion of null dimensions and ``norm_sq`` the squared
    Euclidean norm of the shift. With ``seed`` set the nonzero positions are
    fixed by it; otherwise they are redrawn from the caller's stream.
    """

    p: int
    beta: float
    norm_sq: float
    seed: int = None

    def __post_init__(self):
        if self.p < 1:
            raise ConfigInvalid(f"p must be positive, got {self.p}")
        if not 0 <= self.beta <= 1:
            raise ConfigInvalid(f"beta must lie in [0, 1], got {self.beta}")
        if not self.norm_sq > 0:
            raise ConfigInvalid(f"norm_sq must be positive, got {self.norm_sq}")
        if (1 - self.beta) * self.p < N_GROUPS:
            raise ConfigInvalid(
                f"(1 - beta) p = {(1 - self.beta) * self.p:g} leaves fewer than {N_GROUPS} signal dimensions"
            )

    @property
    def n_nonzero(self):
        """(1 - beta) p rounded to the nearest multiple of 5 (at least 5)."""
        k = N_GROUPS * int(math.floor((1 - self.beta) * self.p / N_GROUPS + 0.5))
        return min(max(k, N_GROUPS), N_GROUPS * (self.p // N_GROUPS))

    @property
    def level(self):
        """Largest entry ``L``; entries are ``i L / 5`` for i = 1..5."""
        return math.sqrt(25.0 * self.norm_sq / (11.0 * self.n_nonzero))


def make_signal(spec, rng=None):
    """Mean-shift vector of ``spec``.

    The nonzero entries form five equal groups with values ``L/5, 2L/5, ...,
    L`` at uniformly random positions, scaled so the squared norm equals
    ``spec.norm_sq``.
    """
    k = spec.n_nonzero
    gen = as_generator(spec.seed if spec.seed is not None else rng)
    pos = gen.permutation(spec.p)[:k]
    values = np.repeat(np.arange(1, N_GROUPS + 1) * spec.level / N_GROUPS, k // N_GROUPS)
    mu = np.zeros(spec.p)
    mu[pos] = values
    return mu


def target_norm_sq(n_x, n_y, factor=2.5):
    """Signal strength ``factor * sqrt(40 / (n_x + n_y))``."""
    if n_x + n_y < 1:
        raise ConfigInvalid("need at least one observation")
    return factor * math.sqrt(40.0 / (n_x + n_y))


def add_noise(X, kind, rng=None):
    """Add unit-variance i.i.d. noise to every entry of ``X``.

    Laplace noise has scale ``1/sqrt(2)``; exponential noise is ``Exp(1) - 1``.
    Both are centred, so each marginal variance rises by exactly one.
    """
    kind = NoiseKind(kind if kind is not None else NoiseKind.NONE)
    X = np.asarray(X, dtype=float)
    if kind is NoiseKind.NONE:
        return X
    gen = as_generator(rng)
    if kind is NoiseKind.LAPLACE:
        return X + gen.laplace(0.0, 1.0 / math.sqrt(2.0), size=X.shape)
    return X + (gen.standard_exponential(size=X.shape) - 1.0)
