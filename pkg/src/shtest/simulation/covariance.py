"""Covariance models for the simulation study."""

import enum
from dataclasses import dataclass

import numpy as np

from ..core.linalg import cholesky
from ..core.rng import as_generator
from ..errors import ConfigInvalid


class CovKind(str, enum.Enum):
    AR = "ar"
    BLOCK = "block"
    MODEL7 = "model7"
    EQUICORR = "equicorr"
    IDENTITY = "identity"


@dataclass(frozen=True)
class CovarianceSpec:
    """A covariance model on ``p`` dimensions.

    ``rho`` is the AR coefficient, the within-block correlation or the common
    correlation; ``block_size`` applies to BLOCK only, with a shorter last
    block when it does not divide ``p``.
    """

    kind: CovKind
    p: int
    rho: float = 0.0
    block_size: int = None

    def __post_init__(self):
        object.__setattr__(self, "kind", CovKind(self.kind))
        if self.p < 1:
            raise ConfigInvalid(f"p must be positive, got {self.p}")
        if self.kind is CovKind.AR and not abs(self.rho) < 1:
            raise ConfigInvalid(f"AR coefficient must satisfy |rho| < 1, got {self.rho}")
        if self.kind in (CovKind.BLOCK, CovKind.EQUICORR) and not 0 <= self.rho < 1:
            raise ConfigInvalid(f"correlation must lie in [0, 1), got {self.rho}")
        if self.kind is CovKind.BLOCK and (self.block_size is None or self.block_size < 1):
            raise ConfigInvalid("block covariance needs a positive block_size")

    @property
    def is_random(self):
        return self.kind is CovKind.MODEL7


def _model7_base(p):
    lag = np.abs(np.subtract.outer(np.arange(p), np.arange(p))).astype(float)
    with np.errstate(divide="ignore"):
        S = 0.5 * lag**-5.0
    np.fill_diagonal(S, 1.0)
    return S


def _fixed_covariance(spec):
    p = spec.p
    if spec.kind is CovKind.IDENTITY:
        return np.eye(p)
    if spec.kind is CovKind.AR:
        lag = np.abs(np.subtract.outer(np.arange(p), np.arange(p)))
        return spec.rho**lag
    if spec.kind is CovKind.EQUICORR:
        S = np.full((p, p), spec.rho)
        np.fill_diagonal(S, 1.0)
        return S
    if spec.kind is CovKind.BLOCK:
        blocks = np.arange(p) // spec.block_size
        S = np.where(blocks[:, None] == blocks[None, :], spec.rho, 0.0)
        np.fill_diagonal(S, 1.0)
        return S
    return _model7_base(p)


def _model7_scales(p, rng):
    return as_generator(rng).uniform(1.0, 3.0, size=p)


def make_covariance(spec, rng=None):
    """Covariance matrix of the given model.

    Only MODEL7 consumes randomness: its diagonal scales are drawn from
    U[1, 3] with ``rng``.
    """
    S = _fixed_covariance(spec)
    if spec.is_random:
        s = np.sqrt(_model7_scales(spec.p, rng))
        S = s[:, None] * S * s[None, :]
    return S


class CovarianceFactor:
    """Cholesky factor of a covariance model, factorized once and reused.

    For MODEL7 the fixed correlation part is factorized once and each call to
    :meth:`draw` rescales its rows by freshly drawn standard deviations.
    """

    def __init__(self, spec):
        self.spec = spec
        self._chol = cholesky(_fixed_covariance(spec))

    def draw(self, rng=None):
        if self.spec.is_random:
            s = np.sqrt(_model7_scales(self.spec.p, rng))
            return s[:, None] * self._chol
        return self._chol
