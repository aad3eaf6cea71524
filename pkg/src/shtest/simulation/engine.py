"""Monte Carlo engine for rejection rates and the min-min score.

Replicate ``r`` of a run with master seed ``s`` draws everything from
``RngState(s, r)`` and sub-streams derived from it, so results do not depend
on how replicates are split across worker processes.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..baselines import cq_test, lopes_test, sd_test
from ..classic import hotelling_two_sample, marginal_simes_test, welch_hotelling
from ..core.rng import DEFAULT_SEED, RngState
from ..errors import ConfigInvalid, DegenerateScenario, ReplicateFailed, ShTestError
from ..sh import Combiner, ShConfig, psh_test, sh_test, thulin_test
from .covariance import CovarianceFactor, CovarianceSpec
from .signal import NoiseKind, SignalSpec, add_noise, make_signal

METHODS = ("hotelling", "welch_hotelling", "simes", "sh", "psh", "thulin", "sd", "cq", "lopes")

# sub-stream keys within a replicate
_COV, _SIGNAL, _X, _Y, _NOISE_X, _NOISE_Y = range(6)
_TEST_BASE = 100


@dataclass(frozen=True)
class ScenarioSpec:
    """One cell of a simulation grid.

    Group X has mean ``make_signal(signal)`` (zero when ``signal`` is None)
    and group Y mean zero. With ``equal_cov_groups`` False the group-X
    covariance is multiplied by ``scale_factor_group1``.
    """

    n_x: int
    n_y: int
    cov: CovarianceSpec
    signal: SignalSpec = None
    noise: NoiseKind = NoiseKind.NONE
    equal_cov_groups: bool = True
    scale_factor_group1: float = 2.0
    scenario_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "noise", NoiseKind(self.noise or NoiseKind.NONE))
        if self.n_x < 2 or self.n_y < 2:
            raise ConfigInvalid(f"each group needs at least 2 observations ({self.n_x}, {self.n_y})")
        if self.signal is not None and self.signal.p != self.cov.p:
            raise ConfigInvalid(f"signal has p={self.signal.p} but covariance p={self.cov.p}")
        if not self.scale_factor_group1 > 0:
            raise ConfigInvalid("scale_factor_group1 must be positive")

    @property
    def p(self):
        return self.cov.p


@dataclass(frozen=True)
class MethodSpec:
    """A test to run in every replicate, with its tuning parameters.

    ``m`` may be an integer or one of ``"n/2"``, ``"n/4"`` (fractions of the
    total sample size). ``k`` is the Lopes projection dimension.
    """

    method: str
    label: str = None
    m: object = None
    B: int = None
    L: int = 250
    k: int = None
    equal_cov: bool = True
    combiner: str = "simes"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigInvalid(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        if self.label is None:
            object.__setattr__(self, "label", self.method)
        if isinstance(self.m, str) and self.m not in ("n/2", "n/4"):
            raise ConfigInvalid(f"m must be an integer, 'n/2' or 'n/4', got {self.m!r}")

    def resolve_m(self, n_total, p):
        if self.m is None or self.m == "n/2":
            return None
        if self.m == "n/4":
            return max(1, min(n_total // 4, p, n_total - 2))
        return int(self.m)

    def run(self, X, Y, state):
        """Apply the test to ``(X, Y)`` drawing any randomness from ``state``."""
        n, p = X.shape[0] + Y.shape[0], X.shape[1]
        if self.method == "hotelling":
            return hotelling_two_sample(X, Y)
        if self.method == "welch_hotelling":
            return welch_hotelling(X, Y)
        if self.method == "simes":
            return marginal_simes_test(X, Y, equal_var=self.equal_cov)
        if self.method == "sd":
            return sd_test(X, Y)
        if self.method == "cq":
            return cq_test(X, Y)
        if self.method == "lopes":
            return lopes_test(X, Y, self.k, state)
        cfg = ShConfig(
            m=self.resolve_m(n, p),
            B=self.B,
            L=self.L,
            equal_cov=self.equal_cov,
            combiner=Combiner(self.combiner),
            seed=state.seed,
        )
        if self.method == "sh":
            return sh_test(X, Y, cfg)
        if self.method == "psh":
            return psh_test(X, Y, cfg)
        return thulin_test(X, Y, cfg)


@dataclass(frozen=True)
class MethodResult:
    label: str
    rejection_rate: float
    se: float
    reps: int
    statistic_mean: float
    p_values: np.ndarray = field(repr=False, compare=False)


@dataclass(frozen=True)
class MonteCarloReport:
    scenario: ScenarioSpec
    alpha: float
    seed: int
    reps: int
    results: dict

    def __getitem__(self, label):
        return self.results[label]

    def rates(self):
        return {k: v.rejection_rate for k, v in self.results.items()}


def simulate_replicate(scn, r, seed, factor=None):
    """Data ``(X, Y)`` of replicate ``r``."""
    state = RngState(seed, r)
    factor = factor or CovarianceFactor(scn.cov)
    L = factor.draw(state.derive(_COV))
    p = scn.p
    mu = np.zeros(p) if scn.signal is None else make_signal(scn.signal, state.derive(_SIGNAL))
    zx = state.derive(_X).generator().standard_normal((scn.n_x, p))
    zy = state.derive(_Y).generator().standard_normal((scn.n_y, p))
    scale_x = 1.0 if scn.equal_cov_groups else math.sqrt(scn.scale_factor_group1)
    X = mu + scale_x * (zx @ L.T)
    Y = zy @ L.T
    X = add_noise(X, scn.noise, state.derive(_NOISE_X))
    Y = add_noise(Y, scn.noise, state.derive(_NOISE_Y))
    return X, Y


def _run_block(scn, methods, seed, start, stop):
    factor = CovarianceFactor(scn.cov)
    stats = np.empty((len(methods), stop - start))
    pvals = np.empty((len(methods), stop - start))
    for r in range(start, stop):
        X, Y = simulate_replicate(scn, r, seed, factor)
        state = RngState(seed, r)
        for i, ms in enumerate(methods):
            try:
                out = ms.run(X, Y, state.derive(_TEST_BASE + i))
            except (ShTestError, ArithmeticError, ValueError) as exc:
                raise ReplicateFailed(r, ms.label, exc) from exc
            stats[i, r - start] = out.statistic
            pvals[i, r - start] = out.p_value
    return stats, pvals


def run_scenario(scn, methods, reps, alpha=0.05, seed=DEFAULT_SEED, workers=1):
    """Estimate rejection rates of ``methods`` under ``scn``.

    Parameters
    ----------
    scn : ScenarioSpec
    methods : sequence of MethodSpec
        Labels must be unique; every test sees the same data in a replicate.
    reps : int
    alpha : float
        A replicate rejects when its p-value is at most ``alpha``.
    seed : int
    workers : int
        Worker processes. The report does not depend on this value.

    Raises
    ------
    ReplicateFailed
        If any test raises on any replicate.
    """
    methods = list(methods)
    labels = [m.label for m in methods]
    if len(set(labels)) != len(labels):
        raise ConfigInvalid(f"duplicate method labels: {labels}")
    if reps < 1:
        raise ConfigInvalid("reps must be at least 1")
    if not 0 < alpha < 1:
        raise ConfigInvalid(f"alpha must lie in (0, 1), got {alpha}")
    workers = max(1, min(int(workers), reps))
    if workers == 1:
        stats, pvals = _run_block(scn, methods, seed, 0, reps)
    else:
        bounds = np.linspace(0, reps, workers + 1).astype(int)
        with ProcessPoolExecutor(workers) as pool:
            futs = [
                pool.submit(_run_block, scn, methods, seed, int(a), int(b))
                for a, b in zip(bounds[:-1], bounds[1:])
            ]
            parts = [f.result() for f in futs]
        stats = np.concatenate([s for s, _ in parts], axis=1)
        pvals = np.concatenate([p for _, p in parts], axis=1)
    results = {}
    for i, lab in enumerate(labels):
        rate = float(np.mean(pvals[i] <= alpha))
        results[lab] = MethodResult(
            lab, rate, math.sqrt(rate * (1 - rate) / reps), reps, float(np.mean(stats[i])), pvals[i]
        )
    return MonteCarloReport(scn, alpha, seed, reps, results)


def minmin_score(power):
    """Worst-case power ratio to the best method, per method.

    ``power`` has methods in rows and scenarios in columns.
    """
    power = np.asarray(power, dtype=float)
    if power.ndim != 2 or power.size == 0:
        raise ConfigInvalid("power must be a non-empty methods x scenarios matrix")
    best = power.max(axis=0)
    if np.any(~(best > 0)):
        raise DegenerateScenario(f"scenario columns {np.flatnonzero(~(best > 0)).tolist()} have zero power")
    return (power / best).min(axis=1)
