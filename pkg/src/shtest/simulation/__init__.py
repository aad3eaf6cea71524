from .covariance import CovarianceFactor, CovarianceSpec, CovKind, make_covariance
from .engine import (
    METHODS,
    MethodResult,
    MethodSpec,
    MonteCarloReport,
    ScenarioSpec,
    minmin_score,
    run_scenario,
    simulate_replicate,
)
from .signal import NoiseKind, SignalSpec, add_noise, make_signal, target_norm_sq

__all__ = [
    "METHODS",
    "CovKind",
    "CovarianceFactor",
    "CovarianceSpec",
    "MethodResult",
    "MethodSpec",
    "MonteCarloReport",
    "NoiseKind",
    "ScenarioSpec",
    "SignalSpec",
    "add_noise",
    "make_covariance",
    "make_signal",
    "minmin_score",
    "run_scenario",
    "simulate_replicate",
    "target_norm_sq",
]
