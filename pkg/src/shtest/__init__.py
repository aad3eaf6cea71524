"""Two-sample tests of equal mean vectors in high dimension.

The main entry point is :func:`sh_test`, which combines Hotelling tests on
random subsets of the dimensions with the Simes procedure.
"""

from .baselines import cq_test, lopes_test, sd_test
from .classic import (
    TestOutcome,
    bonferroni,
    hotelling_two_sample,
    marginal_simes_test,
    pooled_t_test,
    simes,
    welch_hotelling,
    welch_t_test,
)
from .errors import ShTestError
from .sh import Combiner, ShConfig, default_b, default_m, psh_test, sample_subset, sh_test, thulin_test

__version__ = "0.1.0"

__all__ = [
    "Combiner",
    "ShConfig",
    "ShTestError",
    "TestOutcome",
    "bonferroni",
    "cq_test",
    "default_b",
    "default_m",
    "hotelling_two_sample",
    "lopes_test",
    "marginal_simes_test",
    "pooled_t_test",
    "psh_test",
    "sample_subset",
    "sd_test",
    "sh_test",
    "simes",
    "thulin_test",
    "welch_hotelling",
    "welch_t_test",
]
