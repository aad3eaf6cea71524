from .linalg import (
    as_data_matrix,
    batched_cholesky,
    batched_forward_substitute,
    cholesky,
    column_means,
    pooled_covariance,
    quadratic_form_inv,
)
from .rng import DEFAULT_SEED, RngState, as_generator, mvn_sample
from .special import (
    f_cdf,
    f_sf,
    norm_sf,
    regularized_incomplete_beta,
    t_cdf,
    t_sf,
    t_two_sided_pvalue,
)

__all__ = [
    "DEFAULT_SEED",
    "RngState",
    "as_data_matrix",
    "as_generator",
    "batched_cholesky",
    "batched_forward_substitute",
    "cholesky",
    "column_means",
    "f_cdf",
    "f_sf",
    "mvn_sample",
    "norm_sf",
    "pooled_covariance",
    "quadratic_form_inv",
    "regularized_incomplete_beta",
    "t_cdf",
    "t_sf",
    "t_two_sided_pvalue",
]
