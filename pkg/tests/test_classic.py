import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from shtest.classic import (
    bonferroni,
    hotelling_two_sample,
    marginal_simes_test,
    pooled_t_test,
    simes,
    welch_hotelling,
    welch_t_test,
)
from shtest.core.rng import RngState
from shtest.core.special import f_sf
from shtest.errors import (
    DimensionMismatch,
    DomainError,
    EmptyInput,
    InsufficientSamples,
    SingularCovariance,
    ZeroVariance,
)
from shtest.simulation import CovarianceSpec, make_covariance

# two-sided t p-value at t = sqrt(1.5), df 4, from quadrature of the t density
P_T_SQRT15_DF4 = 0.2878641347266906


def _ar(p, rho):
    return make_covariance(CovarianceSpec("ar", p, rho))


def test_hotelling_scalar_example():
    out = hotelling_two_sample([0.0, 1.0, 2.0], [1.0, 2.0, 3.0])
    assert out.statistic == pytest.approx(1.5, rel=1e-14)
    assert out.p_value == pytest.approx(P_T_SQRT15_DF4, abs=1e-10)
    assert out.df == (1.0, 4.0)


def test_hotelling_identical_samples(rng):
    X = rng.standard_normal((10, 3))
    out = hotelling_two_sample(X, X)
    assert out.statistic == 0.0
    assert out.p_value == 1.0


def test_hotelling_explicit_inverse_oracle(rng):
    X, Y = rng.standard_normal((22, 3)), rng.standard_normal((18, 3)) + 0.3
    nx, ny, p = 22, 18, 3
    n = nx + ny
    S = (np.cov(X, rowvar=False) * (nx - 1) + np.cov(Y, rowvar=False) * (ny - 1)) / (n - 2)
    d = X.mean(0) - Y.mean(0)
    ref = (n - p - 1) / ((n - 2) * p) * nx * ny / n * d @ np.linalg.inv(S) @ d
    out = hotelling_two_sample(X, Y)
    assert out.statistic == pytest.approx(ref, rel=1e-10)
    assert out.p_value == pytest.approx(f_sf(ref, p, n - p - 1), rel=1e-12)
    assert out.p_value == pytest.approx(stats.f.sf(ref, p, n - p - 1), rel=1e-9)


def test_hotelling_affine_invariance(rng):
    X, Y = rng.standard_normal((15, 3)), rng.standard_normal((12, 3))
    A = rng.standard_normal((3, 3)) + 2 * np.eye(3)
    a = hotelling_two_sample(X, Y).statistic
    b = hotelling_two_sample(X @ A.T + 1.0, Y @ A.T + 1.0).statistic
    assert b == pytest.approx(a, rel=1e-8)


def test_hotelling_p1_is_squared_t(rng):
    x, y = rng.standard_normal(9), rng.standard_normal(14)
    t = pooled_t_test(x, y).statistic
    assert hotelling_two_sample(x, y).statistic == pytest.approx(t * t, rel=1e-12)


def test_hotelling_delta_offset(rng):
    X, Y = rng.standard_normal((20, 2)) + [1.0, -2.0], rng.standard_normal((20, 2))
    shifted = hotelling_two_sample(X, Y, delta=[1.0, -2.0])
    direct = hotelling_two_sample(X - [1.0, -2.0], Y)
    assert shifted.statistic == direct.statistic


def test_hotelling_errors(rng):
    with pytest.raises(DimensionMismatch):
        hotelling_two_sample(rng.standard_normal((5, 2)), rng.standard_normal((5, 3)))
    with pytest.raises(InsufficientSamples):
        hotelling_two_sample(rng.standard_normal((3, 5)), rng.standard_normal((3, 5)))


def test_hotelling_null_uniform():
    L = np.linalg.cholesky(_ar(4, 0.5))
    pv = []
    for r in range(2000):
        g = RngState(77, r).generator()
        pv.append(hotelling_two_sample(g.standard_normal((12, 4)) @ L.T, g.standard_normal((10, 4)) @ L.T).p_value)
    assert stats.kstest(pv, "uniform").statistic < 0.04


def test_pooled_t_examples(rng):
    out = pooled_t_test([0, 1, 2], [1, 2, 3])
    assert out.statistic == pytest.approx(-1.224744871391589, rel=1e-12)
    assert out.p_value == pytest.approx(P_T_SQRT15_DF4, abs=1e-10)
    x, y = rng.standard_normal(8), rng.standard_normal(11)
    assert pooled_t_test(x, x).p_value == 1.0
    assert pooled_t_test(3.5 * x, 3.5 * y).p_value == pytest.approx(pooled_t_test(x, y).p_value, rel=1e-12)
    ref = stats.ttest_ind(x, y)
    assert pooled_t_test(x, y).p_value == pytest.approx(ref.pvalue, rel=1e-10)
    with pytest.raises(ZeroVariance):
        pooled_t_test([1.0, 1.0], [2.0, 2.0])


def test_welch_t(rng):
    x, y = rng.standard_normal(8), 2 * rng.standard_normal(13)
    out = welch_t_test(x, y)
    vx, vy = x.var(ddof=1) / 8, y.var(ddof=1) / 13
    ws = (vx + vy) ** 2 / (vx**2 / 7 + vy**2 / 12)
    assert out.df[0] == pytest.approx(ws, rel=1e-12)
    assert out.p_value == pytest.approx(stats.ttest_ind(x, y, equal_var=False).pvalue, rel=1e-10)
    assert welch_t_test(x, x).p_value == 1.0
    z = rng.standard_normal(8)
    w = z[::-1] + 1.0  # same variance, same size
    assert welch_t_test(z, w).statistic == pytest.approx(pooled_t_test(z, w).statistic, rel=1e-12)


def test_welch_hotelling_p1_matches_welch_t(rng):
    x, y = rng.standard_normal(9), 3 * rng.standard_normal(16)
    out = welch_hotelling(x, y)
    w = welch_t_test(x, y)
    assert out.statistic == pytest.approx(w.statistic**2, rel=1e-12)
    assert out.extras["nu"] == pytest.approx(w.df[0], rel=1e-10)
    assert out.p_value == pytest.approx(w.p_value, rel=1e-10)


def test_welch_hotelling_equal_contributions(rng):
    # Y rows are a copy of X rows: identical covariance estimates, equal sizes
    X = rng.standard_normal((15, 3))
    out = welch_hotelling(X, X[::-1] + 0.1)
    n0 = 15
    assert out.extras["nu"] == pytest.approx(4.0 / (2.0 / (n0 - 1)), rel=1e-10)


def test_welch_hotelling_zero_difference(rng):
    X = rng.standard_normal((10, 2))
    out = welch_hotelling(X, X)
    assert out.statistic == 0.0 and out.p_value == 1.0


def test_welch_hotelling_rank_deficient(rng):
    # n_X + n_Y - 2 < p: the summed mean covariance cannot be factorized
    with pytest.raises(SingularCovariance):
        welch_hotelling(rng.standard_normal((3, 6)), rng.standard_normal((3, 6)))


def test_simes_examples():
    assert simes([0.04, 0.01, 0.03]) == pytest.approx(0.03, abs=1e-15)
    assert simes([0.37]) == 0.37
    with pytest.raises(EmptyInput):
        simes([])
    with pytest.raises(DomainError):
        simes([0.2, 1.5])
    assert bonferroni([0.04, 0.01, 0.03]) == pytest.approx(0.03)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=30), st.randoms(use_true_random=False))
def test_simes_bounds_and_order(p, r):
    s = simes(p)
    assert min(p) - 1e-15 <= s <= len(p) * min(p) + 1e-15
    q = list(p)
    r.shuffle(q)
    assert simes(q) == s


def test_simes_uniform_under_independence():
    U = RngState(5).generator().random((10000, 20))
    s = np.array([simes(u) for u in U])
    assert abs(np.mean(s <= 0.05) - 0.05) < 0.007


def test_marginal_simes(rng):
    x, y = rng.standard_normal(10), rng.standard_normal(12)
    assert marginal_simes_test(x, y).p_value == pytest.approx(pooled_t_test(x, y).p_value, rel=1e-14)
    assert marginal_simes_test(x, y, equal_var=False).p_value == pytest.approx(
        welch_t_test(x, y).p_value, rel=1e-14
    )
    X = rng.standard_normal((10, 4))
    assert marginal_simes_test(X, X).p_value == 1.0


def test_marginal_simes_null_level():
    rej = 0
    for r in range(2000):
        g = RngState(91, r).generator()
        rej += marginal_simes_test(g.standard_normal((15, 50)), g.standard_normal((15, 50))).p_value <= 0.05
    assert 0.035 <= rej / 2000 <= 0.065
