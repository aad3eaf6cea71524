import math

import numpy as np
import pytest
from scipy import stats

from shtest.baselines import cq_test, default_k, lopes_test, sd_test
from shtest.classic import hotelling_two_sample
from shtest.core.rng import RngState
from shtest.errors import ConfigInvalid, InsufficientSamples, ZeroVariance


def _data(seed, nx, ny, p, shift=0.0):
    g = RngState(seed).generator()
    return g.standard_normal((nx, p)) + shift, g.standard_normal((ny, p))


def _sd_oracle(X, Y):
    nx, ny = len(X), len(Y)
    p = X.shape[1]
    N = nx + ny - 2
    S = ((nx - 1) * np.cov(X, rowvar=False) + (ny - 1) * np.cov(Y, rowvar=False)) / N
    Dinv = np.diag(1 / np.diag(S))
    R = np.sqrt(Dinv) @ S @ np.sqrt(Dinv)
    tr_r2 = np.trace(R @ R)
    d = X.mean(0) - Y.mean(0)
    tau = nx * ny / (nx + ny)
    c = 1 + tr_r2 / p**1.5
    return (tau * d @ Dinv @ d - N * p / (N - 2)) / math.sqrt(2 * (tr_r2 - p * p / N) * c)


def test_sd_matches_direct_formula():
    X, Y = _data(1, 9, 12, 30, 0.2)
    out = sd_test(X, Y)
    assert out.statistic == pytest.approx(_sd_oracle(X, Y), rel=1e-10)
    assert out.p_value == pytest.approx(stats.norm.sf(out.statistic), rel=1e-12)


def test_sd_no_signal_is_negative():
    X, _ = _data(2, 10, 10, 25)
    out = sd_test(X, X[::-1])
    assert out.statistic < 0 and out.p_value > 0.5


def test_sd_identity_trace():
    X, Y = _data(3, 1000, 1000, 5)
    N = 1998
    # E tr(R^2) = p + p(p - 1)/N for independent columns
    assert sd_test(X, Y).extras["tr_r2"] == pytest.approx(5 + 20 / N, abs=0.05)


def test_sd_column_scale_invariance():
    X, Y = _data(4, 8, 10, 12, 0.3)
    c = np.ones(12)
    c[3] = 17.0
    assert sd_test(X * c, Y * c).statistic == pytest.approx(sd_test(X, Y).statistic, rel=1e-10)


def test_sd_errors():
    X, Y = _data(5, 5, 5, 4)
    X[:, 2] = 1.0
    Y[:, 2] = 1.0
    with pytest.raises(ZeroVariance):
        sd_test(X, Y)


def _cq_oracle(X, Y):
    n1, n2 = len(X), len(Y)
    wx = sum(X[i] @ X[j] for i in range(n1) for j in range(n1) if i != j) / (n1 * (n1 - 1))
    wy = sum(Y[i] @ Y[j] for i in range(n2) for j in range(n2) if i != j) / (n2 * (n2 - 1))
    cr = sum(X[i] @ Y[j] for i in range(n1) for j in range(n2)) / (n1 * n2)
    t = wx + wy - 2 * cr

    def tr_sq(Z):
        n = len(Z)
        acc = 0.0
        for j in range(n):
            for k in range(n):
                if j == k:
                    continue
                keep = [i for i in range(n) if i not in (j, k)]
                m = Z[keep].mean(0)
                acc += ((Z[j] - m) @ Z[k]) * ((Z[k] - m) @ Z[j])
        return acc / (n * (n - 1))

    acc = 0.0
    for l in range(n1):
        mx = np.delete(X, l, 0).mean(0)
        for k in range(n2):
            my = np.delete(Y, k, 0).mean(0)
            acc += ((X[l] - mx) @ Y[k]) * ((Y[k] - my) @ X[l])
    cross = acc / (n1 * n2)
    var = 2 / (n1 * (n1 - 1)) * tr_sq(X) + 2 / (n2 * (n2 - 1)) * tr_sq(Y) + 4 / (n1 * n2) * cross
    return t, var


def test_cq_matches_loop_oracle():
    X, Y = _data(6, 7, 9, 5, 0.3)
    t, var = _cq_oracle(X, Y)
    out = cq_test(X, Y)
    assert out.statistic == pytest.approx(t, rel=1e-10)
    assert out.extras["var"] == pytest.approx(var, rel=1e-10)
    assert out.extras["z"] == pytest.approx(t / math.sqrt(var), rel=1e-10)
    assert out.p_value == pytest.approx(stats.norm.sf(t / math.sqrt(var)), rel=1e-10)


def test_cq_shift_invariance():
    X, Y = _data(7, 8, 8, 20, 0.2)
    v = np.linspace(-3, 3, 20)
    assert cq_test(X + v, Y + v).statistic == pytest.approx(cq_test(X, Y).statistic, rel=1e-9)


def test_cq_duplicate_sample_near_zero():
    X, _ = _data(8, 12, 12, 40)
    out = cq_test(X, X[::-1])
    assert abs(out.statistic) < 3 * math.sqrt(out.extras["var"])


def test_cq_unbiased():
    mu = np.zeros(10)
    mu[:3] = [0.5, -0.3, 0.4]
    target = float(mu @ mu)
    ts = []
    for r in range(2000):
        g = RngState(9, r).generator()
        ts.append(cq_test(g.standard_normal((10, 10)) + mu, g.standard_normal((12, 10))).statistic)
    ts = np.asarray(ts)
    assert abs(ts.mean() - target) < 3 * ts.std(ddof=1) / math.sqrt(len(ts))


def test_cq_errors():
    X, Y = _data(10, 3, 6, 5)
    with pytest.raises(InsufficientSamples):
        cq_test(X, Y)


def test_lopes_basic():
    X, Y = _data(11, 10, 10, 30)
    out = lopes_test(X, X, 5, RngState(1))
    assert out.statistic == 0.0 and out.p_value == 1.0
    assert lopes_test(X, Y, 5, RngState(2)) == lopes_test(X, Y, 5, RngState(2))
    assert lopes_test(X, Y).df == (10.0, 9.0)
    assert default_k(40, 600) == 20 and default_k(40, 8) == 8
    with pytest.raises(ConfigInvalid):
        lopes_test(X, Y, 19, RngState(1))
    with pytest.raises(ConfigInvalid):
        lopes_test(X, Y, 0, RngState(1))


def test_lopes_full_projection_is_hotelling():
    # an invertible p x p projection leaves the Hotelling statistic unchanged
    X, Y = _data(12, 10, 12, 4, 0.3)
    h = hotelling_two_sample(X, Y)
    out = lopes_test(X, Y, 4, RngState(3))
    assert out.p_value == pytest.approx(h.p_value, rel=1e-9)


def test_lopes_null_uniform():
    pv, ph = [], []
    for r in range(1000):
        g = RngState(13, r).generator()
        X, Y = g.standard_normal((10, 6)), g.standard_normal((10, 6))
        pv.append(lopes_test(X, Y, 3, RngState(14, r)).p_value)
        ph.append(hotelling_two_sample(X, Y).p_value)
    assert stats.kstest(pv, "uniform").statistic < 0.05
    assert stats.ks_2samp(pv, ph).statistic < 0.07
