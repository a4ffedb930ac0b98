import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special, stats

from wignertails.limit_laws import Interval, frechet_cdf
from wignertails.stat_tests import (
    EcdfSample,
    coarse_independence_tv,
    count_in_intervals,
    kolmogorov_sf,
    ks_distance,
    ks_statistic,
    pairwise_count_correlation,
    poisson_count_test,
)


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def _uniform_cdf(x):
    return np.clip(x, 0.0, 1.0)


def test_single_point_distance():
    assert ks_distance([0.5], _uniform_cdf) == 0.5
    assert ks_statistic(np.full(10, 0.5), _uniform_cdf)[0] == 0.5


def test_exact_quantiles():
    r = 100
    xs = (np.arange(1, r + 1) - 0.5) / r
    d, p = ks_statistic(xs, _uniform_cdf)
    assert d == pytest.approx(0.005, abs=1e-15)
    assert p == pytest.approx(1.0)


def test_rejects_small_or_nan_samples():
    with pytest.raises(ValueError):
        ks_statistic(np.arange(9.0), _uniform_cdf)
    with pytest.raises(ValueError):
        EcdfSample([0.1, float("nan")])


@pytest.mark.parametrize("lam", [0.2, 0.5, 0.8, 0.99, 1.0, 1.36, 1.63, 2.5])
def test_kolmogorov_sf_matches_scipy(lam):
    assert kolmogorov_sf(lam) == pytest.approx(special.kolmogorov(lam), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), r=st.integers(10, 400))
def test_distance_matches_scipy(seed, r):
    xs = _rng(seed).random(r) ** 1.3
    d, p = ks_statistic(xs, _uniform_cdf)
    ref = stats.kstest(xs, _uniform_cdf, method="asymp")
    assert d == pytest.approx(ref.statistic, abs=1e-14)
    assert 0.0 <= d <= 1.0 and 0.0 <= p <= 1.0
    assert p == pytest.approx(special.kolmogorov(math.sqrt(r) * d), abs=1e-10)


def test_pvalues_calibrated():
    rng = _rng(8)
    small = 0
    for _ in range(100):
        x = (-np.log(1.0 - rng.random(10**4))) ** -1.0  # Frechet(1) by inversion
        small += ks_statistic(x, lambda t: frechet_cdf(1.0, t))[1] < 0.05
    assert 0.01 <= small / 100 <= 0.12


def test_count_in_intervals():
    ivs = [Interval(1.0, 2.0), Interval(3.0)]
    np.testing.assert_array_equal(count_in_intervals([3.5, 1.2, 0.1], ivs), [1, 1])
    np.testing.assert_array_equal(count_in_intervals([], ivs), [0, 0])
    # open intervals: endpoints are excluded
    np.testing.assert_array_equal(count_in_intervals([1.0, 2.0, 3.0], ivs), [0, 0])
    with pytest.raises(ValueError):
        count_in_intervals([1.5], [Interval(1.0, 3.0), Interval(2.0, 4.0)])


def test_poisson_count_test():
    z, tv = poisson_count_test(np.zeros(1000, dtype=int), 1e-12)
    assert tv == pytest.approx(0.0, abs=1e-9)
    z, tv = poisson_count_test(np.ones(10**4, dtype=int), 0.5)
    assert z > 50
    with pytest.raises(ValueError):
        poisson_count_test([0, 1], 0.0)


def test_poisson_z_calibration():
    rng = _rng(12)
    ok = sum(abs(poisson_count_test(rng.poisson(0.5, 10**4), 0.5)[0]) <= 4 for _ in range(200))
    assert ok / 200 >= 0.99


def test_pairwise_correlation():
    rng = _rng(13)
    col = rng.poisson(1.0, 500)
    corr, deg = pairwise_count_correlation(np.column_stack([col, col]))
    assert corr[0, 1] == pytest.approx(1.0)
    assert not deg.any()
    m = rng.poisson(0.7, size=(10**4, 3))
    corr, _ = pairwise_count_correlation(m)
    np.testing.assert_allclose(corr, corr.T)
    np.testing.assert_array_equal(np.diag(corr), 1.0)
    assert np.max(np.abs(corr - np.eye(3))) <= 0.03
    noisy = np.column_stack([col * 10, col * 10 + rng.integers(0, 2, 500)])
    assert pairwise_count_correlation(noisy)[0][0, 1] > 0.95


def test_pairwise_correlation_degenerate_and_guards():
    m = np.column_stack([np.zeros(200), np.arange(200) % 3])
    corr, deg = pairwise_count_correlation(m)
    np.testing.assert_array_equal(deg, [True, False])
    assert corr[0, 1] == 0.0 and corr[0, 0] == 1.0
    with pytest.raises(ValueError):
        pairwise_count_correlation(np.ones((50, 2)))
    with pytest.raises(ValueError):
        pairwise_count_correlation(np.ones((200, 1)))


def test_coarse_independence():
    rng = _rng(14)
    a, b = rng.poisson(0.5, 10**5), rng.poisson(0.5, 10**5)
    assert coarse_independence_tv(a, b) < 0.01
    assert coarse_independence_tv(a, a) > 0.2
