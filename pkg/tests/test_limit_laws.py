import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from wignertails.limit_laws import (
    FrechetLaw,
    Interval,
    frechet_cdf,
    frechet_pdf,
    order_stat_cdf,
    order_stat_cdf_printed,
    poisson_mean,
    sample_poisson_process,
    sample_poisson_process_batch,
    semicircle_density,
)
from wignertails.stat_tests import count_in_intervals


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def test_frechet_values():
    assert frechet_cdf(1.0, 1.0) == pytest.approx(0.36787944117144233, rel=1e-15)
    assert frechet_cdf(1.0, 1e12) == pytest.approx(1.0, abs=1e-11)
    assert frechet_cdf(0.5, 4.0) == pytest.approx(0.6065306597126334, rel=1e-15)
    assert frechet_cdf(1.0, 0.0) == 0.0
    assert FrechetLaw(1.0).cdf(2.0) == frechet_cdf(1.0, 2.0)
    with pytest.raises(ValueError):
        FrechetLaw(2.0)


def test_frechet_pdf_integrates_to_cdf():
    val, _ = integrate.quad(lambda x: frechet_pdf(1.3, x), 0, 2.0)
    assert val == pytest.approx(frechet_cdf(1.3, 2.0), rel=1e-10)


def test_order_stat_values():
    assert order_stat_cdf(1.0, 1, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-15)
    assert order_stat_cdf(1.0, 2, 1.0) == pytest.approx(0.7357588823428847, rel=1e-15)
    assert order_stat_cdf(1.0, 3, 2.0) == pytest.approx(0.9856123220330293, rel=1e-14)
    # the sum started at l = 1 loses the l = 0 term
    assert order_stat_cdf_printed(1.0, 1, 1.0) == 0.0
    assert order_stat_cdf_printed(1.0, 2, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-15)
    with pytest.raises(ValueError):
        order_stat_cdf(1.0, 0, 1.0)


@settings(max_examples=100, deadline=None)
@given(alpha=st.floats(0.1, 1.9), k=st.integers(1, 8), x=st.floats(1e-3, 1e3))
def test_order_stat_monotone_in_k(alpha, k, x):
    assert order_stat_cdf(alpha, k + 1, x) >= order_stat_cdf(alpha, k, x)
    assert frechet_cdf(alpha, x) == pytest.approx(math.exp(-poisson_mean(alpha, Interval(x))), rel=1e-14)


def test_poisson_means():
    assert poisson_mean(1.0, Interval(1.0, 2.0)) == 0.5
    assert poisson_mean(1.0, Interval(1.0)) == 1.0
    assert poisson_mean(0.5, Interval(4.0)) == 0.5
    with pytest.raises(ValueError):
        Interval(2.0, 1.0)
    with pytest.raises(ValueError):
        Interval(0.0, 1.0)


def test_poisson_process_single_draws():
    pts = sample_poisson_process(1.0, 0.5, _rng(1))
    assert np.all(pts > 0.5)
    assert np.all(np.diff(pts) <= 0)
    with pytest.raises(ValueError):
        sample_poisson_process(1.0, 0.0, _rng(1))


def test_poisson_process_mean_and_maximum():
    draws = 10**5
    pts, owner = sample_poisson_process_batch(1.0, 1.0, draws, _rng(2))
    assert abs(pts.size / draws - 1.0) <= 0.01
    pts, owner = sample_poisson_process_batch(1.0, 0.1, draws, _rng(3))
    mx = np.zeros(draws)
    np.maximum.at(mx, owner, pts)
    assert abs(np.mean(mx <= 2.0) - math.exp(-0.5)) <= 0.005


def test_poisson_process_counts():
    draws = 10**5
    pts, owner = sample_poisson_process_batch(1.0, 0.5, draws, _rng(4))
    ivs = [Interval(1.0, 2.0), Interval(2.0, 3.0), Interval(3.0)]
    counts = np.stack([np.bincount(owner[iv.contains(pts)], minlength=draws) for iv in ivs], axis=1)
    for l, iv in enumerate(ivs):
        assert counts[:, l].mean() == pytest.approx(poisson_mean(1.0, iv), rel=0.01 * 3)
    assert abs(np.corrcoef(counts[:, 0], counts[:, 1])[0, 1]) <= 0.01
    # partition of (0.5, inf) recovers the total
    full = [Interval(0.5, 1.0)] + ivs
    per_draw = count_in_intervals(pts[owner == 0], full)
    assert per_draw.sum() == np.count_nonzero(owner == 0)


@pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
def test_counting_identity(x):
    draws = 10**5
    pts, owner = sample_poisson_process_batch(1.0, 0.25, draws, _rng(5))
    above = np.bincount(owner[pts > x], minlength=draws)
    for k in (1, 2, 3):
        assert abs(np.mean(above <= k - 1) - order_stat_cdf(1.0, k, x)) <= 0.01


def test_semicircle():
    assert semicircle_density(1.0, 0.0) == pytest.approx(math.sqrt(2) / math.pi, rel=1e-15)
    assert semicircle_density(1.0, math.sqrt(2.0)) == 0.0
    assert semicircle_density(1.0, 3.0) == 0.0
    val, _ = integrate.quad(lambda t: semicircle_density(1.7, t), -1.7 * math.sqrt(2), 1.7 * math.sqrt(2),
                            epsabs=1e-12, epsrel=1e-12)
    assert abs(val - 1.0) <= 1e-8
    with pytest.raises(ValueError):
        semicircle_density(0.0, 0.0)
