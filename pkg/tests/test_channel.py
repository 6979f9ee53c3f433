import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats
from scipy.integrate import quad

from txdelay.specfun import reg_upper_inc_gamma
from txdelay.channel import (
    ChannelModel,
    PathLossParams,
    avg_snr_from_pathloss,
    db_to_linear,
    linear_to_db,
    snr_cdf,
    snr_logpdf,
    snr_pdf,
    snr_sample,
)


def test_model_validation():
    with pytest.raises(ValueError):
        ChannelModel(0, 1.0)
    with pytest.raises(ValueError):
        ChannelModel(2, 0.0)
    with pytest.raises(ValueError):
        ChannelModel(1.5, 1.0)
    assert ChannelModel(8, 10.0).rate == pytest.approx(0.8)


@pytest.mark.parametrize("args,expected", [
    ((1, 1, 1, 2, 1), 1.0),
    ((2, 1, 1, 2, 1), 2.0),
    ((1, 1e-3, 10, 3, 1e-9), 1e3),
])
def test_pathloss(args, expected):
    assert avg_snr_from_pathloss(PathLossParams(*args)) == pytest.approx(expected, rel=1e-12)


def test_pathloss_rejects_nonpositive():
    with pytest.raises(ValueError):
        PathLossParams(1, 1, 0, 2, 1)
    with pytest.raises(ValueError):
        PathLossParams(-1, 1, 1, 2, 1)


def test_db_conversion():
    assert db_to_linear(10.0) == 10.0
    assert db_to_linear(0.0) == 1.0
    assert np.allclose(linear_to_db(db_to_linear(np.array([-3.0, 7.5]))), [-3.0, 7.5])


def test_cdf_examples():
    assert snr_cdf(ChannelModel(1, 1.0), 1.0) == pytest.approx(1 - math.exp(-1), rel=1e-14)
    assert snr_cdf(ChannelModel(5, 3.0), 0.0) == 0.0


def test_cdf_single_antenna_reduction():
    for rho in (0.1, 1.0, 10.0, 1000.0):
        x = np.linspace(0, 30 * rho, 500)
        ref = -np.expm1(-x / rho)
        assert np.max(np.abs(snr_cdf(ChannelModel(1, rho), x) - ref)) <= 1e-12


def test_cdf_matches_scipy_gamma():
    m = ChannelModel(8, 10.0)
    x = np.linspace(0, 60, 400)
    assert np.allclose(snr_cdf(m, x), stats.gamma.cdf(x, 8, scale=10 / 8), rtol=1e-12, atol=1e-300)


def test_cdf_limits_and_monotone():
    m = ChannelModel(4, 2.0)
    x = np.linspace(0, 100, 2001)
    f = snr_cdf(m, x)
    assert np.all(np.diff(f) >= 0)
    assert f[-1] == pytest.approx(1.0, abs=1e-15)


def test_cdf_rejects_negative():
    with pytest.raises(ValueError):
        snr_cdf(ChannelModel(1, 1.0), -1.0)


def test_pdf_examples():
    assert snr_pdf(ChannelModel(1, 2.0), 0.0) == pytest.approx(0.5)
    assert snr_pdf(ChannelModel(2, 1.0), 0.0) == 0.0
    assert snr_logpdf(ChannelModel(2, 1.0), 0.0) == -math.inf


def test_pdf_is_cdf_derivative_at_3():
    m = ChannelModel(8, 10.0)
    h = 1e-5
    num = (snr_cdf(m, 3 + h) - snr_cdf(m, 3 - h)) / (2 * h)
    assert snr_pdf(m, 3.0) == pytest.approx(num, rel=1e-6)


@pytest.mark.parametrize("n,rho", [(1, 1.0), (2, 5.0), (8, 10.0), (32, 100.0)])
def test_pdf_derivative_grid(n, rho):
    m = ChannelModel(n, rho)
    x = np.linspace(0.01, 10 * rho, 200)
    h = 1e-6 * np.maximum(x, 1.0)
    num = (snr_cdf(m, x + h) - snr_cdf(m, x - h)) / (2 * h)
    # in the upper tail difference the survival function to keep the digits
    sf = lambda v: reg_upper_inc_gamma(float(n), m.rate * v)
    upper = snr_cdf(m, x) > 0.5
    num = np.where(upper, (sf(x - h) - sf(x + h)) / (2 * h), num)
    ana = snr_pdf(m, x)
    mask = ana > 1e-200
    assert np.all(np.abs(ana[mask] - num[mask]) <= 1e-6 * ana[mask] + 1e-12)


@pytest.mark.parametrize("n,rho", [(1, 1.0), (3, 0.5), (8, 10.0), (64, 1e3)])
def test_pdf_integrates_to_one(n, rho):
    m = ChannelModel(n, rho)
    mode = rho * (n - 1) / n
    val = sum(quad(lambda x: snr_pdf(m, x), a, b, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
              for a, b in [(0, mode), (mode, mode + 20 * rho), (mode + 20 * rho, math.inf)])
    assert val == pytest.approx(1.0, abs=1e-8)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 40), st.floats(0.01, 1e3), st.floats(0, 1e4))
def test_cdf_in_unit_interval(n, rho, x):
    f = snr_cdf(ChannelModel(n, rho), x)
    assert 0.0 <= f <= 1.0


def test_sample_moments_and_ks():
    m = ChannelModel(8, 10.0)
    g = snr_sample(m, np.random.default_rng(1), 1_000_000)
    assert abs(g.mean() - 10.0) < 0.05
    assert abs(g.var(ddof=1) - 12.5) < 0.5
    ks = stats.kstest(g, lambda x: snr_cdf(m, x)).statistic
    assert ks < 0.002


def test_sample_ecdf_at_10():
    m = ChannelModel(8, 10.0)
    g = snr_sample(m, np.random.default_rng(3), 1_000_000)
    f = snr_cdf(m, 10.0)
    assert abs(np.mean(g <= 10.0) - f) <= 3 * math.sqrt(f * (1 - f) / 1e6)


def test_sample_reproducible():
    m = ChannelModel(3, 2.0)
    a = snr_sample(m, np.random.default_rng(42), 1000)
    b = snr_sample(m, np.random.default_rng(42), 1000)
    assert np.array_equal(a, b)
    assert isinstance(snr_sample(m, np.random.default_rng(0)), float)
