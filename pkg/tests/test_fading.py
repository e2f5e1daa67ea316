import math

import numpy as np
import pytest
from scipy import integrate, stats

from rfvlc import fading


def ncx2_log_mgf(beta, gamma, k):
    """Oracle: Y = X / (2(k+1)) with X ~ noncentral chi-square(2, 2k)."""
    dist = stats.ncx2(df=2, nc=2 * k, scale=1.0 / (2 * (k + 1)))

    def f(u):  # integrate over u = ln y
        y = math.exp(u)
        return (1 + gamma * y) ** (-beta) * dist.pdf(y) * y

    lo = math.log(1e-12 / gamma)
    pts = sorted({math.log(1 / gamma), 0.0})
    val, _ = integrate.quad(f, lo, math.log(40.0), points=pts, limit=500,
                            epsabs=0, epsrel=1e-12)
    return math.log(val)


@pytest.mark.parametrize("k", [0.5, 3.1623, 20.0])
@pytest.mark.parametrize("gamma", [1.0, 1e2, 1e4, 1e6])
@pytest.mark.parametrize("beta", [0.05, 1.0, 2.5, 40.0])
def test_log_mgf_against_ncx2(beta, gamma, k):
    got = float(fading.rician_log_mgf(beta, np.array([gamma]), k)[0])
    assert got == pytest.approx(ncx2_log_mgf(beta, gamma, k), abs=1e-7, rel=1e-7)


def test_log_mgf_limits():
    g = np.array([10.0, 1e3])
    np.testing.assert_array_equal(fading.rician_log_mgf(0.0, g, 3.0), 0.0)
    np.testing.assert_allclose(fading.rician_log_mgf(2.0, g, math.inf), -2 * np.log1p(g))
    # very large k approaches the deterministic value
    np.testing.assert_allclose(fading.rician_log_mgf(2.0, g, 1e5), -2 * np.log1p(g), rtol=1e-3)


def test_mean_log2_against_monte_carlo():
    rng = np.random.default_rng(7)
    k = 3.1623
    x = stats.ncx2(df=2, nc=2 * k, scale=1 / (2 * (k + 1))).rvs(size=10**6, random_state=rng)
    for gamma in (1.0, 100.0, 1e5):
        mc = np.log2(1 + gamma * x)
        got = float(fading.rician_mean_log2(np.array([gamma]), k)[0])
        assert abs(got - mc.mean()) < 4 * mc.std() / 1e3


def test_interpolator_matches_direct():
    rng = np.random.default_rng(1)
    gamma = np.exp(rng.uniform(np.log(1e3), np.log(1e6), 2000))
    direct = fading.rician_log_mgf(1.7, gamma, 3.1623)
    interp = fading.rician_log_mgf_many(1.7, gamma, 3.1623)
    np.testing.assert_allclose(interp, direct, rtol=1e-5)


def test_logpdf_normalised():
    for k in (0.0, 1.0, 10.0):
        val, _ = integrate.quad(lambda y: math.exp(float(fading.rician_logpdf(y, k))), 0, 60)
        assert val == pytest.approx(1.0, rel=1e-9)
