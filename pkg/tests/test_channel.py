import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from rfvlc import channel
from rfvlc.params import Geometry, RfParams, VlcParams

from conftest import cell


@pytest.mark.parametrize("deg, expected", [(60, 1.0), (45, 2.0), (30, 4.818841679306418)])
def test_lambertian_index(deg, expected):
    # 30 deg: -ln 2 / ln cos(pi/6), evaluated in high precision
    import mpmath
    mpmath.mp.dps = 30
    if deg == 30:
        expected = float(-mpmath.log(2) / mpmath.log(mpmath.cos(mpmath.pi / 6)))
    assert channel.lambertian_index(math.radians(deg)) == pytest.approx(expected, rel=1e-12)


def test_gain_centre_60deg():
    geom, vlc = Geometry(d_v=2.5, d_c=1.0), VlcParams(phi_half=math.radians(60))
    # (r+1) A n^2 d_v^(r+1) / (2 pi sin^2(90) d_1^(r+3)) with r = 1, d_1 = d_v
    hand = 2 * 1e-4 * 1.5**2 * 2.5**2 / (2 * math.pi * 2.5**4)
    h = float(channel.vlc_channel_gain(0.0, geom, vlc))
    assert h == pytest.approx(hand, rel=1e-12)
    assert h == pytest.approx(1.146e-5, rel=1e-3)


def test_gain_outside_fov_is_zero():
    geom = Geometry(d_v=2.5, d_c=5.0)
    vlc = VlcParams(fov=math.radians(40))
    edge = 2.5 * math.tan(math.radians(40))
    assert channel.vlc_channel_gain(edge * 0.99, geom, vlc) > 0
    assert channel.vlc_channel_gain(edge * 1.01, geom, vlc) == 0


def test_gain_distance_power_law():
    # r = 1, fixed d_v: moving out until d_1 = 2 d_v scales the gain by 2^-(r+3)
    vlc = VlcParams(phi_half=math.radians(60))
    geom = Geometry(d_v=2.0)
    h0 = channel.vlc_channel_gain(0.0, geom, vlc)
    h1 = channel.vlc_channel_gain(math.sqrt(3) * 2.0, geom, vlc)
    assert h1 / h0 == pytest.approx(2.0**-4, rel=1e-12)


def test_gain_r1_symbolic():
    # r = 1: h = 2 omega d_v^2 / d_1^4
    geom, vlc = Geometry(d_v=3.0), VlcParams(phi_half=math.radians(60))
    d_h = np.linspace(0, 3, 7)
    sym = 2 * vlc.omega * 9.0 / (d_h**2 + 9.0) ** 2
    np.testing.assert_allclose(channel.vlc_channel_gain(d_h, geom, vlc), sym, rtol=1e-12)


@given(st.floats(0.2, 5.0), st.floats(5.0, 85.0))
def test_gain_monotone_in_dh(d_v, phi_deg):
    geom, vlc = Geometry(d_v=d_v), VlcParams(phi_half=math.radians(phi_deg))
    h = channel.vlc_channel_gain(np.linspace(0, 10, 200), geom, vlc)
    assert np.all(np.diff(h) <= 0) and np.all(h >= 0)


def test_snr_and_rate_examples():
    vlc = VlcParams()
    zeta = float(channel.vlc_snr(1.146e-5, vlc))
    assert zeta == pytest.approx(8.3e3, rel=0.01)
    assert channel.vlc_snr(0.0, vlc) == 0
    assert channel.vlc_snr(1e-5, vlc.replace(power=4.5)) == pytest.approx(
        channel.vlc_snr(1e-5, vlc) / 4, rel=1e-12)
    assert float(channel.vlc_rate(8.3e3, vlc, 1e-4)) == pytest.approx(2.36e4, rel=0.01)
    assert channel.vlc_rate(0.0, vlc, 1e-4) == 0
    unit = 1.0 / vlc.c_rate**2
    assert float(channel.vlc_rate(unit, vlc, 1e-4)) == pytest.approx(1e-4 * 40e6 / 2, rel=1e-12)


def test_path_loss():
    rf = RfParams()
    assert float(channel.rf_path_loss_db(1.0, rf)) == pytest.approx(40.0)
    assert float(channel.rf_path_loss_db(10.0, rf)) == pytest.approx(56.0)
    assert float(channel.rf_path_loss_db(10.0, rf, 3.0)) == pytest.approx(59.0)
    with pytest.raises(ValueError):
        channel.rf_path_loss_db(0.0, rf)


def test_rf_rate_examples():
    rf = RfParams()
    assert channel.rf_rate(0.0, rf, 1e-4) == 0
    h_unit = math.sqrt(rf.noise_power / rf.power)
    assert float(channel.rf_rate(h_unit, rf, 1e-4)) == pytest.approx(1e-4 * 20e6, rel=1e-12)
    # d_0 = 10 m, no shadowing or fading: |h|^2 = e^-5.6
    noise = 10 ** (-114 / 10) * 1e-3 / 1e6 * 20e6
    hand = 1e-4 * 20e6 * math.log2(1 + 10e-3 * math.exp(-5.6) / noise)
    h = math.sqrt(float(channel.rf_mean_gain(channel.rf_path_loss_db(10.0, rf))))
    assert float(channel.rf_rate(h, rf, 1e-4)) == pytest.approx(hand, rel=1e-12)


def test_rf_fading_second_moment(rng):
    rf = RfParams()
    d0 = np.full(10**6, 12.0)
    fs = channel.sample_rf_fading(d0, rf, rng)
    analytic = channel.rf_mean_gain(channel.rf_path_loss_db(d0, rf, fs.shadowing_db))
    assert np.mean(np.abs(fs.h) ** 2) == pytest.approx(np.mean(analytic), rel=0.01)


def test_rf_fading_los_limit(rng):
    rf = RfParams(rician_k=math.inf)
    fs = channel.sample_rf_fading(np.full(1000, 5.0), rf, rng)
    g = channel.rf_mean_gain(channel.rf_path_loss_db(5.0, rf, fs.shadowing_db))
    np.testing.assert_allclose(np.abs(fs.h) ** 2, g, rtol=1e-12)


def test_fading_determinism():
    rf = RfParams()
    a = channel.sample_rf_fading(np.full(50, 7.0), rf, np.random.default_rng(3))
    b = channel.sample_rf_fading(np.full(50, 7.0), rf, np.random.default_rng(3))
    np.testing.assert_array_equal(a.h, b.h)


def test_user_position(rng):
    d = channel.sample_user_position(2.0, rng, 10**6)
    assert d.min() >= 0 and d.max() <= 2.0
    assert np.mean(d**2) == pytest.approx(2.0, rel=0.01)
    assert np.all(channel.sample_user_position(0.0, rng, 10) == 0)


@pytest.mark.parametrize("phi", [30, 45, 60])
def test_hv2_distribution_ks(phi, rng):
    geom, vlc = cell(phi)
    h2 = channel.vlc_channel_gain(channel.sample_user_position(geom.d_c, rng, 20000),
                                  geom, vlc) ** 2
    res = stats.kstest(h2, lambda x: channel.hv2_cdf(x, geom, vlc))
    assert res.pvalue > 1e-3


def test_hv2_pdf_integrates_to_one():
    from scipy.integrate import quad
    geom, vlc = cell(45)
    lo, hi = channel.hv2_support(geom, vlc)
    val, _ = quad(lambda x: float(channel.hv2_pdf(x, geom, vlc)), lo, hi, limit=200)
    assert val == pytest.approx(1.0, rel=1e-8)


@settings(max_examples=50)
@given(st.floats(0, 1e6), st.floats(0, 1e6), st.floats(1e-6, 1.0))
def test_rates_monotone_and_linear_in_T(z1, z2, T):
    vlc, rf = VlcParams(), RfParams()
    lo, hi = sorted((z1, z2))
    assert channel.vlc_rate(lo, vlc, T) <= channel.vlc_rate(hi, vlc, T)
    assert float(channel.vlc_rate(hi, vlc, 2 * T)) == pytest.approx(
        2 * float(channel.vlc_rate(hi, vlc, T)), rel=1e-12)
    h_lo, h_hi = math.sqrt(lo) * 1e-6, math.sqrt(hi) * 1e-6
    assert channel.rf_rate(h_lo, rf, T) <= channel.rf_rate(h_hi, rf, T)
