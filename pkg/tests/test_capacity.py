import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rfvlc import capacity as cap, channel
from rfvlc.params import Geometry, QosSpec, RfParams, VlcParams

from conftest import cell

pytestmark = pytest.mark.filterwarnings("ignore::rfvlc.capacity.ApproximationWarning")


def mc_vlc_mgf(geom, vlc, qos, n=10**6, seed=5):
    rates = cap.sample_vlc_rates(geom, vlc, qos.T, n, seed)
    x = np.exp(-qos.theta * rates)
    return x.mean(), x.std(ddof=1) / math.sqrt(n)


def test_mgf_at_theta_zero_is_one():
    geom, vlc = cell(45)
    q = QosSpec(theta=0.0)
    assert cap.vlc_mgf_closed_form(geom, vlc, q) == pytest.approx(1.0, abs=1e-12)
    assert cap.vlc_mgf_quadrature(geom, vlc, q) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("theta", [1e-4, 1e-3, 1e-2])
@pytest.mark.parametrize("d_v", [2.0, 2.5, 3.0])
def test_closed_form_matches_quadrature_narrow_beam(theta, d_v):
    # 30 deg keeps the cell edge SNR high, where the closed form is accurate
    geom, vlc = cell(30, d_v)
    q = QosSpec(theta=theta)
    cf = cap.effective_capacity_vlc(geom, vlc, q, "closed-form").value
    qu = cap.effective_capacity_vlc(geom, vlc, q, "quadrature").value
    assert cf == pytest.approx(qu, rel=1e-3)


@pytest.mark.parametrize("power", [9.0, 0.5, 0.1])
def test_closed_form_overestimates_mgf(power):
    # log(1 + x) > log x, so dropping the 1 lowers the rate and raises the MGF
    geom = Geometry(d_v=2.5, d_c=2.5)
    vlc = VlcParams(phi_half=math.radians(45), power=power)
    for th in (1e-4, 1e-3, 1e-2):
        q = QosSpec(theta=th)
        assert cap.vlc_log_mgf_closed_form(geom, vlc, q) >= cap.vlc_log_mgf_quadrature(geom, vlc, q)


def test_closed_form_warns_at_low_edge_snr():
    geom, vlc = cell(60, 3.0)
    with pytest.warns(cap.ApproximationWarning):
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            cap.vlc_log_mgf_closed_form(geom, vlc.replace(power=0.5), QosSpec(theta=1e-3))


def test_small_cell_limit():
    vlc = VlcParams()
    geom = Geometry(d_v=2.5, d_c=1e-6)
    q = QosSpec(theta=1e-3)
    centre = float(channel.vlc_rate_at(0.0, geom, vlc, q.T))
    assert cap.vlc_mgf_quadrature(geom, vlc, q) == pytest.approx(math.exp(-q.theta * centre),
                                                                  rel=1e-9)
    # the closed form drops the 1 in log(1 + c^2 zeta)
    zeta = float(channel.vlc_snr(channel.vlc_channel_gain(0.0, geom, vlc), vlc))
    hi_snr = 0.5 * q.T * vlc.bandwidth * math.log2(vlc.c_rate**2 * zeta)
    assert cap.vlc_mgf_closed_form(geom, vlc, q) == pytest.approx(math.exp(-q.theta * hi_snr),
                                                                   rel=1e-6)


@pytest.mark.parametrize("phi", [30, 45, 60])
def test_quadrature_matches_monte_carlo(phi):
    geom, vlc = cell(phi)
    q = QosSpec(theta=1e-3)
    m, se = mc_vlc_mgf(geom, vlc, q)
    assert abs(cap.vlc_mgf_quadrature(geom, vlc, q) - m) < 3 * se


def test_fov_limited_cell_quadrature_matches_mc():
    geom = Geometry(d_v=2.5, d_c=3.0)
    vlc = VlcParams(fov=math.radians(40))
    q = QosSpec(theta=1e-3)
    m, se = mc_vlc_mgf(geom, vlc, q)
    assert abs(cap.vlc_mgf_quadrature(geom, vlc, q) - m) < 3 * se


@pytest.mark.parametrize("method", ["closed-form", "quadrature", "monte-carlo"])
def test_vlc_small_theta_limit(method):
    geom, vlc = cell(45)
    kw = dict(samples=10**5, seed=3)
    mean = cap.effective_capacity_vlc(geom, vlc, QosSpec(theta=0.0), method, **kw).value
    ec = cap.effective_capacity_vlc(geom, vlc, QosSpec(theta=1e-8), method, **kw).value
    assert ec == pytest.approx(mean, rel=1e-3)


def test_vlc_monotone_and_bounded():
    geom, vlc = cell(45)
    mean = cap.vlc_mean_rate_quadrature(geom, vlc, 1e-4)
    ecs = [cap.effective_capacity_vlc(geom, vlc, QosSpec(theta=t), "quadrature").value
           for t in (1e-4, 1e-3, 1e-2)]
    assert all(a >= b for a, b in zip(ecs, ecs[1:]))
    assert 0 <= ecs[-1] and ecs[0] <= mean


def test_narrow_beam_beats_wide_beam():
    q = QosSpec.from_db(-30)
    ec30 = cap.effective_capacity_vlc(*cell(30), q, "quadrature").value
    ec60 = cap.effective_capacity_vlc(*cell(60), q, "quadrature").value
    assert ec30 > ec60


def test_mc_matches_quadrature_effective_capacity():
    geom, vlc = cell(45)
    q = QosSpec(theta=1e-2)
    mc = cap.effective_capacity_vlc(geom, vlc, q, "monte-carlo", samples=10**6, seed=11)
    qu = cap.effective_capacity_vlc(geom, vlc, q, "quadrature")
    assert abs(mc.value - qu.value) < 3 * mc.stderr


# RF


def test_rf_small_theta_and_determinism(rf):
    geom = Geometry()
    a = cap.effective_capacity_rf(geom, rf, QosSpec(theta=1e-8), samples=10**5, seed=2)
    b = cap.effective_capacity_rf(geom, rf, QosSpec(theta=1e-8), samples=10**5, seed=2)
    mean = cap.effective_capacity_rf(geom, rf, QosSpec(theta=0.0), samples=10**5, seed=2)
    assert a.value == b.value
    assert a.value == pytest.approx(mean.value, rel=1e-3)
    sampled = cap.sample_rf_rates(geom, rf, 1e-4, 10**5, 2)
    assert abs(mean.value - sampled.mean()) < 4 * sampled.std() / math.sqrt(sampled.size)


def test_rf_closer_is_better(rf):
    q = QosSpec.from_db(-30)
    near = cap.effective_capacity_rf(Geometry(y_r=5), rf, q, samples=10**5, seed=1)
    far = cap.effective_capacity_rf(Geometry(y_r=30), rf, q, samples=10**5, seed=1)
    assert near.value > far.value


def test_rf_sample_count_floor(rf):
    with pytest.raises(ValueError):
        cap.effective_capacity_rf(Geometry(), rf, QosSpec(theta=1e-3), samples=100)


def test_rf_integrated_agrees_with_sampled_at_loose_theta(rf):
    geom = Geometry()
    draws = cap.draw_rf(geom, rf, 10**6, 4)
    q = QosSpec.from_db(-50)
    a = cap.effective_capacity_rf(geom, rf, q, draws=draws)
    b = cap.effective_capacity_rf(geom, rf, q, draws=draws, fading="sampled")
    assert abs(a.value - b.value) < 3 * math.hypot(a.stderr, b.stderr)


def test_rf_integrated_against_exact_fading_oracle(rf):
    # with zero shadowing and a single position, the EC is a pure Rician average
    from test_fading import ncx2_log_mgf
    rf0 = rf.replace(shadowing_std=0.0)
    geom = Geometry(d_c=1e-9, y_r=20.0)
    q = QosSpec.from_db(-30)
    ec = cap.effective_capacity_rf(geom, rf0, q, samples=10**4, seed=0).value
    gamma = rf0.power * float(channel.rf_mean_gain(channel.rf_path_loss_db(
        math.hypot(20.0, 2.5), rf0))) / rf0.noise_power
    beta = q.theta * q.T * rf0.bandwidth / math.log(2)
    assert ec == pytest.approx(-ncx2_log_mgf(beta, gamma, rf0.rician_k) / q.theta, rel=1e-6)


def test_rf_sampled_warns_on_deep_fades(rf):
    with pytest.warns(cap.MonteCarloWarning):
        cap.effective_capacity_rf(Geometry(), rf, QosSpec.from_db(-10), samples=10**4, seed=0,
                                  fading="sampled")


# blockage


def test_blockage_limits():
    geom, vlc = cell(45)
    q = QosSpec(theta=1e-3)
    base = cap.effective_capacity_vlc(geom, vlc, q, "quadrature").value
    for method in ("closed-form", "quadrature"):
        ref = cap.effective_capacity_vlc(geom, vlc, q, method).value
        full = cap.effective_capacity_vlc_blockage(geom, vlc, q, cap.BlockageModel(1.0, 0.0),
                                                   method).value
        assert full == pytest.approx(ref, rel=1e-14)
    dead = cap.effective_capacity_vlc_blockage(geom, vlc, q, cap.BlockageModel(0.0, 0.0),
                                               "quadrature").value
    assert dead == pytest.approx(0.0, abs=1e-9)
    near_one = cap.effective_capacity_vlc_blockage(
        geom, vlc, q, cap.BlockageModel(0.3, 1 - 1e-9), "quadrature").value
    assert near_one == pytest.approx(base, rel=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 0.99), st.floats(0.0, 0.99))
def test_blockage_monotone_in_mu(mu, omega):
    geom, vlc = cell(45)
    q = QosSpec(theta=1e-3)
    lo = cap.effective_capacity_vlc_blockage(geom, vlc, q, cap.BlockageModel(mu, omega)).value
    hi = cap.effective_capacity_vlc_blockage(geom, vlc, q,
                                             cap.BlockageModel(mu + 0.01, omega)).value
    assert hi >= lo


def test_blockage_mc_matches_quadrature():
    geom, vlc = cell(45)
    q = QosSpec(theta=1e-3)
    blk = cap.BlockageModel(0.6, 0.5)
    mc = cap.effective_capacity_vlc_blockage(geom, vlc, q, blk, "monte-carlo", samples=10**6)
    qu = cap.effective_capacity_vlc_blockage(geom, vlc, q, blk, "quadrature")
    assert abs(mc.value - qu.value) < 3 * mc.stderr


def test_blockage_validation():
    with pytest.raises(ValueError):
        cap.BlockageModel(1.2, 0.0)
    with pytest.raises(ValueError):
        cap.BlockageModel(0.5, 1.0)


# illumination and selection


@pytest.mark.parametrize("deg, span", [(30, 3.08), (45, 5.66), (60, 16.0)])
def test_min_illuminance_ratio(deg, span):
    assert cap.min_illuminance_ratio(math.radians(deg)) == pytest.approx(span, abs=0.01)


def test_cell_radius_examples():
    vlc = VlcParams(phi_half=math.radians(60))
    assert cap.max_cell_radius(cap.IlluminationSpec(1.0, 1.0), 2.5, vlc) == 0.0
    assert cap.max_cell_radius(cap.IlluminationSpec(1.0, 16.0), 2.5, vlc) == pytest.approx(
        2.5 * math.sqrt(3), rel=1e-12)
    assert cap.viewing_angle_admissible(cap.IlluminationSpec(1.0, 16.0), math.radians(60))
    assert not cap.viewing_angle_admissible(cap.IlluminationSpec(1.0, 15.0), math.radians(60))
    with pytest.raises(ValueError):
        cap.IlluminationSpec(2.0, 1.0)


@given(st.floats(2.05, 1e3))
def test_viewing_angle_for_span_roundtrip(ratio):
    phi = cap.viewing_angle_for_span(ratio)
    assert cap.min_illuminance_ratio(phi) == pytest.approx(ratio, rel=1e-9)
    vlc = VlcParams(phi_half=phi)
    d_c = cap.illumination_limited_radius(2.5, vlc)
    assert cap.illuminance_ratio(d_c, 2.5, vlc) == pytest.approx(ratio, rel=1e-9)


def test_select_link_rules():
    a = cap.EcEstimate(100.0, "quadrature", 0.0, 1e-3)
    b = cap.EcEstimate(100.0, "monte-carlo", 1.0, 1e-3)
    assert cap.select_link(b, a) is cap.Link.VLC
    assert cap.select_link(cap.EcEstimate(101.0, "monte-carlo", 1.0, 1e-3), a) is cap.Link.RF
    with pytest.raises(ValueError):
        cap.select_link(b, cap.EcEstimate(1.0, "quadrature", 0.0, 1e-2))


@pytest.mark.parametrize("theta_db, phi, y_r, expected", [
    (-30, 45, 5, cap.Link.RF),
    (-30, 30, 5, cap.Link.VLC),
    (-50, 45, 20, cap.Link.RF),    # loose QoS favours the RF link
    (-20, 45, 20, cap.Link.VLC),
])
def test_select_link_pipeline(rf, theta_db, phi, y_r, expected):
    geom, vlc = cell(phi, y_r=y_r)
    q = QosSpec.from_db(theta_db)
    ec_v = cap.effective_capacity_vlc(geom, vlc, q, "quadrature")
    ec_r = cap.effective_capacity_rf(Geometry(y_r=y_r), rf, q, samples=10**5, seed=1)
    assert cap.select_link(ec_r, ec_v) is expected
