"""Channel gains, SNRs, rates and samplers for both links.

All rates are in bits per frame. Functions broadcast over numpy arrays.
"""
from __future__ import annotations

import math

import numpy as np

from .params import FadingSample, Geometry, RfParams, VlcParams

LN2 = math.log(2.0)


def lambertian_index(phi_half: float) -> float:
    """Lambertian order of an LED with half-intensity angle ``phi_half`` (rad)."""
    if not phi_half > 0:
        raise ValueError(f"phi_half must be > 0, got {phi_half}")
    c = math.cos(phi_half)
    if c <= 0 or c >= 1:
        raise ValueError(f"cos(phi_half) must lie in (0, 1), got {c}")
    return -1.0 / math.log2(c)


def vlc_gain_constant(d_v: float, vlc: VlcParams) -> float:
    """omega (r+1) d_v^(r+1): the numerator of the LoS gain."""
    r = vlc.lambertian_index
    return vlc.omega * (r + 1) * d_v ** (r + 1)


def fov_radius(d_v: float, vlc: VlcParams) -> float:
    """Largest horizontal offset still inside the PD field of view."""
    if vlc.fov >= math.pi / 2:
        return math.inf
    return d_v * math.tan(vlc.fov)


def vlc_channel_gain(d_h, geom: Geometry, vlc: VlcParams):
    """LoS DC gain for a user at horizontal distance ``d_h`` from the cell centre.

    Downward LED, upward PD, so cos(incidence) = d_v / d_1. Users outside the
    field of view get zero gain.
    """
    d_h = np.asarray(d_h, dtype=float)
    r = vlc.lambertian_index
    d1_sq = d_h * d_h + geom.d_v**2
    h = vlc_gain_constant(geom.d_v, vlc) * d1_sq ** (-(r + 3) / 2)
    # psi <= fov  <=>  d_h <= d_v tan(fov); compare via cosines to stay exact at fov = 90 deg
    inside = geom.d_v >= np.sqrt(d1_sq) * math.cos(vlc.fov) - 1e-15
    return np.where(inside, h, 0.0)


def vlc_snr(h_v, vlc: VlcParams):
    h_v = np.asarray(h_v, dtype=float)
    return (vlc.responsivity * vlc.power * h_v) ** 2 / (vlc.varsigma**2 * vlc.noise_power)


def vlc_rate(zeta_v, vlc: VlcParams, T: float):
    zeta_v = np.asarray(zeta_v, dtype=float)
    return 0.5 * T * vlc.bandwidth * np.log1p(vlc.c_rate**2 * zeta_v) / LN2


def vlc_rate_at(d_h, geom: Geometry, vlc: VlcParams, T: float):
    """Convenience composition gain -> SNR -> rate."""
    return vlc_rate(vlc_snr(vlc_channel_gain(d_h, geom, vlc), vlc), vlc, T)


def rf_path_loss_db(d_0, rf: RfParams, shadowing_db=0.0):
    d_0 = np.asarray(d_0, dtype=float)
    if np.any(d_0 <= 0):
        raise ValueError("d_0 must be > 0")
    return (rf.ref_loss_db + 10.0 * rf.path_loss_exp * np.log10(d_0 / rf.ref_distance)
            + np.asarray(shadowing_db, dtype=float))


def rf_mean_gain(loss_db):
    """Large-scale power gain e^(-L/10) of the Rician model."""
    return np.exp(-np.asarray(loss_db, dtype=float) / 10.0)


def rician_moments(loss_db, k: float):
    """Mean and variance of the complex Rician coefficient for path loss ``loss_db``."""
    g = rf_mean_gain(loss_db)
    if math.isinf(k):
        return np.sqrt(g), np.zeros_like(g)
    return np.sqrt(g * k / (k + 1)), g / (k + 1)


def sample_shadowing(rf: RfParams, rng: np.random.Generator, size=None):
    return rf.shadowing_std * rng.standard_normal(size)


def sample_rf_fading(d_0, rf: RfParams, rng: np.random.Generator) -> FadingSample:
    """One Rician draw per entry of ``d_0``, with fresh shadowing for each."""
    d_0 = np.asarray(d_0, dtype=float)
    x_sigma = sample_shadowing(rf, rng, d_0.shape)
    mu, var = rician_moments(rf_path_loss_db(d_0, rf, x_sigma), rf.rician_k)
    z = rng.standard_normal(d_0.shape + (2,))
    h = mu + np.sqrt(var / 2) * (z[..., 0] + 1j * z[..., 1])
    return FadingSample(h=h, shadowing_db=x_sigma)


def rf_snr(h_r, rf: RfParams):
    return rf.power * np.abs(np.asarray(h_r)) ** 2 / rf.noise_power


def rf_rate(h_r, rf: RfParams, T: float):
    return T * rf.bandwidth * np.log1p(rf_snr(h_r, rf)) / LN2


def sample_user_position(d_c: float, rng: np.random.Generator, size=None):
    """Horizontal distance of a user uniform on the disk of radius ``d_c``."""
    if d_c < 0:
        raise ValueError("d_c must be >= 0")
    return d_c * np.sqrt(rng.random(size))


def sample_user_xy(d_c: float, rng: np.random.Generator, size=None):
    """Cartesian (x, y) of a user uniform on the disk of radius ``d_c``."""
    d_h = sample_user_position(d_c, rng, size)
    ang = 2 * math.pi * rng.random(size)
    return d_h * np.cos(ang), d_h * np.sin(ang)


def hv2_pdf(h, geom: Geometry, vlc: VlcParams):
    """Density of the squared LoS gain for a user uniform on the cell disk.

    Support is [xi_min, xi_max], the squared gains at the cell edge and
    centre. Assumes the whole cell lies inside the field of view.
    """
    h = np.asarray(h, dtype=float)
    r = vlc.lambertian_index
    g = vlc_gain_constant(geom.d_v, vlc)
    lo, hi = hv2_support(geom, vlc)
    out = (g ** (2 / (r + 3)) / ((r + 3) * geom.d_c**2)) * h ** (-(r + 4) / (r + 3))
    return np.where((h >= lo) & (h <= hi), out, 0.0)


def hv2_cdf(h, geom: Geometry, vlc: VlcParams):
    h = np.asarray(h, dtype=float)
    r = vlc.lambertian_index
    g = vlc_gain_constant(geom.d_v, vlc)
    lo, hi = hv2_support(geom, vlc)
    hc = np.clip(h, lo, hi)
    u = (hc / g**2) ** (-1 / (r + 3))   # d_h^2 + d_v^2 at gain^2 = h
    return (geom.d_v**2 + geom.d_c**2 - u) / geom.d_c**2


def hv2_support(geom: Geometry, vlc: VlcParams) -> tuple[float, float]:
    r = vlc.lambertian_index
    g2 = vlc_gain_constant(geom.d_v, vlc) ** 2
    return (g2 / (geom.d_v**2 + geom.d_c**2) ** (r + 3), g2 / geom.d_v ** (2 * (r + 3)))
