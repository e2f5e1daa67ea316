"""Effective capacity of the RF and VLC links, blockage, illumination limits
and link selection.

Everything is computed through the log-MGF ln E{exp(-theta R)}; the MGF
itself underflows for strict QoS exponents.
"""
from __future__ import annotations

import enum
import functools
import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import integrate, optimize
from scipy.special import logsumexp

from . import channel, fading as _fading, rng as _rng
from .params import Geometry, QosSpec, RfParams, VlcParams

LN2 = math.log(2.0)
Method = Literal["closed-form", "quadrature", "monte-carlo"]
METHODS = ("closed-form", "quadrature", "monte-carlo")

# substream ids, kept distinct per sampler
_VLC_STREAM = 1
_RF_STREAM = 2


class ApproximationWarning(UserWarning):
    """The high-SNR closed form is used outside its regime."""


class MonteCarloWarning(UserWarning):
    """Relative standard error of a Monte Carlo MGF above 1%."""


class QuadratureError(ArithmeticError):
    pass


@dataclass(frozen=True)
class EcEstimate:
    value: float        # bits per frame
    method: str
    stderr: float
    theta: float

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")


@dataclass(frozen=True)
class BlockageModel:
    mu: float = 1.0
    omega: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError(f"mu must lie in [0, 1], got {self.mu}")
        if not 0.0 <= self.omega < 1.0:
            raise ValueError(f"omega must lie in [0, 1), got {self.omega}")


@dataclass(frozen=True)
class IlluminationSpec:
    e_min: float
    e_max: float

    def __post_init__(self):
        if not self.e_min > 0:
            raise ValueError(f"e_min must be > 0, got {self.e_min}")
        if not self.e_max >= self.e_min:
            raise ValueError(f"e_max ({self.e_max}) must be >= e_min ({self.e_min})")

    @property
    def ratio(self) -> float:
        return self.e_max / self.e_min


@dataclass(frozen=True)
class MgfParams:
    rho: float
    kappa: float
    omega: float


class Link(str, enum.Enum):
    RF = "rf"
    VLC = "vlc"


def mgf_params(vlc: VlcParams, qos: QosSpec) -> MgfParams:
    rho = vlc.c_rate**2 * vlc.power**2 * vlc.responsivity**2 / (vlc.varsigma**2 * vlc.noise_power)
    kappa = qos.theta * qos.T * vlc.bandwidth / (2 * LN2)
    return MgfParams(rho=rho, kappa=kappa, omega=vlc.omega)


# --------------------------------------------------------------------------
# VLC


def _covered_radius(geom: Geometry, vlc: VlcParams) -> float:
    return min(geom.d_c, channel.fov_radius(geom.d_v, vlc))


def _mix_uncovered(log_in: float, geom: Geometry, d_in: float) -> float:
    """Users beyond the FOV get rate 0, i.e. contribute exp(0) = 1 to the MGF."""
    if d_in >= geom.d_c:
        return log_in
    frac = d_in**2 / geom.d_c**2
    return float(np.logaddexp(math.log(frac) + log_in, math.log1p(-frac)))


def vlc_log_mgf_closed_form(geom: Geometry, vlc: VlcParams, qos: QosSpec,
                            scale: float = 1.0) -> float:
    """High-SNR closed form of ln E{exp(-theta * scale * R_v)} over the cell.

    With log(1 + c^2 zeta) ~ log(rho h^2) and h = G (d_h^2 + d_v^2)^(-(r+3)/2),
    G = omega (r+1) d_v^(r+1), a uniform user gives

        E = (rho G^2)^-k / (d_c^2 (k(r+3) + 1))
            * [(d_c^2 + d_v^2)^(k(r+3)+1) - d_v^(2k(r+3)+2)]

    with k = kappa * scale. ``scale`` is the blockage rate ratio.
    """
    p = mgf_params(vlc, qos)
    kappa = p.kappa * scale
    if kappa == 0:
        return 0.0
    r = vlc.lambertian_index
    g = channel.vlc_gain_constant(geom.d_v, vlc)
    log_rho_g2 = math.log(p.rho) + 2 * math.log(g)
    d_in = _covered_radius(geom, vlc)

    edge_snr = float(channel.vlc_snr(channel.vlc_channel_gain(d_in, geom, vlc), vlc))
    if edge_snr < 10:
        warnings.warn(f"cell-edge VLC SNR {edge_snr:.3g} < 10; high-SNR closed form "
                      "is inaccurate here", ApproximationWarning, stacklevel=2)

    dv2 = geom.d_v**2
    if d_in == 0:
        return -kappa * (log_rho_g2 - (r + 3) * math.log(dv2))
    e = kappa * (r + 3) + 1
    b = d_in**2 + dv2
    # (b^e - dv2^e) computed as b^e * (1 - (dv2/b)^e)
    log_in = (-kappa * log_rho_g2 - math.log(d_in**2 * e) + e * math.log(b)
              + math.log(-math.expm1(e * math.log(dv2 / b))))
    return _mix_uncovered(log_in, geom, d_in)


def vlc_mean_rate_closed_form(geom: Geometry, vlc: VlcParams, T: float) -> float:
    """High-SNR mean rate, the theta -> 0 limit of the closed form."""
    p = mgf_params(vlc, QosSpec(theta=0.0, T=T))
    r = vlc.lambertian_index
    g = channel.vlc_gain_constant(geom.d_v, vlc)
    d_in = _covered_radius(geom, vlc)
    a = geom.d_v**2
    b = a + d_in**2
    mean_log_u = math.log(a) if d_in == 0 else (b * math.log(b) - a * math.log(a)) / (b - a) - 1
    mean_ln = math.log(p.rho) + 2 * math.log(g) - (r + 3) * mean_log_u
    frac = 1.0 if d_in >= geom.d_c else d_in**2 / geom.d_c**2
    return frac * 0.5 * T * vlc.bandwidth * mean_ln / LN2


def _vlc_rate_of_s(geom: Geometry, vlc: VlcParams, T: float):
    """Rate as a function of s = d_h^2 / d_c^2, which is uniform on [0, 1]."""
    return lambda s: channel.vlc_rate_at(math.sqrt(s) * geom.d_c, geom, vlc, T)


def _quad(fn, breaks, tol):
    total, err = 0.0, 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b <= a:
            continue
        val, e, info = integrate.quad(fn, a, b, epsabs=tol, epsrel=1e-12, limit=400,
                                      full_output=True)[:3]
        total += val
        err += e
    if err > 10 * tol:
        raise QuadratureError(f"quadrature did not converge: achieved abs error {err:.3g}")
    return total


def _fov_breaks(geom: Geometry, vlc: VlcParams) -> list[float]:
    if geom.d_c == 0:
        return [0.0, 1.0]
    s_fov = (_covered_radius(geom, vlc) / geom.d_c) ** 2
    return [0.0, s_fov, 1.0] if s_fov < 1.0 else [0.0, 1.0]


def vlc_log_mgf_quadrature(geom: Geometry, vlc: VlcParams, qos: QosSpec,
                           scale: float = 1.0, tol: float = 1e-10) -> float:
    """ln E{exp(-theta * scale * R_v)} with the exact rate, by adaptive quadrature."""
    th = qos.theta * scale
    if th == 0:
        return 0.0
    rate = _vlc_rate_of_s(geom, vlc, qos.T)
    if geom.d_c == 0:
        return -th * float(rate(0.0))
    breaks = _fov_breaks(geom, vlc)
    # rate is decreasing in s; zero beyond the FOV
    r_min = 0.0 if len(breaks) == 3 else float(rate(1.0))
    # integrand scaled by exp(theta R_min) so it peaks at 1
    val = _quad(lambda s: math.exp(-th * (float(rate(s)) - r_min)), breaks, tol)
    return math.log(val) - th * r_min


def vlc_mean_rate_quadrature(geom: Geometry, vlc: VlcParams, T: float) -> float:
    rate = _vlc_rate_of_s(geom, vlc, T)
    if geom.d_c == 0:
        return float(rate(0.0))
    return _quad(lambda s: float(rate(s)), _fov_breaks(geom, vlc), 1e-10 * T * vlc.bandwidth)


def vlc_rate_sampler(geom: Geometry, vlc: VlcParams, T: float):
    """``(rng, n) -> rates`` for i.i.d. uniform user positions in the cell."""
    def draw(g: np.random.Generator, size: int) -> np.ndarray:
        return channel.vlc_rate_at(channel.sample_user_position(geom.d_c, g, size), geom, vlc, T)
    return draw


def sample_vlc_rates(geom: Geometry, vlc: VlcParams, T: float, n: int, seed: int,
                     workers: int = 1) -> np.ndarray:
    """Per-frame VLC rates for i.i.d. uniform user positions."""
    parts = _rng.map_chunks(vlc_rate_sampler(geom, vlc, T), n, seed, stream=_VLC_STREAM,
                            workers=workers)
    return _rng.concat(parts)


def _mc_log_mean(log_terms: np.ndarray) -> tuple[float, float]:
    """Log of the sample mean of exp(log_terms) and its delta-method standard error."""
    n = log_terms.size
    m = float(np.max(log_terms))
    y = np.exp(log_terms - m)
    mean = float(np.mean(y))
    se_log = float(np.std(y, ddof=1) / (math.sqrt(n) * mean)) if n > 1 else math.inf
    return math.log(mean) + m, se_log


def _mc_estimate(log_terms: np.ndarray, theta: float) -> EcEstimate:
    log_m, se_log = _mc_log_mean(log_terms)
    if se_log > 0.01:
        warnings.warn(f"Monte Carlo MGF relative stderr {se_log:.2%} exceeds 1%",
                      MonteCarloWarning, stacklevel=3)
    return EcEstimate(value=-log_m / theta, method="monte-carlo", stderr=se_log / theta,
                      theta=theta)


def _mean_estimate(x: np.ndarray, theta: float = 0.0) -> EcEstimate:
    return EcEstimate(value=float(np.mean(x)), method="monte-carlo",
                      stderr=float(np.std(x, ddof=1) / math.sqrt(x.size)), theta=theta)


def effective_capacity_vlc(geom: Geometry, vlc: VlcParams, qos: QosSpec,
                           method: Method = "closed-form", samples: int = 10**6,
                           seed: int = 0, workers: int = 1,
                           rates: np.ndarray | None = None) -> EcEstimate:
    """VLC effective capacity in bits per frame.

    ``rates`` lets Monte Carlo reuse one set of per-frame rate draws across
    several theta values.
    """
    th = qos.theta
    if method == "monte-carlo":
        if rates is None:
            rates = sample_vlc_rates(geom, vlc, qos.T, samples, seed, workers)
        return _mean_estimate(rates) if th == 0 else _mc_estimate(-th * rates, th)
    if th == 0:
        fn = vlc_mean_rate_closed_form if method == "closed-form" else vlc_mean_rate_quadrature
        return EcEstimate(value=fn(geom, vlc, qos.T), method=method, stderr=0.0, theta=0.0)
    if method == "closed-form":
        log_m = vlc_log_mgf_closed_form(geom, vlc, qos)
    elif method == "quadrature":
        log_m = vlc_log_mgf_quadrature(geom, vlc, qos)
    else:
        raise ValueError(f"unknown method {method!r}")
    return EcEstimate(value=-log_m / th, method=method, stderr=0.0, theta=th)


def vlc_mgf_closed_form(geom: Geometry, vlc: VlcParams, qos: QosSpec) -> float:
    return math.exp(vlc_log_mgf_closed_form(geom, vlc, qos))


def vlc_mgf_quadrature(geom: Geometry, vlc: VlcParams, qos: QosSpec) -> float:
    return math.exp(vlc_log_mgf_quadrature(geom, vlc, qos))


def effective_capacity_vlc_blockage(geom: Geometry, vlc: VlcParams, qos: QosSpec,
                                    blk: BlockageModel, method: Method = "closed-form",
                                    samples: int = 10**6, seed: int = 0, workers: int = 1,
                                    rates: np.ndarray | None = None) -> EcEstimate:
    """VLC effective capacity when the LoS path is up with probability mu per frame
    and the rate drops to omega * R_v otherwise."""
    th = qos.theta
    mu, om = blk.mu, blk.omega
    if method == "monte-carlo":
        if rates is None:
            rates = sample_vlc_rates(geom, vlc, qos.T, samples, seed, workers)
        if th == 0:
            return _mean_estimate((mu + (1 - mu) * om) * rates)
        # per-position mixture over the blockage state, then the usual estimator
        with np.errstate(divide="ignore"):
            terms = np.logaddexp(np.log(mu) - th * rates, np.log1p(-mu) - th * om * rates)
        return _mc_estimate(terms, th)
    if th == 0:
        base = effective_capacity_vlc(geom, vlc, qos, method)
        return EcEstimate(value=(mu + (1 - mu) * om) * base.value, method=method,
                          stderr=0.0, theta=0.0)
    fn = vlc_log_mgf_closed_form if method == "closed-form" else vlc_log_mgf_quadrature
    if method not in ("closed-form", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    parts = []
    if mu > 0:
        parts.append(math.log(mu) + fn(geom, vlc, qos))
    if mu < 1:
        parts.append(math.log1p(-mu) + fn(geom, vlc, qos, scale=om))
    log_m = float(logsumexp(parts))
    return EcEstimate(value=-log_m / th, method=method, stderr=0.0, theta=th)


# --------------------------------------------------------------------------
# RF


@dataclass(frozen=True)
class RfDraws:
    """Joint position/shadowing/fading draws for the RF link.

    ``mean_snr`` is the large-scale SNR P e^(-L/10) / sigma^2 of each draw and
    ``fading`` the unit-mean Rician power |h|^2 / E|h|^2 drawn with it.
    """

    d0: np.ndarray
    shadowing_db: np.ndarray
    mean_snr: np.ndarray
    fading: np.ndarray

    @property
    def snr(self) -> np.ndarray:
        return self.mean_snr * self.fading

    @functools.cached_property
    def interpolator(self) -> _fading.LogSnrInterpolator:
        return _fading.LogSnrInterpolator(self.mean_snr)

    def rates(self, rf: RfParams, T: float) -> np.ndarray:
        return T * rf.bandwidth * np.log1p(self.snr) / LN2


def _draw_rf_chunk(geom: Geometry, rf: RfParams):
    def draw(g: np.random.Generator, size: int):
        x, y = channel.sample_user_xy(geom.d_c, g, size)
        d0 = geom.d0(x, y)
        fs = channel.sample_rf_fading(d0, rf, g)
        loss = channel.rf_path_loss_db(d0, rf, fs.shadowing_db)
        g_bar = channel.rf_mean_gain(loss)
        return d0, fs.shadowing_db, rf.power * g_bar / rf.noise_power, fs.gain / g_bar
    return draw


def draw_rf(geom: Geometry, rf: RfParams, n: int, seed: int, workers: int = 1) -> RfDraws:
    parts = _rng.map_chunks(_draw_rf_chunk(geom, rf), n, seed, stream=_RF_STREAM,
                            workers=workers)
    cols = list(zip(*parts)) if parts else [(), (), (), ()]
    return RfDraws(*(_rng.concat(c) for c in cols))


def sample_rf_rates(geom: Geometry, rf: RfParams, T: float, n: int, seed: int,
                    workers: int = 1) -> np.ndarray:
    return draw_rf(geom, rf, n, seed, workers).rates(rf, T)


def rf_rate_sampler(geom: Geometry, rf: RfParams, T: float):
    """``(rng, n) -> rates`` with position, shadowing and fading redrawn every frame."""
    chunk = _draw_rf_chunk(geom, rf)

    def draw(g: np.random.Generator, size: int) -> np.ndarray:
        _, _, mean_snr, fade = chunk(g, size)
        return T * rf.bandwidth * np.log1p(mean_snr * fade) / LN2
    return draw


def effective_capacity_rf(geom: Geometry, rf: RfParams, qos: QosSpec, samples: int = 10**6,
                          seed: int = 0, fading: Literal["integrated", "sampled"] = "integrated",
                          workers: int = 1, draws: RfDraws | None = None) -> EcEstimate:
    """RF effective capacity by Monte Carlo over user position and shadowing.

    With ``fading="integrated"`` (default) the Rician fading of each draw is
    averaged exactly, which removes the deep-fade sampling problem; with
    ``"sampled"`` the drawn fading values are used directly.
    """
    if draws is None:
        if samples < 10**4:
            raise ValueError(f"samples must be >= 1e4, got {samples}")
        draws = draw_rf(geom, rf, samples, seed, workers)
    th = qos.theta
    scale = qos.T * rf.bandwidth
    if fading == "sampled":
        rates = draws.rates(rf, qos.T)
        return _mean_estimate(rates) if th == 0 else _mc_estimate(-th * rates, th)
    if fading != "integrated":
        raise ValueError(f"unknown fading mode {fading!r}")
    if th == 0:
        return _mean_estimate(scale * _fading.rician_mean_log2_many(
            draws.mean_snr, rf.rician_k, draws.interpolator))
    beta = th * scale / LN2
    return _mc_estimate(_fading.rician_log_mgf_many(beta, draws.mean_snr, rf.rician_k,
                                                   draws.interpolator), th)


# --------------------------------------------------------------------------
# illumination and selection


def min_illuminance_ratio(phi_half: float) -> float:
    """Smallest E_max/E_min compatible with a cell of radius d_v tan(phi_half)."""
    r = channel.lambertian_index(phi_half)
    return math.cos(phi_half) ** (-(r + 3))


def illuminance_ratio(d_c: float, d_v: float, vlc: VlcParams) -> float:
    """E_max/E_min between the centre and the edge of a cell of radius ``d_c``."""
    r = vlc.lambertian_index
    return (1.0 + (d_c / d_v) ** 2) ** ((r + 3) / 2)


def max_cell_radius(illum: IlluminationSpec, geom: Geometry | float, vlc: VlcParams) -> float:
    d_v = geom.d_v if isinstance(geom, Geometry) else float(geom)
    r = vlc.lambertian_index
    return d_v * math.sqrt(illum.ratio ** (2 / (r + 3)) - 1.0)


def viewing_angle_admissible(illum: IlluminationSpec, phi_half: float) -> bool:
    """tan(phi_half) <= sqrt(ratio^(2/(r+3)) - 1)."""
    r = channel.lambertian_index(phi_half)
    return math.tan(phi_half) <= math.sqrt(illum.ratio ** (2 / (r + 3)) - 1.0) * (1 + 1e-12)


def viewing_angle_for_span(ratio: float) -> float:
    """LED half-angle whose cell d_v tan(phi) has exactly the span ``ratio``.

    The minimum span increases with the angle and tends to 2 as the angle
    goes to zero, so only ratio > 2 is reachable.
    """
    if not ratio > 2.0:
        raise ValueError(f"no viewing angle gives E_max/E_min = {ratio} (need > 2)")
    return optimize.brentq(lambda phi: math.log(min_illuminance_ratio(phi)) - math.log(ratio),
                           1e-4, math.pi / 2 - 1e-9, xtol=1e-14, rtol=1e-14)


def illumination_limited_radius(d_v: float, vlc: VlcParams) -> float:
    """Cell radius d_v tan(phi_half), i.e. the span equal to the angle's minimum."""
    return d_v * math.tan(vlc.phi_half)


def select_link(ec_rf: EcEstimate, ec_vlc: EcEstimate) -> Link:
    """Serving link with the larger effective capacity; ties go to VLC."""
    if not math.isclose(ec_rf.theta, ec_vlc.theta, rel_tol=1e-12, abs_tol=0.0):
        raise ValueError(f"estimates use different theta ({ec_rf.theta} vs {ec_vlc.theta})")
    return Link.VLC if ec_vlc.value >= ec_rf.value else Link.RF
