"""Parameter containers for the hybrid RF/VLC downlink.

Defaults reproduce the indoor scenario used throughout the package:
20 MHz / 10 mW RF at 2.4 GHz, a 9 W LED with 40 MHz modulation bandwidth,
frame duration 0.1 ms and a 2.5 m ceiling-to-desk distance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


def theta_from_db(theta_db):
    """QoS exponent in 1/bit from its dB value (10*log10 convention)."""
    out = db_to_linear(theta_db)
    return float(out) if np.ndim(out) == 0 else out


# -114 dBm/MHz expressed in W/Hz
_RF_NOISE_PSD = 10.0 ** (-114.0 / 10.0) * 1e-3 / 1e6


@dataclass(frozen=True)
class Geometry:
    """Vertical distance, VLC cell radius and RF-AP offset (all metres).

    The VLC AP sits at the origin facing down, the RF AP at (0, y_r, 0) and
    the user plane at z = -d_v.
    """

    d_v: float = 2.5
    d_c: float = 2.5
    y_r: float = 20.0

    def __post_init__(self):
        if not self.d_v > 0:
            raise ValueError(f"d_v must be > 0, got {self.d_v}")
        if not self.d_c >= 0:
            raise ValueError(f"d_c must be >= 0, got {self.d_c}")

    def d1(self, d_h):
        """LED-to-PD distance for horizontal offset ``d_h``."""
        return np.hypot(d_h, self.d_v)

    def d0(self, x, y):
        """Distance from a user at (x, y, -d_v) to the RF AP."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return np.sqrt(x * x + (y - self.y_r) ** 2 + self.d_v**2)

    def replace(self, **changes) -> "Geometry":
        return replace(self, **changes)


@dataclass(frozen=True)
class RfParams:
    bandwidth: float = 20e6          # Hz
    power: float = 10e-3             # W
    rician_k: float = float(db_to_linear(5.0))
    path_loss_exp: float = 1.6
    shadowing_std: float = 1.8       # dB
    noise_psd: float = _RF_NOISE_PSD  # W/Hz
    ref_loss_db: float = 40.0
    ref_distance: float = 1.0        # m

    def __post_init__(self):
        for name in ("bandwidth", "power", "path_loss_exp", "noise_psd", "ref_distance"):
            if not getattr(self, name) > 0:
                raise ValueError(f"RfParams.{name} must be > 0")
        if self.rician_k < 0 or self.shadowing_std < 0:
            raise ValueError("RfParams.rician_k and shadowing_std must be >= 0")

    @property
    def noise_power(self) -> float:
        return self.noise_psd * self.bandwidth

    def replace(self, **changes) -> "RfParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class VlcParams:
    area: float = 1e-4               # m^2
    fov: float = math.pi / 2         # rad
    phi_half: float = math.radians(45.0)
    refractive_index: float = 1.5
    filter_gain: float = 1.0
    responsivity: float = 0.53       # A/W
    varsigma: float = 3.0
    power: float = 9.0               # W (optical)
    bandwidth: float = 40e6          # Hz
    noise_psd: float = 1e-21         # A^2/Hz
    c_rate: float = math.sqrt(math.e / (2 * math.pi))

    def __post_init__(self):
        for name in ("area", "refractive_index", "filter_gain", "responsivity",
                     "varsigma", "power", "bandwidth", "noise_psd", "c_rate"):
            if not getattr(self, name) > 0:
                raise ValueError(f"VlcParams.{name} must be > 0")
        if not 0 < self.phi_half < math.pi / 2:
            raise ValueError("VlcParams.phi_half must lie in (0, pi/2)")
        if not 0 < self.fov <= math.pi / 2:
            raise ValueError("VlcParams.fov must lie in (0, pi/2]")

    @property
    def lambertian_index(self) -> float:
        return -1.0 / math.log2(math.cos(self.phi_half))

    @property
    def noise_power(self) -> float:
        return self.noise_psd * self.bandwidth

    @property
    def omega(self) -> float:
        """Receiver-side constant A D n^2 / (2 pi sin^2 FOV)."""
        return (self.area * self.filter_gain * self.refractive_index**2
                / (2 * math.pi * math.sin(self.fov) ** 2))

    def replace(self, **changes) -> "VlcParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class QosSpec:
    theta: float = 1e-3   # 1/bit
    T: float = 1e-4       # s

    def __post_init__(self):
        if not self.theta >= 0:
            raise ValueError(f"theta must be >= 0, got {self.theta}")
        if not self.T > 0:
            raise ValueError(f"T must be > 0, got {self.T}")

    @classmethod
    def from_db(cls, theta_db: float, T: float = 1e-4) -> "QosSpec":
        return cls(theta=theta_from_db(theta_db), T=T)

    def replace(self, **changes) -> "QosSpec":
        return replace(self, **changes)


@dataclass(frozen=True)
class FadingSample:
    """RF fading coefficients and the shadowing draws (dB) used for them."""

    h: np.ndarray
    shadowing_db: np.ndarray = field(default_factory=lambda: np.zeros(()))

    @property
    def gain(self) -> np.ndarray:
        return np.abs(self.h) ** 2
