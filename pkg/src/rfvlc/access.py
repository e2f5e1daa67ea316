"""Per-user effective capacity under TDMA and FDMA sharing.

TDMA gives each user the whole power and bandwidth for T/N_u of every
frame; FDMA gives each user the whole frame with P/N_u and B/N_u. Either
way the per-user rate below is measured in bits per original frame, and the
QoS exponent stays defined per original frame.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Literal, Union

from .capacity import (EcEstimate, RfDraws, draw_rf, effective_capacity_rf,
                       effective_capacity_vlc)
from .params import Geometry, QosSpec, RfParams, VlcParams

Params = Union[RfParams, VlcParams]


class Scheme(str, enum.Enum):
    TDMA = "tdma"
    FDMA = "fdma"


@dataclass(frozen=True)
class AccessConfig:
    scheme: Scheme = Scheme.TDMA
    num_users: int = 1

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if int(self.num_users) != self.num_users or self.num_users < 1:
            raise ValueError(f"num_users must be a positive integer, got {self.num_users}")


def per_user_params(base: Params, T: float, cfg: AccessConfig) -> tuple[Params, float]:
    """Resources seen by one user. Noise power follows the bandwidth automatically."""
    n = cfg.num_users
    if n == 1:
        return base, T
    if cfg.scheme is Scheme.TDMA:
        return base, T / n
    return base.replace(bandwidth=base.bandwidth / n, power=base.power / n), T


def per_user_ec(link: Literal["rf", "vlc"], geom: Geometry, params: Params, qos: QosSpec,
                cfg: AccessConfig, method: str = "closed-form", samples: int = 10**6,
                seed: int = 0, workers: int = 1, draws: RfDraws | None = None) -> EcEstimate:
    """Per-user effective capacity in bits per original frame.

    For RF, ``draws`` may be shared across schemes and user counts: position
    and shadowing do not depend on the split, only the mean SNR scale does,
    and that is recomputed here.
    """
    p, T = per_user_params(params, qos.T, cfg)
    q = qos.replace(T=T)
    if link == "vlc":
        return effective_capacity_vlc(geom, p, q, method=method, samples=samples, seed=seed,
                                      workers=workers)
    if link != "rf":
        raise ValueError(f"unknown link {link!r}")
    if draws is None:
        draws = draw_rf(geom, params, samples, seed, workers)
    # mean SNR scales with P / (N0 B); identical for TDMA, and for FDMA the ratio cancels
    factor = (p.power / p.noise_power) / (params.power / params.noise_power)
    if not math.isclose(factor, 1.0, rel_tol=1e-12):
        draws = RfDraws(draws.d0, draws.shadowing_db, draws.mean_snr * factor, draws.fading)
    return effective_capacity_rf(geom, p, q, draws=draws)
