"""Rician fading averages conditioned on the mean SNR.

The RF MGF E{(1 + gamma Y)^-beta} of a unit-mean Rician power Y is dominated
by deep fades once beta exceeds one: the mass sits at Y ~ 1/gamma, far below
anything a 10^6-draw sample reaches. These routines integrate the fading out
exactly for a given mean SNR gamma so Monte Carlo is only needed over
position and shadowing.

Integration runs over u = ln y with the trapezoid rule. The integrand is
smooth and decays at both ends of the window, and the sliver [0, y_lo] is
added analytically.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import i0e, logsumexp

_NODES = 1201
_Y_LO_REL = 1e-7   # y_lo = _Y_LO_REL / gamma
_GRID = 1025


def rician_logpdf(y, k: float):
    """Log density of |h|^2 / E|h|^2 for a Rician channel with factor ``k``."""
    y = np.asarray(y, dtype=float)
    z = 2.0 * np.sqrt(k * (k + 1.0) * y)
    return math.log(k + 1.0) - k - (k + 1.0) * y + z + np.log(i0e(z))


def _upper_limit(k: float) -> float:
    # density below e^-60 beyond this point
    return (math.sqrt(k) + math.sqrt(60.0)) ** 2 / (k + 1.0) + 1.0


def _grid(gamma: np.ndarray, k: float):
    """Shared ln-y grid for every gamma, reaching 1e-7 / max(gamma) on the left."""
    gamma = np.asarray(gamma, dtype=float)
    y_hi = _upper_limit(k)
    g_max = float(np.max(gamma)) if gamma.size else 1.0
    y_lo = min(_Y_LO_REL / max(g_max, 1e-300), 1e-9 * y_hi)
    # narrow Rician peaks (large k) need a finer step than the deep-fade ramp
    width = math.sqrt(2.0 / (k + 1.0))
    span = math.log(y_hi / y_lo)
    n = max(_NODES, int(span / min(0.03, width / 12.0)) + 1)
    u = np.linspace(math.log(y_lo), math.log(y_hi), n)
    logw = np.full(n, math.log(span / (n - 1)))
    logw[[0, -1]] += math.log(0.5)
    return u, logw, y_lo


def rician_log_mgf(beta: float, gamma, k: float):
    """ln E{(1 + gamma Y)^-beta} for unit-mean Rician power Y, elementwise in gamma."""
    gamma = np.asarray(gamma, dtype=float)
    if beta == 0:
        return np.zeros_like(gamma)
    if math.isinf(k):
        return -beta * np.log1p(gamma)
    u, logw, y_lo = _grid(gamma, k)
    y = np.exp(u)
    g = gamma[..., None]
    body = logsumexp(logw - beta * np.log1p(g * y) + rician_logpdf(y, k) + u, axis=-1)
    # f(y) ~ f(0) on [0, y_lo]; integrate (1 + gamma y)^-beta exactly there
    gy = gamma * y_lo
    if abs(beta - 1.0) < 1e-12:
        head = np.log1p(gy)
    else:
        head = -np.expm1((1.0 - beta) * np.log1p(gy)) / (beta - 1.0)
    with np.errstate(divide="ignore"):
        log_head = np.log(head) - np.log(np.maximum(gamma, 1e-300)) + math.log(k + 1.0) - k
    return np.logaddexp(body, log_head)


def rician_mean_log2(gamma, k: float):
    """E{log2(1 + gamma Y)} for unit-mean Rician power Y."""
    gamma = np.asarray(gamma, dtype=float)
    if math.isinf(k):
        return np.log1p(gamma) / math.log(2.0)
    u, logw, _ = _grid(gamma, k)
    y = np.exp(u)
    w = np.exp(logw + rician_logpdf(y, k) + u)
    return np.sum(w * np.log1p(gamma[..., None] * y), axis=-1) / math.log(2.0)


class LogSnrInterpolator:
    """Linear interpolation in ln(gamma) on a uniform grid spanning the samples.

    The bracketing indices and weights are computed once, so evaluating
    several functions (one per theta) over the same draws is cheap.
    """

    def __init__(self, gamma, size: int = _GRID):
        gamma = np.asarray(gamma, dtype=float)
        self.shape = gamma.shape
        lg = np.log(gamma).ravel()
        lo, hi = (float(lg.min()), float(lg.max())) if lg.size else (0.0, 0.0)
        if hi - lo < 1e-12:
            hi = lo + 1e-6
        self.nodes = np.exp(np.linspace(lo, hi, size))
        pos = (lg - lo) / (hi - lo) * (size - 1)
        self.idx = np.clip(pos.astype(np.int64), 0, size - 2)
        self.w = pos - self.idx

    def __call__(self, fn) -> np.ndarray:
        v = np.asarray(fn(self.nodes), dtype=float)
        out = v[self.idx] * (1.0 - self.w) + v[self.idx + 1] * self.w
        return out.reshape(self.shape)


def rician_log_mgf_many(beta: float, gamma, k: float,
                        interp: LogSnrInterpolator | None = None) -> np.ndarray:
    """``rician_log_mgf`` for large sample arrays via interpolation in ln gamma."""
    interp = interp or LogSnrInterpolator(gamma)
    return interp(lambda g: rician_log_mgf(beta, g, k))


def rician_mean_log2_many(gamma, k: float,
                          interp: LogSnrInterpolator | None = None) -> np.ndarray:
    interp = interp or LogSnrInterpolator(gamma)
    return interp(lambda g: rician_mean_log2(g, k))
