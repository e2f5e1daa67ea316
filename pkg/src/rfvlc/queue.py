"""Discrete-event check of the buffer: Lindley recursion under constant
fluid arrivals, FCFS delays, tail-exponent fits and delay-violation rates.

Frame ``l`` starts with backlog Q[l], receives ``a`` bits and serves up to
R[l] bits, so Q[l+1] = max(Q[l] + a - R[l], 0). The bits arriving in frame
``l`` leave in frame l + D[l] with

    D[l] = min{k >= 0 : Q[l+k+1] <= k a},

so D = 0 means they were cleared in their own frame. Arrivals still queued
at the end of the trace are censored (D = -1) and left out of statistics.

Inside a frame the queue is a fluid: bits arrive at rate ``a`` and leave at
rate R[l] while there is a backlog. With constant-rate arrivals a bit that
leaves at time t has waited exactly Q(t)/a frames, since the backlog then
holds precisely the bits that arrived after it. This bit-level delay is what
delay bounds in fractions of a frame refer to; the integer D above rounds it
up to whole frames.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

from . import kernels, rng as _rng

Sampler = Callable[[np.random.Generator, int], np.ndarray]

_QUEUE_STREAM = 3


class UnstableQueueWarning(UserWarning):
    pass


class InsufficientTailError(ValueError):
    pass


@dataclass(frozen=True)
class QueueTrace:
    queue: np.ndarray      # bits, length frames + 1 (starts at 0)
    delay: np.ndarray      # frames, -1 where censored
    arrival: float
    frames: int
    seed: int | None
    service: np.ndarray | None = None

    def departures(self) -> float:
        """Cumulative bits served over the trace."""
        return self.arrival * self.frames - float(self.queue[-1])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["frame", "queue_bits", "delay_frames"])
            for i in range(self.frames):
                w.writerow([i, repr(float(self.queue[i])), int(self.delay[i])])


@dataclass(frozen=True)
class TailFit:
    theta_hat: float
    q_lo: float
    q_hi: float
    r_squared: float
    points: int


@dataclass(frozen=True)
class Violation:
    p: float
    ci_low: float
    ci_high: float
    count: int
    n: int


def draw_service(sampler: Sampler, frames: int, seed: int, workers: int = 1) -> np.ndarray:
    parts = _rng.map_chunks(sampler, frames, seed, stream=_QUEUE_STREAM, workers=workers)
    return _rng.concat(parts).astype(float, copy=False)


def simulate_queue(a: float, service: Sampler | np.ndarray, frames: int | None = None,
                   seed: int | None = None, workers: int = 1,
                   keep_service: bool = True) -> QueueTrace:
    """Run the recursion for ``frames`` frames.

    ``service`` is either a sampler ``(rng, n) -> rates`` driven from ``seed``
    or an explicit array of per-frame rates.
    """
    if a < 0:
        raise ValueError("arrival rate must be >= 0")
    if callable(service):
        if frames is None or seed is None:
            raise ValueError("a sampler needs frames and seed")
        r = draw_service(service, frames, seed, workers)
    else:
        r = np.ascontiguousarray(service, dtype=float)
        if frames is not None:
            r = r[:frames]
    n = r.size
    if a >= float(np.mean(r)) and n:
        warnings.warn("arrival rate >= mean service: queue is unstable",
                      UnstableQueueWarning, stacklevel=2)
    q = kernels.lindley(float(a), r)
    if not np.all(np.isfinite(q)):
        raise OverflowError("queue length overflowed")
    d = kernels.fcfs_delays(float(a), q)
    return QueueTrace(queue=q, delay=d, arrival=float(a), frames=n, seed=seed,
                      service=r if keep_service else None)


def fit_tail_exponent(trace: QueueTrace, lo: float = 0.90, hi: float = 0.999,
                      burn_in: float = 0.01, points: int = 40) -> TailFit:
    """Least-squares slope of ln Pr{Q >= q} against q over a quantile window."""
    start = int(burn_in * trace.frames)
    q = np.sort(trace.queue[1 + start:])
    if q.size == 0:
        raise InsufficientTailError("empty trace")
    q_lo, q_hi = (float(v) for v in np.quantile(q, [lo, hi]))
    if not q_lo > 0 or not q_hi > q_lo:
        frac = float(np.mean(q > 0))
        raise InsufficientTailError(
            f"no tail in the {lo:.3g}-{hi:.3g} quantile window: q_lo={q_lo:.4g}, "
            f"q_hi={q_hi:.4g}, Pr{{Q > 0}}={frac:.3g}")
    grid = np.linspace(q_lo, q_hi, points)
    ccdf = 1.0 - np.searchsorted(q, grid, side="left") / q.size
    fit = stats.linregress(grid, np.log(ccdf))
    return TailFit(theta_hat=float(-fit.slope), q_lo=q_lo, q_hi=q_hi,
                   r_squared=float(fit.rvalue**2), points=points)


def _time_above(q0: np.ndarray, slope: np.ndarray, level: float) -> np.ndarray:
    """Length of {s in [0, 1): q0 + slope s > level} for a linear in-frame backlog."""
    with np.errstate(divide="ignore", invalid="ignore"):
        cross = (level - q0) / slope
    above = np.where(slope >= 0, 1.0, np.clip(cross, 0.0, 1.0))
    rising = np.where(slope > 0, np.clip(1.0 - cross, 0.0, 1.0), 0.0)
    return np.where(q0 > level, above, rising)


def _interval(k: float, n: int, confidence: float) -> tuple[float, float]:
    alpha = 1.0 - confidence
    lo = 0.0 if k <= 0 else float(stats.beta.ppf(alpha / 2, k, n - k + 1))
    hi = 1.0 if k >= n else float(stats.beta.ppf(1 - alpha / 2, k + 1, n - k))
    return lo, hi


def empirical_delay_violation(trace: QueueTrace, d: float, confidence: float = 0.95,
                              burn_in: float = 0.0,
                              granularity: str = "bit") -> Violation:
    """Fraction of arrivals delayed by more than ``d`` frames, with a
    Clopper-Pearson interval.

    ``granularity="bit"`` weighs every bit by its fluid delay Q(t)/a (needs
    the service trace); the interval then treats the frames as the trials,
    with ``count`` the equivalent number of violating frames. ``"frame"``
    uses the integer per-frame delays, censored arrivals excluded.
    """
    start = int(burn_in * trace.frames)
    if granularity == "frame":
        delay = trace.delay[start:]
        delay = delay[delay >= 0]
        n = int(delay.size)
        if n == 0:
            return Violation(math.nan, 0.0, 1.0, 0, 0)
        k = int(np.count_nonzero(delay > d))
        lo, hi = _interval(k, n, confidence)
        return Violation(p=k / n, ci_low=lo, ci_high=hi, count=k, n=n)
    if granularity != "bit":
        raise ValueError(f"granularity must be 'bit' or 'frame', got {granularity!r}")
    if trace.service is None:
        raise ValueError("bit-level delays need the service trace (keep_service=True)")
    a = trace.arrival
    q0 = trace.queue[start:-1]
    r = trace.service[start:]
    n = int(r.size)
    served = float(np.sum(np.minimum(q0 + a, r)))
    if n == 0 or served <= 0:
        return Violation(math.nan, 0.0, 1.0, 0, n)
    late = float(np.sum(r * _time_above(q0, a - r, a * max(d, 0.0))))
    p = late / served
    lo, hi = _interval(p * n, n, confidence)
    return Violation(p=p, ci_low=lo, ci_high=hi, count=int(round(p * n)), n=n)
