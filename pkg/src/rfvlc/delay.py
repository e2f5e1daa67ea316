"""Non-asymptotic delay bounds for a constant-rate source.

For an effective-capacity curve C(theta) and arrival rate a (bits/frame),

    Pr{D > d} <= eps   with   d(theta) = -ln(theta (C(theta) - a) eps) / (theta a)

for every free parameter theta with C(theta) > a and
theta <= 1 / (eps (C(theta) - a)). The bound is minimised over theta.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

EcFn = Callable[[float], float]

THETA_LO = 1e-8
THETA_HI = 1e-1
GRID = 200


@dataclass(frozen=True)
class ArrivalSpec:
    a: float
    epsilon: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"arrival rate must be > 0, got {self.a}")
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")


@dataclass(frozen=True)
class DelayBound:
    d: float              # frames
    theta_star: float
    feasible: bool
    ec_at_theta: float = math.nan

    def seconds(self, T: float) -> float:
        return self.d * T


INFEASIBLE = DelayBound(d=math.inf, theta_star=math.nan, feasible=False)


def theta_grid(lo: float = THETA_LO, hi: float = THETA_HI, num: int = GRID) -> np.ndarray:
    return np.geomspace(lo, hi, num)


def is_admissible(theta: float, ec: float, arr: ArrivalSpec) -> bool:
    """Stability C > a and the cap theta <= 1/(eps (C - a))."""
    gap = ec - arr.a
    return theta > 0 and gap > 0 and theta * gap * arr.epsilon <= 1.0


def bound_value(theta: float, ec: float, arr: ArrivalSpec) -> float:
    return -math.log(theta * (ec - arr.a) * arr.epsilon) / (theta * arr.a)


def _tabulate(ec_fn: EcFn, thetas: np.ndarray) -> np.ndarray:
    return np.array([float(ec_fn(float(t))) for t in thetas])


def feasibility_range(ec_fn: EcFn, arr: ArrivalSpec, thetas: np.ndarray | None = None,
                      ecs: np.ndarray | None = None) -> list[tuple[float, float]]:
    """Maximal runs of grid points that satisfy both constraints, as (lo, hi) pairs."""
    thetas = theta_grid() if thetas is None else np.asarray(thetas, dtype=float)
    ecs = _tabulate(ec_fn, thetas) if ecs is None else ecs
    ok = [is_admissible(t, c, arr) for t, c in zip(thetas, ecs)]
    runs, start = [], None
    for i, flag in enumerate(ok):
        if flag and start is None:
            start = i
        if not flag and start is not None:
            runs.append((float(thetas[start]), float(thetas[i - 1])))
            start = None
    if start is not None:
        runs.append((float(thetas[start]), float(thetas[-1])))
    return runs


def delay_bound(ec_fn: EcFn, arr: ArrivalSpec, thetas: np.ndarray | None = None,
                ecs: np.ndarray | None = None, refine: bool = True) -> DelayBound:
    """Tightest bound over the theta grid, polished by a bounded golden-section
    search between the neighbours of the best grid point."""
    thetas = theta_grid() if thetas is None else np.asarray(thetas, dtype=float)
    ecs = _tabulate(ec_fn, thetas) if ecs is None else np.asarray(ecs, dtype=float)

    best, best_i = INFEASIBLE, -1
    for i, (t, c) in enumerate(zip(thetas, ecs)):
        if is_admissible(t, c, arr):
            d = bound_value(t, c, arr)
            if d < best.d:
                best, best_i = DelayBound(d=d, theta_star=float(t), feasible=True,
                                          ec_at_theta=float(c)), i
    if not best.feasible or not refine:
        return best

    lo = math.log(thetas[max(best_i - 1, 0)])
    hi = math.log(thetas[min(best_i + 1, len(thetas) - 1)])
    if hi <= lo:
        return best

    def objective(log_t):
        t = math.exp(log_t)
        c = float(ec_fn(t))
        # a finite penalty keeps the golden-section arithmetic free of inf - inf
        return bound_value(t, c, arr) if is_admissible(t, c, arr) else 1e300

    res = minimize_scalar(objective, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-4})
    if res.success and res.fun < best.d:
        t = math.exp(res.x)
        c = float(ec_fn(t))
        if is_admissible(t, c, arr):
            return DelayBound(d=bound_value(t, c, arr), theta_star=t, feasible=True,
                              ec_at_theta=c)
    return best


def cached(ec_fn: EcFn) -> EcFn:
    """Memoise an EC curve so grid evaluations are shared across arrival rates."""
    store: dict[float, float] = {}

    def fn(theta: float) -> float:
        if theta not in store:
            store[theta] = float(ec_fn(theta))
        return store[theta]

    return fn
