"""Figure presets: each one turns a scenario into a table of curves.

Every preset returns a ``SweepResult`` whose column order is fixed by the
scenario's sweep lists. Rates are reported in bits/s (``units="bps"``) or
bits per frame (``units="bpf"``); the unit is part of each column name.
All randomness comes from the scenario seed, and curves share their draws
(common random numbers), so differences between curves are not noise.
"""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import logsumexp

from . import capacity as cap, delay as _delay, kernels, queue as _queue
from .access import AccessConfig, Scheme, per_user_ec
from .config import Scenario
from .params import theta_from_db

FIGURES = ("fig3-ec-vs-theta", "fig4-ec-vs-mu", "fig5-ec-vs-users",
           "fig6-delay-vs-arrival", "queue-validate")
UNITS = ("bps", "bpf")


class NumericalFailure(RuntimeError):
    """A sweep point could not be evaluated."""


@dataclass
class SweepResult:
    figure: str
    columns: list[str]
    rows: list[tuple]
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)

    def csv_body(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(result: SweepResult, path) -> str:
    """Write the CSV and a ``<path>.meta.json`` sidecar; returns the sidecar path."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(result.csv_body())
    meta_path = f"{path}.meta.json"
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(result.metadata, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return meta_path


def tag(v: float) -> str:
    """Column-name fragment for a number: 5.0 -> '5', 0.5 -> '0p5', -3 -> 'm3'."""
    s = repr(float(v))
    if s.endswith(".0"):
        s = s[:-2]
    return s.replace("-", "m").replace(".", "p")


def axis(spec: dict) -> np.ndarray:
    return np.linspace(float(spec["start"]), float(spec["stop"]), int(spec["num"]))


def _pmap(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _scale(s: Scenario, units: str) -> float:
    if units not in UNITS:
        raise ValueError(f"units must be one of {UNITS}")
    return 1.0 / s.qos.T if units == "bps" else 1.0


def _vlc_log_mean_exp(rates: np.ndarray, theta: float) -> float:
    return float(logsumexp(-theta * rates) - math.log(rates.size))


def vlc_ec_fn(s: Scenario, phi_half: float | None = None, span: float | None = None,
              method: str | None = None) -> Callable[[float], float]:
    """theta -> VLC EC (bits/frame) for one LED setup, reusing MC draws across theta."""
    geom, vlc = s.vlc_setup(phi_half=phi_half, span=span)
    method = method or s.method
    if method == "monte-carlo":
        rates = cap.sample_vlc_rates(geom, vlc, s.qos.T, s.samples, s.seed)
        return lambda th: (float(np.mean(rates)) if th == 0
                           else -_vlc_log_mean_exp(rates, th) / th)
    return lambda th: cap.effective_capacity_vlc(geom, vlc, s.qos.replace(theta=th),
                                                 method=method).value


def rf_ec_fn(s: Scenario, y_r: float | None = None,
             phi_half: float | None = None) -> Callable[[float], float]:
    geom = s.rf_geometry(y_r=y_r, phi_half=phi_half)
    draws = cap.draw_rf(geom, s.rf, s.samples, s.seed)
    return lambda th: cap.effective_capacity_rf(geom, s.rf, s.qos.replace(theta=th),
                                                draws=draws).value


# --------------------------------------------------------------------------
# presets


def fig3(s: Scenario, units: str = "bps", workers: int = 1) -> SweepResult:
    sw = s.sweep("ec")
    theta_db = axis(sw["theta_db"])
    thetas = [float(theta_from_db(t)) for t in theta_db]
    k = _scale(s, units)
    rf_phi = math.radians(sw["rf_phi_half_deg"])

    def rf_curve(y_r):
        geom = s.rf_geometry(y_r=y_r, phi_half=rf_phi)
        draws = cap.draw_rf(geom, s.rf, s.samples, s.seed)
        return [cap.effective_capacity_rf(geom, s.rf, s.qos.replace(theta=t), draws=draws)
                for t in thetas]

    def vlc_curve(phi_deg):
        geom, vlc = s.vlc_setup(phi_half=math.radians(phi_deg))
        rates = None
        if s.method == "monte-carlo":
            rates = cap.sample_vlc_rates(geom, vlc, s.qos.T, s.samples, s.seed)
        return [cap.effective_capacity_vlc(geom, vlc, s.qos.replace(theta=t), method=s.method,
                                           rates=rates) for t in thetas]

    jobs = [("rf", y) for y in sw["y_r"]] + [("vlc", p) for p in sw["phi_half_deg"]]
    curves = _pmap(lambda j: rf_curve(j[1]) if j[0] == "rf" else vlc_curve(j[1]), jobs, workers)
    cols = ["theta_db"]
    for kind, v in jobs:
        name = f"ec_rf_yr{tag(v)}" if kind == "rf" else f"ec_vlc_phi{tag(v)}"
        cols += [f"{name}_{units}", f"{name}_stderr_{units}"]
    rows = []
    for i, tdb in enumerate(theta_db):
        row = [float(tdb)]
        for c in curves:
            row += [c[i].value * k, c[i].stderr * k]
        rows.append(tuple(row))
    return SweepResult("fig3-ec-vs-theta", cols, rows)


def fig4(s: Scenario, units: str = "bps", workers: int = 1) -> SweepResult:
    sw = s.sweep("blockage")
    mus = axis(sw["mu"])
    k = _scale(s, units)
    jobs = [(p, om) for p in sw["phi_half_deg"] for om in sw["omega"]]

    def curve(job):
        phi_deg, om = job
        geom, vlc = s.vlc_setup(phi_half=math.radians(phi_deg))
        rates = None
        if s.method == "monte-carlo":
            rates = cap.sample_vlc_rates(geom, vlc, s.qos.T, s.samples, s.seed)
        return [cap.effective_capacity_vlc_blockage(
            geom, vlc, s.qos, cap.BlockageModel(mu=float(mu), omega=float(om)),
            method=s.method, rates=rates) for mu in mus]

    curves = _pmap(curve, jobs, workers)
    cols = ["mu"]
    for p, om in jobs:
        name = f"ec_vlc_phi{tag(p)}_omega{tag(om)}"
        cols += [f"{name}_{units}", f"{name}_stderr_{units}"]
    rows = []
    for i, mu in enumerate(mus):
        row = [float(mu)]
        for c in curves:
            row += [c[i].value * k, c[i].stderr * k]
        rows.append(tuple(row))
    return SweepResult("fig4-ec-vs-mu", cols, rows)


def fig5(s: Scenario, units: str = "bps", workers: int = 1) -> SweepResult:
    sw = s.sweep("users")
    users = [int(n) for n in sw["num_users"]]
    spans = [float(x) for x in sw["spans"]]
    k = _scale(s, units)
    geom_rf = s.rf_geometry()
    draws = cap.draw_rf(geom_rf, s.rf, s.samples, s.seed)
    setups = [s.vlc_setup(span=x) for x in spans]

    def point(n):
        out = []
        for sch in (Scheme.TDMA, Scheme.FDMA):
            e = per_user_ec("rf", geom_rf, s.rf, s.qos, AccessConfig(sch, n), draws=draws)
            out += [e.value * k, e.stderr * k]
        for geom, vlc in setups:
            for sch in (Scheme.TDMA, Scheme.FDMA):
                e = per_user_ec("vlc", geom, vlc, s.qos, AccessConfig(sch, n), method=s.method,
                                samples=s.samples, seed=s.seed)
                out += [e.value * k, e.stderr * k]
        return out

    draws.interpolator  # build once before threads share it
    vals = _pmap(point, users, workers)
    cols = ["num_users"]
    for sch in ("tdma", "fdma"):
        cols += [f"ec_rf_{sch}_{units}", f"ec_rf_{sch}_stderr_{units}"]
    for x in spans:
        for sch in ("tdma", "fdma"):
            cols += [f"ec_vlc_{sch}_span{tag(x)}_{units}",
                     f"ec_vlc_{sch}_span{tag(x)}_stderr_{units}"]
    rows = [tuple([n] + v) for n, v in zip(users, vals)]
    meta = {"span_phi_half_deg": {tag(x): math.degrees(v.phi_half) for x, (_, v) in
                                  zip(spans, setups)},
            "span_cell_radius_m": {tag(x): g.d_c for x, (g, _) in zip(spans, setups)}}
    return SweepResult("fig5-ec-vs-users", cols, rows, meta)


def _curve_fn(fn: Callable[[float], float], thetas: np.ndarray, smooth: bool):
    """Tabulate ``fn`` on the theta grid. With ``smooth`` the refinement step
    uses a monotone interpolant in log theta instead of new evaluations."""
    ecs = np.array([fn(float(t)) for t in thetas])
    if not smooth:
        return fn, ecs
    spline = PchipInterpolator(np.log(thetas), ecs)
    return (lambda t: float(spline(math.log(t)))), ecs


def fig6(s: Scenario, units: str = "bps", workers: int = 1) -> SweepResult:
    sw = s.sweep("delay")
    arrivals = axis(sw["arrival_bpf"])
    eps = float(sw["epsilon"])
    thetas = _delay.theta_grid()
    k = _scale(s, units)
    jobs = [("rf", y) for y in sw["y_r"]] + [("vlc", p) for p in sw["phi_half_deg"]]

    def curve(job):
        kind, v = job
        if kind == "rf":
            fn, ecs = _curve_fn(rf_ec_fn(s, y_r=v), thetas, smooth=True)
        else:
            fn, ecs = _curve_fn(vlc_ec_fn(s, phi_half=math.radians(v)), thetas,
                                smooth=s.method != "closed-form")
        return [_delay.delay_bound(fn, _delay.ArrivalSpec(float(a), eps), thetas, ecs)
                for a in arrivals]

    curves = _pmap(curve, jobs, workers)
    cols = [f"arrival_{units}"]
    for kind, v in jobs:
        name = f"delay_rf_yr{tag(v)}" if kind == "rf" else f"delay_vlc_phi{tag(v)}"
        cols += [f"{name}_frames", f"{name}_s"]
    rows = []
    for i, a in enumerate(arrivals):
        row = [float(a) * k]
        for c in curves:
            row += [c[i].d, c[i].seconds(s.qos.T)]
        rows.append(tuple(row))
    return SweepResult("fig6-delay-vs-arrival", cols, rows, {"epsilon": eps})


QUEUE_FIELDS = ("arrival", "theta_hat", "rel_err", "r2", "busy_fraction",
                "delay_bound_frames", "violation", "violation_ci_high")


def validate_link(s: Scenario, link: str, theta0: float, epsilon: float,
                  backoff: float = 0.0, workers: int = 1) -> dict:
    """Simulate the buffer at a = (1 - backoff) EC(theta0) and compare with theory.

    Returns the arrival (bits/frame), the fitted tail exponent, its relative
    error, the fit R^2, Pr{Q > 0}, the delay bound at ``epsilon`` for that
    arrival, and the empirical violation rate with its upper confidence limit.
    """
    if link == "rf":
        geom = s.rf_geometry()
        fn = rf_ec_fn(s)
        sampler = cap.rf_rate_sampler(geom, s.rf, s.qos.T)
    elif link == "vlc":
        geom, vlc = s.vlc_setup()
        fn = vlc_ec_fn(s)
        sampler = cap.vlc_rate_sampler(geom, vlc, s.qos.T)
    else:
        raise ValueError(f"unknown link {link!r}")
    a = (1.0 - backoff) * fn(theta0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _queue.UnstableQueueWarning)
        trace = _queue.simulate_queue(a, sampler, frames=s.frames, seed=s.seed, workers=workers)
    try:
        fit = _queue.fit_tail_exponent(trace)
        th_hat, r2 = fit.theta_hat, fit.r_squared
    except _queue.InsufficientTailError:
        th_hat, r2 = math.nan, math.nan
    thetas = _delay.theta_grid()
    f, ecs = _curve_fn(fn, thetas, smooth=link == "rf" or s.method != "closed-form")
    bound = _delay.delay_bound(f, _delay.ArrivalSpec(a, epsilon), thetas, ecs)
    viol = _queue.empirical_delay_violation(trace, bound.d)
    return {"arrival": a, "theta_hat": th_hat, "rel_err": th_hat / theta0 - 1.0, "r2": r2,
            "busy_fraction": float(np.mean(trace.queue[1:] > 0)),
            "delay_bound_frames": bound.d, "violation": viol.p,
            "violation_ci_high": viol.ci_high}


def queue_validate(s: Scenario, units: str = "bps", workers: int = 1) -> SweepResult:
    sw = s.sweep("queue")
    k = _scale(s, units)
    cols = ["theta0"]
    for link in ("vlc", "rf"):
        cols += [f"{link}_arrival_{units}"] + [f"{link}_{f}" for f in QUEUE_FIELDS[1:]]
    rows = []
    for th in sw["theta0"]:
        row = [float(th)]
        for link in ("vlc", "rf"):
            r = validate_link(s, link, float(th), float(sw["epsilon"]), float(sw["backoff"]),
                              workers)
            row += [r["arrival"] * k] + [r[f] for f in QUEUE_FIELDS[1:]]
        rows.append(tuple(row))
    return SweepResult("queue-validate", cols, rows,
                       {"epsilon": sw["epsilon"], "frames": s.frames})


PRESETS = {
    "fig3-ec-vs-theta": fig3,
    "fig4-ec-vs-mu": fig4,
    "fig5-ec-vs-users": fig5,
    "fig6-delay-vs-arrival": fig6,
    "queue-validate": queue_validate,
}


def run_sweep(scenario: Scenario, figure: str, workers: int | None = None,
              units: str = "bps") -> SweepResult:
    """Evaluate one figure preset. Curves run in parallel on ``workers`` threads;
    the output does not depend on the worker count."""
    if figure not in PRESETS:
        raise ValueError(f"unknown figure {figure!r} (choose from {', '.join(FIGURES)})")
    workers = scenario.workers if workers is None else int(workers)
    try:
        with np.errstate(over="ignore", under="ignore"):
            res = PRESETS[figure](scenario, units=units, workers=workers)
    except (ArithmeticError, FloatingPointError, cap.QuadratureError) as exc:
        raise NumericalFailure(f"{figure}: {exc}") from exc
    res.metadata = {
        "figure": figure,
        "seed": scenario.seed,
        "config_hash": scenario.config_hash(),
        "method": scenario.method,
        "samples": scenario.samples,
        "units": units,
        "kernel_backend": kernels.BACKEND,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        **res.metadata,
    }
    return res
