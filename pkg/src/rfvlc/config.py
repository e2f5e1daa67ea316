"""Scenario files.

A scenario is a YAML mapping of sections. Omitted sections take the default
indoor parameters wholesale; a physics section (``geometry``, ``rf``,
``vlc``, ``qos``) that is present must be complete, so a half-edited section
never silently mixes with defaults. Units follow the keys: angles in
degrees, theta in dB, powers in W, bandwidths in Hz, distances in m.
"""
from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field
from typing import Any, Callable

import yaml

from .access import AccessConfig
from .capacity import (METHODS, BlockageModel, IlluminationSpec, illumination_limited_radius,
                       max_cell_radius, viewing_angle_for_span)
from .params import Geometry, QosSpec, RfParams, VlcParams, db_to_linear, theta_from_db


@dataclass(frozen=True)
class Diagnostic:
    path: str
    message: str

    def __str__(self):
        return f"{self.path}: {self.message}" if self.path else self.message


class ConfigError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


@dataclass(frozen=True)
class Key:
    default: Any
    check: Callable[[Any], str | None] | None = None
    kind: type | tuple = (int, float)


def _range(lo=None, hi=None, lo_open=False, hi_open=False):
    def check(v):
        if lo is not None and (v < lo or (lo_open and v == lo)):
            return f"must be {'>' if lo_open else '>='} {lo}"
        if hi is not None and (v > hi or (hi_open and v == hi)):
            return f"must be {'<' if hi_open else '<='} {hi}"
        return None
    return check


def _one_of(*choices):
    return lambda v: None if v in choices else f"must be one of {', '.join(map(str, choices))}"


def _positive_list(v):
    if not isinstance(v, list) or not v:
        return "must be a non-empty list"
    if any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in v):
        return "entries must be numbers"
    return None


def _axis(v):
    if not isinstance(v, dict) or set(v) != {"start", "stop", "num"}:
        return "must be a mapping with exactly start, stop, num"
    if not isinstance(v["num"], int) or v["num"] < 1:
        return "num must be a positive integer"
    return None


POS = _range(0, lo_open=True)
NONNEG = _range(0)

# section -> key -> spec; the order here is the order of ``show-defaults``
SCHEMA: dict[str, dict[str, Key]] = {
    "geometry": {
        "d_v": Key(2.5, POS),
        "y_r": Key(20.0),
        "cell_radius": Key(None, NONNEG, (int, float, type(None))),
    },
    "rf": {
        "bandwidth_hz": Key(20e6, POS),
        "power_w": Key(10e-3, POS),
        "rician_k_db": Key(5.0),
        "path_loss_exp": Key(1.6, POS),
        "shadowing_std_db": Key(1.8, NONNEG),
        "noise_psd_dbm_per_mhz": Key(-114.0),
        "ref_loss_db": Key(40.0),
        "ref_distance_m": Key(1.0, POS),
    },
    "vlc": {
        "phi_half_deg": Key(45.0, _range(0, 90, lo_open=True, hi_open=True)),
        "fov_deg": Key(90.0, _range(0, 90, lo_open=True)),
        "power_w": Key(9.0, POS),
        "area_m2": Key(1e-4, POS),
        "bandwidth_hz": Key(40e6, POS),
        "responsivity_a_per_w": Key(0.53, POS),
        "refractive_index": Key(1.5, POS),
        "filter_gain": Key(1.0, POS),
        "noise_psd_a2_per_hz": Key(1e-21, POS),
        "varsigma": Key(3.0, POS),
        "c_rate": Key(math.sqrt(math.e / (2 * math.pi)), POS),
    },
    "qos": {
        "theta_db": Key(-30.0),
        "frame_s": Key(1e-4, POS),
    },
    "blockage": {
        "mu": Key(1.0, _range(0, 1)),
        "omega": Key(0.0, _range(0, 1, hi_open=True)),
    },
    "illumination": {
        "e_min": Key(None, POS),
        "e_max": Key(None, POS),
        "mode": Key("zoom", _one_of("zoom", "confine"), str),
    },
    "access": {
        "scheme": Key("tdma", _one_of("tdma", "fdma"), str),
        "num_users": Key(1, _range(1), int),
    },
    "run": {
        "seed": Key(1, _range(0, 2**64 - 1), int),
        "samples": Key(10**6, _range(10**4), int),
        "method": Key("closed-form", _one_of(*METHODS), str),
        "workers": Key(1, _range(1), int),
        "frames": Key(10**6, _range(1), int),
    },
}

SWEEPS: dict[str, dict[str, Key]] = {
    "ec": {
        "theta_db": Key({"start": -60.0, "stop": -10.0, "num": 51}, _axis, dict),
        "y_r": Key([5.0, 10.0, 20.0, 30.0], _positive_list, list),
        "rf_phi_half_deg": Key(45.0, _range(0, 90, lo_open=True, hi_open=True)),
        "phi_half_deg": Key([30.0, 45.0, 60.0], _positive_list, list),
    },
    "blockage": {
        "mu": Key({"start": 0.0, "stop": 1.0, "num": 21}, _axis, dict),
        "omega": Key([0.0, 0.5], _positive_list, list),
        "phi_half_deg": Key([30.0, 45.0, 60.0], _positive_list, list),
    },
    "users": {
        "num_users": Key([1, 2, 3, 4, 6, 8, 12, 16], _positive_list, list),
        "spans": Key([3.0, 5.66, 16.0], _positive_list, list),
    },
    "delay": {
        "arrival_bpf": Key({"start": 1000.0, "stop": 60000.0, "num": 60}, _axis, dict),
        "epsilon": Key(1e-6, _range(0, 1, lo_open=True, hi_open=True)),
        "y_r": Key([5.0, 10.0, 20.0, 30.0], _positive_list, list),
        "phi_half_deg": Key([30.0, 45.0, 60.0], _positive_list, list),
    },
    "queue": {
        "theta0": Key([1e-4, 3e-4, 1e-3], _positive_list, list),
        "backoff": Key(0.0, _range(0, 1, hi_open=True)),
        "epsilon": Key(1e-4, _range(0, 1, lo_open=True, hi_open=True)),
    },
}

REQUIRED_WHEN_PRESENT = ("geometry", "rf", "vlc", "qos")


@dataclass(frozen=True)
class Scenario:
    geometry: Geometry
    rf: RfParams
    vlc: VlcParams
    qos: QosSpec
    blockage: BlockageModel = BlockageModel()
    illumination: IlluminationSpec | None = None
    illumination_mode: str = "zoom"
    access: AccessConfig = AccessConfig()
    seed: int = 1
    samples: int = 10**6
    method: str = "closed-form"
    workers: int = 1
    frames: int = 10**6
    cell_radius: float | None = None
    sweeps: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def vlc_setup(self, phi_half: float | None = None, span: float | None = None,
                  ) -> tuple[Geometry, VlcParams]:
        """Geometry and LED for one VLC curve.

        With a span E_max/E_min (given here, or from the scenario when no
        angle is passed) the ``zoom`` mode picks the LED angle whose cell
        d_v tan(phi) just meets the span, and ``confine`` keeps the angle and
        shrinks the cell to the admissible radius. An explicit angle without
        a span uses the cell d_v tan(phi).
        """
        vlc = self.vlc if phi_half is None else self.vlc.replace(phi_half=phi_half)
        d_v = self.geometry.d_v
        if span is None and phi_half is None and self.illumination is not None:
            span = self.illumination.ratio
        if span is not None:
            if self.illumination_mode == "zoom":
                vlc = vlc.replace(phi_half=viewing_angle_for_span(span))
                d_c = illumination_limited_radius(d_v, vlc)
            else:
                d_c = max_cell_radius(IlluminationSpec(1.0, span), d_v, vlc)
        elif phi_half is None and self.cell_radius is not None:
            d_c = self.cell_radius
        else:
            d_c = illumination_limited_radius(d_v, vlc)
        return self.geometry.replace(d_c=d_c), vlc

    def rf_geometry(self, y_r: float | None = None, phi_half: float | None = None) -> Geometry:
        geom, _ = self.vlc_setup(phi_half=phi_half)
        return geom if y_r is None else geom.replace(y_r=y_r)

    def sweep(self, name: str) -> dict:
        return self.sweeps[name]

    def config_hash(self) -> str:
        blob = json.dumps(self.raw, sort_keys=True, default=str).encode()
        return hashlib.sha1(blob).hexdigest()[:12]


def defaults() -> dict:
    out = {sec: {k: spec.default for k, spec in keys.items()} for sec, keys in SCHEMA.items()}
    out["illumination"] = {"mode": "zoom"}
    out["sweeps"] = {sec: {k: spec.default for k, spec in keys.items()}
                     for sec, keys in SWEEPS.items()}
    return out


def defaults_yaml() -> str:
    text = yaml.safe_dump(defaults(), sort_keys=False, default_flow_style=None)
    note = ("# Default scenario. Omit a section to use these values; a geometry, rf,\n"
            "# vlc or qos section that is present must list every key. Add e_min and\n"
            "# e_max under illumination to constrain the VLC cell.\n")
    return note + text


def _check_section(path: str, raw: Any, keys: dict[str, Key], complete: bool,
                   diags: list[Diagnostic]) -> dict:
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        diags.append(Diagnostic(path, "must be a mapping"))
        return {}
    out = {}
    for k in raw:
        if k not in keys:
            diags.append(Diagnostic(f"{path}.{k}", f"unknown key (allowed: {', '.join(keys)})"))
    for k, spec in keys.items():
        p = f"{path}.{k}"
        if k not in raw:
            if complete:
                diags.append(Diagnostic(p, f"missing; default is {spec.default!r}"))
            out[k] = spec.default
            continue
        v = raw[k]
        if isinstance(v, bool) or not isinstance(v, spec.kind):
            diags.append(Diagnostic(p, f"wrong type {type(v).__name__}"))
            continue
        if spec.check is not None and v is not None:
            msg = spec.check(v)
            if msg:
                diags.append(Diagnostic(p, f"{msg} (got {v!r})"))
                continue
        out[k] = v
    return out


class _Loader(yaml.SafeLoader):
    pass


# YAML 1.1 reads "1e-6" as a string; accept plain exponent floats too
_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"""^[-+]?(?:[0-9][0-9_]*)(?:\.[0-9_]*)?[eE][-+]?[0-9]+$"""),
    list("-+0123456789"))


def parse_yaml(text: str) -> dict:
    try:
        data = yaml.load(text, Loader=_Loader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ConfigError([Diagnostic("", f"parse error at {where}: {exc.problem}")]) from exc
    except yaml.YAMLError as exc:
        raise ConfigError([Diagnostic("", f"parse error: {exc}")]) from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError([Diagnostic("", "top level must be a mapping of sections")])
    return data


def validate_config(text: str | dict) -> Scenario:
    """Parse and check a scenario; raises ConfigError listing every problem."""
    data = parse_yaml(text) if isinstance(text, str) else dict(text)
    diags: list[Diagnostic] = []
    allowed = set(SCHEMA) | {"sweeps"}
    for sec in data:
        if sec not in allowed:
            diags.append(Diagnostic(str(sec), f"unknown section (allowed: {', '.join(sorted(allowed))})"))

    sec = {name: _check_section(name, data.get(name), keys,
                                name in REQUIRED_WHEN_PRESENT and name in data, diags)
           for name, keys in SCHEMA.items()}
    raw_sweeps = data.get("sweeps") or {}
    sweeps = {}
    if not isinstance(raw_sweeps, dict):
        diags.append(Diagnostic("sweeps", "must be a mapping"))
        raw_sweeps = {}
    for name in raw_sweeps:
        if name not in SWEEPS:
            diags.append(Diagnostic(f"sweeps.{name}", f"unknown sweep (allowed: {', '.join(SWEEPS)})"))
    for name, keys in SWEEPS.items():
        sweeps[name] = _check_section(f"sweeps.{name}", raw_sweeps.get(name), keys, False, diags)

    ill = sec["illumination"]
    illum = None
    if "illumination" in data and (ill.get("e_min") is not None or ill.get("e_max") is not None):
        if ill.get("e_min") is None or ill.get("e_max") is None:
            diags.append(Diagnostic("illumination", "e_min and e_max must be given together"))
        elif ill["e_max"] < ill["e_min"]:
            diags.append(Diagnostic("illumination.e_max",
                                    f"must be >= e_min ({ill['e_min']}), got {ill['e_max']}"))
        else:
            illum = IlluminationSpec(float(ill["e_min"]), float(ill["e_max"]))
            if ill.get("mode", "zoom") == "zoom" and illum.ratio <= 2.0:
                diags.append(Diagnostic("illumination.e_max",
                                        "zoom mode needs E_max/E_min > 2 (no LED angle reaches a "
                                        "smaller span); use mode: confine"))
    if diags:
        raise ConfigError(diags)

    g, r, v, q = sec["geometry"], sec["rf"], sec["vlc"], sec["qos"]
    try:
        scenario = Scenario(
            geometry=Geometry(d_v=float(g["d_v"]), d_c=0.0, y_r=float(g["y_r"])),
            rf=RfParams(bandwidth=float(r["bandwidth_hz"]), power=float(r["power_w"]),
                        rician_k=float(db_to_linear(r["rician_k_db"])),
                        path_loss_exp=float(r["path_loss_exp"]),
                        shadowing_std=float(r["shadowing_std_db"]),
                        noise_psd=10.0 ** (r["noise_psd_dbm_per_mhz"] / 10.0) * 1e-9,
                        ref_loss_db=float(r["ref_loss_db"]),
                        ref_distance=float(r["ref_distance_m"])),
            vlc=VlcParams(area=float(v["area_m2"]), fov=math.radians(v["fov_deg"]),
                          phi_half=math.radians(v["phi_half_deg"]),
                          refractive_index=float(v["refractive_index"]),
                          filter_gain=float(v["filter_gain"]),
                          responsivity=float(v["responsivity_a_per_w"]),
                          varsigma=float(v["varsigma"]), power=float(v["power_w"]),
                          bandwidth=float(v["bandwidth_hz"]),
                          noise_psd=float(v["noise_psd_a2_per_hz"]), c_rate=float(v["c_rate"])),
            qos=QosSpec(theta=theta_from_db(q["theta_db"]), T=float(q["frame_s"])),
            blockage=BlockageModel(mu=float(sec["blockage"]["mu"]),
                                   omega=float(sec["blockage"]["omega"])),
            illumination=illum,
            illumination_mode=ill.get("mode", "zoom"),
            access=AccessConfig(scheme=sec["access"]["scheme"],
                                num_users=sec["access"]["num_users"]),
            seed=sec["run"]["seed"], samples=sec["run"]["samples"],
            method=sec["run"]["method"], workers=sec["run"]["workers"],
            frames=sec["run"]["frames"],
            cell_radius=None if g["cell_radius"] is None else float(g["cell_radius"]),
            sweeps=sweeps,
            raw={**sec, "sweeps": sweeps},
        )
    except ValueError as exc:  # cross-field invariants of the domain types
        raise ConfigError([Diagnostic("", str(exc))]) from exc
    geom, _ = scenario.vlc_setup()
    return _with_geometry(scenario, geom)


def _with_geometry(s: Scenario, geom: Geometry) -> Scenario:
    from dataclasses import replace
    return replace(s, geometry=geom)


def default_scenario() -> Scenario:
    return validate_config({})


def load(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return validate_config(fh.read())


def with_run_overrides(s: Scenario, **overrides) -> Scenario:
    """Apply CLI overrides (seed, samples, method, workers, frames) that are not None."""
    from dataclasses import replace
    changes = {k: v for k, v in overrides.items() if v is not None}
    if "samples" in changes and changes["samples"] < 10**4:
        raise ConfigError([Diagnostic("run.samples", f"must be >= 10000 (got {changes['samples']})")])
    if "method" in changes and changes["method"] not in METHODS:
        raise ConfigError([Diagnostic("run.method", f"must be one of {', '.join(METHODS)}")])
    raw = {**s.raw, "run": {**s.raw.get("run", {}), **changes}}
    return replace(s, raw=raw, **changes)
