"""Scenario configuration: JSON schema, defaults, resolution.

Config files are JSON.  Frequencies are ordinary Hz (multiplied by 2*pi
on load), powers in W, lengths in m, gradients in G/cm.  Every key is
validated against the schema below; unknown keys are rejected with
their full path rather than silently ignored.

Defaults reproduce the reference operating point of the balance
measurements: s12 = 1.3, s34 = 2.1, s56 = 25, Delta12 = -Gamma12/2,
Delta34 = Delta56 = 0, R_load = 1e8/s, Gamma_blue = 190/s,
Gamma_gr:rd = 2500/s.  Drives may be given either as a saturation
parameter or as power/waist, converted through the saturation-intensity
chain.

The ``external`` block drives the trap-dynamics scenarios (fluorescence
maps, potential reports).  Its separate ``gamma_blue_per_s`` is the
loss floor of the always-on blue MOT in those scenarios (default 25/s,
which reproduces the observed factor ~10 atom-number gain between the
green-beam configurations); the ``rates`` block's 190/s applies to the
internal-state scenarios it was fitted on.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .atomic import (SrConstants, load_constants, rabi_from_saturation,
                     saturation_parameter)
from .bloch import DriveParams, SystemParams
from .external import ExternalRates, MotBeam

TWO_PI = 2.0 * math.pi


class ConfigError(ValueError):
    """Raised with the offending key path for any schema violation."""


DEFAULTS: dict = {
    "constants_file": None,
    "constants_overrides": {},
    "drives": {
        "blue": {"saturation": 1.3, "detuning_hz": -15.0e6},
        "green": {"saturation": 2.1, "detuning_hz": 0.0},
        "red": {"saturation": 25.0, "detuning_hz": 0.0},
    },
    "rates": {
        "gamma_blue_per_s": 190.0,
        "gamma_grrd_per_s": 2500.0,
        "r_load_per_s": 1.0e8,
    },
    "initial": {"n11_atoms": 1.0e6},
    "times": {"start_s": 1.0e-9, "stop_s": 10.0, "count": 201, "scale": "log"},
    "beams": {
        "blue": {"waist_m": 2.9e-3},
        "green": {"waist_m": 2.2e-3},
    },
    "external": {
        "green_config": "gmot",
        "gamma_blue_per_s": 25.0,
        "r_load0_per_s": 1.0e8,
        "db_blue_g_per_cm": 100.0,
        "db_grrd_g_per_cm": 100.0,
        "gamma_free_per_s": None,
        "gamma_trap_per_s": None,
        "b_grad_g_per_cm": 64.0,
    },
    "sweep": {"variable": "s56", "start": 0.25, "stop": 31.0, "count": 101,
              "scale": "log"},
    "map": {
        "delta34": {"start_hz": -30.0e6, "stop_hz": 30.0e6, "count": 51,
                    "scale": "linear"},
        "b_grad": {"start_g_per_cm": 10.0, "stop_g_per_cm": 300.0, "count": 51,
                   "scale": "linear"},
        "emit_fractions": False,
    },
    "potential": {
        "z_count": 201,
        "depth_b_grad": {"start_g_per_cm": 5.0, "stop_g_per_cm": 300.0,
                         "count": 101, "scale": "linear"},
    },
    "output": {"format": "csv"},
}

#: Expected leaf types; None in DEFAULTS means optional float.
_SCHEMA_TYPES: dict = {
    "constants_file": (str, type(None)),
    "constants_overrides": dict,
    "drives.blue.saturation": (int, float, type(None)),
    "drives.blue.power_w": (int, float, type(None)),
    "drives.blue.waist_m": (int, float, type(None)),
    "drives.blue.detuning_hz": (int, float),
    "rates.gamma_blue_per_s": (int, float),
    "rates.gamma_grrd_per_s": (int, float),
    "rates.r_load_per_s": (int, float),
    "initial.n11_atoms": (int, float),
    "times.start_s": (int, float),
    "times.stop_s": (int, float),
    "times.count": int,
    "times.scale": str,
    "beams.blue.waist_m": (int, float),
    "external.green_config": str,
    "external.gamma_blue_per_s": (int, float),
    "external.r_load0_per_s": (int, float),
    "external.db_blue_g_per_cm": (int, float),
    "external.db_grrd_g_per_cm": (int, float),
    "external.gamma_free_per_s": (int, float, type(None)),
    "external.gamma_trap_per_s": (int, float, type(None)),
    "external.b_grad_g_per_cm": (int, float),
    "sweep.variable": str,
    "sweep.start": (int, float),
    "sweep.stop": (int, float),
    "sweep.count": int,
    "sweep.scale": str,
    "map.delta34.start_hz": (int, float),
    "map.delta34.stop_hz": (int, float),
    "map.delta34.count": int,
    "map.delta34.scale": str,
    "map.b_grad.start_g_per_cm": (int, float),
    "map.b_grad.stop_g_per_cm": (int, float),
    "map.b_grad.count": int,
    "map.b_grad.scale": str,
    "map.emit_fractions": bool,
    "potential.z_count": int,
    "potential.depth_b_grad.start_g_per_cm": (int, float),
    "potential.depth_b_grad.stop_g_per_cm": (int, float),
    "potential.depth_b_grad.count": int,
    "potential.depth_b_grad.scale": str,
    "output.format": str,
}
for _color in ("green", "red"):
    for _leaf in ("saturation", "power_w", "waist_m", "detuning_hz"):
        _SCHEMA_TYPES[f"drives.{_color}.{_leaf}"] = _SCHEMA_TYPES[f"drives.blue.{_leaf}"]
_SCHEMA_TYPES["beams.green.waist_m"] = _SCHEMA_TYPES["beams.blue.waist_m"]

SWEEP_VARIABLES = ("s56", "delta56")
_TRANSITION = {"blue": ("gamma_12", "lambda_12"),
               "green": ("gamma_34", "lambda_34"),
               "red": ("gamma_56", "lambda_56")}


def _walk_unknown(user: dict, defaults: dict, path: str = "") -> None:
    for key, value in user.items():
        here = f"{path}.{key}" if path else key
        if key not in defaults:
            # drive blocks additionally accept power/waist leaves
            if here in _SCHEMA_TYPES:
                continue
            raise ConfigError(f"unknown key {here!r}")
        if isinstance(defaults[key], dict) and not here.endswith("constants_overrides"):
            if not isinstance(value, dict):
                raise ConfigError(f"{here!r} must be an object")
            _walk_unknown(value, defaults[key], here)


def _check_types(merged: dict) -> None:
    def visit(node, path):
        if isinstance(node, dict):
            for key, value in node.items():
                visit(value, f"{path}.{key}" if path else key)
            return
        if path.startswith("constants_overrides"):
            return
        expected = _SCHEMA_TYPES.get(path)
        if expected is None:
            return
        if isinstance(node, bool) and expected is not bool:
            raise ConfigError(f"{path!r} must not be a boolean")
        if not isinstance(node, expected):
            want = getattr(expected, "__name__", str(expected))
            raise ConfigError(f"{path!r} has wrong type {type(node).__name__}, expected {want}")

    visit(merged, "")


def _merge(defaults: dict, user: dict) -> dict:
    out = copy.deepcopy(defaults)
    for key, value in user.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved scenario: typed objects plus the raw resolved dict.

    ``resolved`` is JSON-serializable and round-trips: feeding it back
    to :func:`load_config` reproduces the identical scenario (the
    replayability contract of the metadata block).
    """

    constants: SrConstants
    params: SystemParams
    beam_blue: MotBeam
    beam_green: MotBeam
    external: ExternalRates
    external_gamma_blue: float
    b_grad: float
    resolved: dict = field(repr=False)

    @property
    def map_params(self) -> SystemParams:
        """Internal-state parameters for trap-dynamics scenarios."""
        return self.params.with_(gamma_blue=self.external_gamma_blue)


def _resolve_drive(color: str, block: dict, constants: SrConstants) -> tuple[DriveParams, dict]:
    gamma = getattr(constants, _TRANSITION[color][0])
    wavelength = getattr(constants, _TRANSITION[color][1])
    s = block.get("saturation")
    power = block.get("power_w")
    waist = block.get("waist_m")
    if power is not None or waist is not None:
        if power is None or waist is None:
            raise ConfigError(f"drives.{color}: power_w and waist_m must be given together")
        if block.get("saturation") is not None:
            raise ConfigError(f"drives.{color}: give either saturation or power_w/waist_m, not both")
        s = saturation_parameter(float(power), float(waist), gamma, wavelength)
    if s is None:
        raise ConfigError(f"drives.{color}: needs saturation or power_w/waist_m")
    s = float(s)
    if s < 0.0:
        raise ConfigError(f"drives.{color}.saturation must be >= 0")
    detuning = TWO_PI * float(block["detuning_hz"])
    resolved = {"saturation": s, "detuning_hz": float(block["detuning_hz"])}
    return DriveParams(omega=rabi_from_saturation(s, gamma), delta=detuning), resolved


def load_config(source=None) -> ScenarioConfig:
    """Load and resolve a scenario configuration.

    Parameters
    ----------
    source : None, str, Path, or dict
        ``None`` gives pure defaults; a path loads a JSON file; a dict
        (e.g. the metadata block of a result table) is used directly.
    """
    if source is None:
        user: dict = {}
    elif isinstance(source, dict):
        user = source
    else:
        try:
            with open(source, "r", encoding="utf-8") as fh:
                user = json.load(fh)
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {source}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(user, dict):
        raise ConfigError("config root must be a JSON object")

    _walk_unknown(user, DEFAULTS)
    merged = _merge(DEFAULTS, user)
    _check_types(merged)

    constants = load_constants(merged["constants_file"])
    overrides = merged["constants_overrides"]
    if overrides:
        hz_fields = {f"{name}_hz": name for name in
                     ("gamma_12", "gamma_34", "gamma_56", "gamma_36",
                      "gamma_15", "gamma_23", "gamma_25", "gamma_45")}
        m_fields = {f"{name}_m": name for name in
                    ("lambda_12", "lambda_34", "lambda_56", "lambda_15")}
        from dataclasses import replace
        kwargs = {}
        for key, value in overrides.items():
            if key in hz_fields:
                kwargs[hz_fields[key]] = TWO_PI * float(value)
            elif key in m_fields:
                kwargs[m_fields[key]] = float(value)
            else:
                raise ConfigError(f"constants_overrides: unknown key {key!r}")
        constants = replace(constants, **kwargs).validate()

    drives = {}
    for color in ("blue", "green", "red"):
        drives[color], merged["drives"][color] = _resolve_drive(
            color, merged["drives"][color], constants)

    rates = merged["rates"]
    for name in ("gamma_blue_per_s", "gamma_grrd_per_s", "r_load_per_s"):
        if rates[name] < 0.0:
            raise ConfigError(f"rates.{name} must be >= 0")
    params = SystemParams(constants=constants, blue=drives["blue"],
                          green=drives["green"], red=drives["red"],
                          gamma_blue=float(rates["gamma_blue_per_s"]),
                          gamma_grrd=float(rates["gamma_grrd_per_s"]),
                          r_load=float(rates["r_load_per_s"]))

    beams = merged["beams"]
    beam_blue = MotBeam(gamma=constants.gamma_12, wavelength=constants.lambda_12,
                        s=merged["drives"]["blue"]["saturation"],
                        delta=drives["blue"].delta, w=float(beams["blue"]["waist_m"]))
    beam_green = MotBeam(gamma=constants.gamma_34, wavelength=constants.lambda_34,
                         s=merged["drives"]["green"]["saturation"],
                         delta=drives["green"].delta, w=float(beams["green"]["waist_m"]))

    ext = merged["external"]
    ext_kwargs = {}
    if ext["gamma_free_per_s"] is not None:
        ext_kwargs["gamma_free"] = float(ext["gamma_free_per_s"])
    if ext["gamma_trap_per_s"] is not None:
        ext_kwargs["gamma_trap"] = float(ext["gamma_trap_per_s"])
    external = ExternalRates.defaults(
        ext["green_config"], r_load0=float(ext["r_load0_per_s"]),
        db_blue=float(ext["db_blue_g_per_cm"]), db_grrd=float(ext["db_grrd_g_per_cm"]),
        **ext_kwargs)

    _validate_axes(merged)
    return ScenarioConfig(constants=constants, params=params, beam_blue=beam_blue,
                          beam_green=beam_green, external=external,
                          external_gamma_blue=float(ext["gamma_blue_per_s"]),
                          b_grad=float(ext["b_grad_g_per_cm"]), resolved=merged)


def _validate_axes(merged: dict) -> None:
    sweep = merged["sweep"]
    if sweep["variable"] not in SWEEP_VARIABLES:
        raise ConfigError(f"sweep.variable must be one of {SWEEP_VARIABLES}, "
                          f"got {sweep['variable']!r}")
    for path, block in (("sweep", sweep),
                        ("map.delta34", merged["map"]["delta34"]),
                        ("map.b_grad", merged["map"]["b_grad"]),
                        ("times", merged["times"]),
                        ("potential.depth_b_grad", merged["potential"]["depth_b_grad"])):
        keys = list(block)
        start_key = next(k for k in keys if k.startswith("start"))
        stop_key = next(k for k in keys if k.startswith("stop"))
        if block["count"] < 2:
            raise ConfigError(f"{path}.count must be >= 2")
        if block[start_key] == block[stop_key]:
            raise ConfigError(f"{path}: start must differ from stop")
        scale = block.get("scale", "linear")
        if scale not in ("linear", "log"):
            raise ConfigError(f"{path}.scale must be 'linear' or 'log'")
        if scale == "log" and (block[start_key] <= 0.0 or block[stop_key] <= 0.0):
            raise ConfigError(f"{path}: log scale needs positive endpoints")
    if merged["output"]["format"] not in ("csv", "json"):
        raise ConfigError("output.format must be 'csv' or 'json'")
    if merged["potential"]["z_count"] < 2:
        raise ConfigError("potential.z_count must be >= 2")


def axis_values(block: dict) -> np.ndarray:
    """Materialize a sweep-axis block into its grid values."""
    keys = list(block)
    start = float(block[next(k for k in keys if k.startswith("start"))])
    stop = float(block[next(k for k in keys if k.startswith("stop"))])
    count = int(block["count"])
    if block.get("scale", "linear") == "log":
        return np.geomspace(start, stop, count)
    return np.linspace(start, stop, count)
