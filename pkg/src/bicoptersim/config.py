"""Versioned JSON scenario files.

Schema version 1. Unknown fields are rejected at every level so a config
either replays deterministically or fails loudly. All angles are degrees
and rates deg/s in the file; they are converted to radians on load.
"""
from __future__ import annotations

import json
import math
from typing import Any

from . import control as ctl
from . import dynamics as dyn
from .scenario import Scenario, ScenarioError, ScheduleEntry
from .sensing import NoiseModel
from .wind import WindSpec

SCHEMA_VERSION = 1


def load_scenario(path: str) -> Scenario:
    """Read and validate a scenario JSON file."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON in {path}: {exc}") from exc
    return scenario_from_dict(raw)


def dump_scenario(s: Scenario) -> dict:
    """Dict form of a scenario, inverse of scenario_from_dict."""
    deg = math.degrees
    return {
        "version": SCHEMA_VERSION,
        "name": s.name,
        "mode": s.mode,
        "duration_s": s.duration,
        "dt_s": s.dt,
        "gains": s.gains
        if isinstance(s.gains, str)
        else {a: [g.kp, g.ki, g.kd] for a, g in s.gains.items()},
        "estimator": s.estimator,
        "seed": s.seed,
        "wind": {
            "speed_knots": s.wind.speed_knots,
            "direction": list(s.wind.direction),
            "gust_std_mps": s.wind.gust_std,
            "gust_correlation_s": s.wind.gust_correlation_time,
            "drag_area_m2": s.wind.drag_area,
        },
        "noise": {
            "accel_std_g": s.noise.accel_std,
            "gyro_std_dps": s.noise.gyro_std,
            "accel_bias_g": list(s.noise.accel_bias),
            "gyro_bias_dps": list(s.noise.gyro_bias),
            "seed": s.noise.seed,
        },
        "initial": {
            "roll_deg": deg(s.initial.roll),
            "pitch_deg": deg(s.initial.pitch),
            "yaw_deg": deg(s.initial.yaw),
            "z_m": s.initial.z,
        },
        "schedule": [
            [e.t, deg(e.roll), deg(e.pitch), deg(e.yaw), e.altitude]
            for e in s.schedule
        ],
    }


def save_scenario(s: Scenario, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(dump_scenario(s), fh, indent=2)
        fh.write("\n")


def scenario_from_dict(raw: Any) -> Scenario:
    """Build a Scenario from parsed JSON, rejecting unknown fields."""
    if not isinstance(raw, dict):
        raise ScenarioError("scenario must be a JSON object")
    d = dict(raw)
    version = _take(d, "version", int, required=True)
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"unsupported scenario version {version}")

    kwargs: dict[str, Any] = {}
    kwargs["name"] = _take(d, "name", str, "custom")
    kwargs["mode"] = _take(d, "mode", str, dyn.MODE_TESTBED)
    kwargs["duration"] = _take(d, "duration_s", (int, float), 28.0)
    kwargs["dt"] = _take(d, "dt_s", (int, float), dyn.DEFAULT_DT)
    kwargs["estimator"] = _take(d, "estimator", str, "cf")
    kwargs["seed"] = _take(d, "seed", int, 42)
    kwargs["throttle_base"] = _take(d, "throttle_base", (int, float), None)
    kwargs["center_servo"] = math.radians(_take(d, "center_servo_deg", (int, float), 0.0))

    gains = _take(d, "gains", (str, dict), "testbed")
    if isinstance(gains, dict):
        kwargs["gains"] = _parse_gains(gains)
    else:
        kwargs["gains"] = gains

    wind = _take(d, "wind", dict, None)
    if wind is not None:
        kwargs["wind"] = _parse_wind(wind)
    noise = _take(d, "noise", dict, None)
    if noise is not None:
        kwargs["noise"] = _parse_noise(noise)
    initial = _take(d, "initial", dict, None)
    if initial is not None:
        kwargs["initial"] = _parse_initial(initial)
    schedule = _take(d, "schedule", list, None)
    if schedule is not None:
        kwargs["schedule"] = _parse_schedule(schedule)
    params = _take(d, "params", dict, None)
    if params is not None:
        kwargs["params"] = _parse_params(params)
    actuators = _take(d, "actuators", dict, None)
    filt = _take(d, "filter", dict, None)
    control = _take(d, "control", dict, None)

    _reject_unknown(d, "scenario")
    try:
        scenario = Scenario(**kwargs)
        if actuators is not None:
            scenario = _apply_actuators(scenario, actuators)
        if filt is not None:
            scenario = _apply_filter(scenario, filt)
        if control is not None:
            scenario = _apply_control(scenario, control)
    except (ValueError, TypeError) as exc:
        raise ScenarioError(str(exc)) from exc
    return scenario


def _parse_gains(raw: dict) -> dict[str, ctl.PidGains]:
    d = dict(raw)
    table: dict[str, ctl.PidGains] = {}
    for axis in ("roll", "pitch", "yaw", "altitude"):
        triple = _take(d, axis, list, None)
        if triple is None:
            continue
        if len(triple) != 3 or not all(isinstance(v, (int, float)) for v in triple):
            raise ScenarioError(f"gains.{axis} must be [kp, ki, kd]")
        table[axis] = ctl.PidGains(*map(float, triple))
    _reject_unknown(d, "gains")
    if not {"roll", "pitch", "yaw"} <= table.keys():
        raise ScenarioError("explicit gains must cover roll, pitch and yaw")
    return table


def _parse_wind(raw: dict) -> WindSpec:
    d = dict(raw)
    direction = _take(d, "direction", list, [1.0, 0.0, 0.0])
    if len(direction) != 3:
        raise ScenarioError("wind.direction must have 3 components")
    spec = dict(
        speed_knots=_take(d, "speed_knots", (int, float), 0.0),
        direction=tuple(map(float, direction)),
        gust_std=_take(d, "gust_std_mps", (int, float), 0.0),
        gust_correlation_time=_take(d, "gust_correlation_s", (int, float), 1.0),
        drag_area=_take(d, "drag_area_m2", (int, float), 0.02),
    )
    _reject_unknown(d, "wind")
    try:
        return WindSpec(**spec)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc


def _parse_noise(raw: dict) -> NoiseModel:
    d = dict(raw)
    accel_bias = _take(d, "accel_bias_g", list, [0.0, 0.0, 0.0])
    gyro_bias = _take(d, "gyro_bias_dps", list, [0.0, 0.0, 0.0])
    if len(accel_bias) != 3 or len(gyro_bias) != 3:
        raise ScenarioError("noise biases must have 3 components")
    model = dict(
        accel_std=_take(d, "accel_std_g", (int, float), 0.02),
        gyro_std=_take(d, "gyro_std_dps", (int, float), 0.3),
        accel_bias=tuple(map(float, accel_bias)),
        gyro_bias=tuple(map(float, gyro_bias)),
        seed=_take(d, "seed", int, 0),
    )
    _reject_unknown(d, "noise")
    try:
        return NoiseModel(**model)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc


def _parse_initial(raw: dict) -> dyn.RigidBodyState:
    d = dict(raw)
    rad = math.radians
    state = dyn.RigidBodyState(
        x=_take(d, "x_m", (int, float), 0.0),
        y=_take(d, "y_m", (int, float), 0.0),
        z=_take(d, "z_m", (int, float), 0.0),
        vx=_take(d, "vx_mps", (int, float), 0.0),
        vy=_take(d, "vy_mps", (int, float), 0.0),
        vz=_take(d, "vz_mps", (int, float), 0.0),
        roll=rad(_take(d, "roll_deg", (int, float), 0.0)),
        pitch=rad(_take(d, "pitch_deg", (int, float), 0.0)),
        yaw=rad(_take(d, "yaw_deg", (int, float), 0.0)),
        roll_rate=rad(_take(d, "roll_rate_dps", (int, float), 0.0)),
        pitch_rate=rad(_take(d, "pitch_rate_dps", (int, float), 0.0)),
        yaw_rate=rad(_take(d, "yaw_rate_dps", (int, float), 0.0)),
    )
    _reject_unknown(d, "initial")
    return state


def _parse_schedule(raw: list) -> tuple[ScheduleEntry, ...]:
    entries = []
    for i, item in enumerate(raw):
        if not isinstance(item, list) or len(item) != 5:
            raise ScenarioError(
                f"schedule[{i}] must be [t, roll_deg, pitch_deg, yaw_deg, altitude_m]"
            )
        t, roll, pitch, yaw, alt = map(float, item)
        entries.append(
            ScheduleEntry(
                t=t,
                roll=math.radians(roll),
                pitch=math.radians(pitch),
                yaw=math.radians(yaw),
                altitude=alt,
            )
        )
    return tuple(entries)


def _parse_params(raw: dict) -> dyn.BicopterParams:
    d = dict(raw)
    defaults = dyn.BicopterParams()
    values = {
        name: float(_take(d, name, (int, float), getattr(defaults, name)))
        for name in ("m", "g", "h", "L", "C_T", "I_xx", "I_yy", "I_zz")
    }
    _reject_unknown(d, "params")
    try:
        return dyn.BicopterParams(**values)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc


def _apply_actuators(s: Scenario, raw: dict) -> Scenario:
    from dataclasses import replace

    d = dict(raw)
    limits = dyn.ActuatorLimits(
        omega_max=_take(d, "omega_max", (int, float), s.limits.omega_max),
        gamma_max=math.radians(
            _take(d, "gamma_max_deg", (int, float), math.degrees(s.limits.gamma_max))
        ),
    )
    tau_omega = _take(d, "tau_omega_s", (int, float), s.tau_omega)
    tau_gamma = _take(d, "tau_gamma_s", (int, float), s.tau_gamma)
    _reject_unknown(d, "actuators")
    return replace(s, limits=limits, tau_omega=tau_omega, tau_gamma=tau_gamma)


def _apply_filter(s: Scenario, raw: dict) -> Scenario:
    from dataclasses import replace

    d = dict(raw)
    cutoff = _take(d, "cutoff_hz", (int, float), s.cutoff_hz)
    gain = _take(d, "fusion_gain", (int, float), s.fusion_gain)
    _reject_unknown(d, "filter")
    return replace(s, cutoff_hz=cutoff, fusion_gain=gain)


def _apply_control(s: Scenario, raw: dict) -> Scenario:
    from dataclasses import replace

    d = dict(raw)
    dom = _take(d, "derivative_on_measurement", bool, s.derivative_on_measurement)
    roll_auth = _take(d, "roll_authority", (int, float), s.roll_authority)
    tilt_auth = _take(d, "tilt_authority", (int, float), s.tilt_authority)
    yaw_auth = _take(d, "yaw_authority", (int, float), s.yaw_authority)
    alt_auth = _take(d, "alt_authority", (int, float), s.alt_authority)
    _reject_unknown(d, "control")
    return replace(
        s,
        derivative_on_measurement=dom,
        roll_authority=roll_auth,
        tilt_authority=tilt_auth,
        yaw_authority=yaw_auth,
        alt_authority=alt_auth,
    )


def _take(d: dict, key: str, types, default=None, required: bool = False):
    if key not in d:
        if required:
            raise ScenarioError(f"missing required field {key!r}")
        return default
    value = d.pop(key)
    if types is int and isinstance(value, bool):
        raise ScenarioError(f"field {key!r} must be an integer")
    if not isinstance(value, types):
        raise ScenarioError(f"field {key!r} has wrong type")
    return value


def _reject_unknown(d: dict, context: str) -> None:
    if d:
        names = ", ".join(sorted(map(repr, d)))
        raise ScenarioError(f"unknown field(s) in {context}: {names}")
