"""Discrete PID attitude/altitude control and the bicopter mixer.

The controllers compute in degrees (the published gain sets are degree
scaled) on the error e = measured - reference, at a fixed sampling period:

    u(k) = Kp e(k) + Ki T sum(e(0..k)) + Kd (e(k) - e(k-1)) / T

Channel outputs are dimensionless "counts" in the degree domain; the mixer
converts them to normalized throttle and servo radians through explicit
scale factors. Sign closure of the three loops against the plant:

* positive roll error lowers the right throttle and raises the left, so the
  differential-thrust channel u2 opposes the error;
* positive pitch or yaw error deflects the servo commands, and a positive
  servo command tilts its rotor toward -x (tilt angle gamma = -servo), so
  the tilt channels u3/u4 oppose their errors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .dynamics import ActuatorLimits, BicopterParams
from .rotation import wrap_angle

AXES = ("roll", "pitch", "yaw", "altitude")

SAT_THROTTLE_R = 1
SAT_THROTTLE_L = 2
SAT_SERVO_R = 4
SAT_SERVO_L = 8

DEG = math.degrees


@dataclass(frozen=True)
class PidGains:
    """Non-negative proportional/integral/derivative gains for one axis."""

    kp: float
    ki: float
    kd: float

    def __post_init__(self) -> None:
        if self.kp < 0.0 or self.ki < 0.0 or self.kd < 0.0:
            raise ValueError("PID gains must be non-negative")


# Published presets: the test-bed set and the free-flight set.
TESTBED_GAINS: dict[str, PidGains] = {
    "roll": PidGains(3.3, 0.030, 23.0),
    "pitch": PidGains(3.3, 0.030, 23.0),
    "yaw": PidGains(6.8, 0.045, 0.0),
}
FLIGHT_GAINS: dict[str, PidGains] = {
    "roll": PidGains(1.3, 0.030, 20.0),
    "pitch": PidGains(1.3, 0.108, 12.0),
    "yaw": PidGains(0.1, 0.010, 16.0),
}
# Altitude hold is not part of the published sets; these give ~1 rad/s
# bandwidth at the default altitude actuation scale.
DEFAULT_ALTITUDE_GAINS = PidGains(1.0, 0.05, 1.6)

GAIN_PRESETS: dict[str, dict[str, PidGains]] = {
    "testbed": TESTBED_GAINS,
    "flight": FLIGHT_GAINS,
}


@dataclass
class PidState:
    """Accumulated integral and previous error of one discrete loop."""

    T: float = 0.0028
    error_sum: float = 0.0
    prev_error: float = 0.0
    prev_measured: float = 0.0

    def __post_init__(self) -> None:
        if self.T <= 0.0:
            raise ValueError("sampling period must be positive")

    def reset(self) -> None:
        self.error_sum = 0.0
        self.prev_error = 0.0
        self.prev_measured = 0.0


def pid_step(
    e: float,
    gains: PidGains,
    state: PidState,
    i_limit: float | None = None,
    measured: float | None = None,
    derivative_on_measurement: bool = False,
) -> float:
    """One tick of the discrete PID; updates the state memories.

    ``i_limit`` clamps the integral contribution: |Ki T sum(e)| <= i_limit.
    With ``derivative_on_measurement`` the derivative acts on the measured
    signal instead of the error, suppressing the setpoint kick.
    """
    state.error_sum += e
    if i_limit is not None and gains.ki > 0.0:
        bound = i_limit / (gains.ki * state.T)
        state.error_sum = max(-bound, min(bound, state.error_sum))
    if derivative_on_measurement and measured is not None:
        diff = measured - state.prev_measured
    else:
        diff = e - state.prev_error
    u = gains.kp * e + gains.ki * state.T * state.error_sum + gains.kd * diff / state.T
    state.prev_error = e
    if measured is not None:
        state.prev_measured = measured
    return u


def attitude_error(measured: float, reference: float, axis: str) -> float:
    """Tracking error e = measured - reference (radians); yaw is wrapped."""
    e = measured - reference
    if axis == "yaw":
        e = wrap_angle(e)
    return e


@dataclass(frozen=True)
class Setpoints:
    """References for the four loops plus the neutral actuator commands."""

    roll: float = 0.0          # rad
    pitch: float = 0.0         # rad
    yaw: float = 0.0           # rad
    altitude: float = 0.0      # m, NED z (positive down)
    throttle_base: float = 0.5
    center_servo: float = 0.0  # rad


@dataclass(frozen=True)
class MixerOutput:
    """Normalized throttles, servo commands (rad) and saturation bitmask."""

    throttle_r: float
    throttle_l: float
    servo_r: float
    servo_l: float
    sat_flags: int = 0


@dataclass(frozen=True)
class ControlScales:
    """Conversion from degree-domain PID counts to actuator units.

    One count of roll output shifts each throttle by ``roll_to_throttle``;
    one count of pitch (yaw) output moves the servo commands by
    ``tilt_to_servo`` (``yaw_to_servo``) radians; one count of altitude
    output adds ``alt_to_throttle`` to both throttles.
    """

    roll_to_throttle: float = 1.0
    tilt_to_servo: float = 1.0
    yaw_to_servo: float = 1.0
    alt_to_throttle: float = 1.0

    @staticmethod
    def for_airframe(
        p: BicopterParams,
        limits: ActuatorLimits = ActuatorLimits(),
        throttle_base: float = 0.5,
        roll_authority: float = 0.25,
        tilt_authority: float = 3.0,
        yaw_authority: float = 0.5,
        alt_authority: float = 1.0,
    ) -> "ControlScales":
        """Scales that give each loop a chosen small-signal plant gain.

        The authorities are the angular acceleration (deg/s^2) produced per
        output count for the attitude loops (m/s^2 per count for altitude),
        linearized at the given throttle trim. The defaults stabilize both
        published gain sets at the 2.8 ms period; yaw runs softer than
        pitch because its published derivative gain is zero, leaving the
        loop without damping.
        """
        omega_base = throttle_base * limits.omega_max
        # d(u2)/d(throttle delta) at trim, both rotors moved antisymmetrically
        thrust_slope = 4.0 * p.C_T * omega_base * limits.omega_max
        roll_gain_per_unit = DEG(1.0) * (p.L / p.I_xx) * thrust_slope
        # d(u3)/d(gamma) at trim, both servos moved together
        tilt_slope = p.C_T * 2.0 * omega_base * omega_base
        tilt_gain_per_rad = DEG(1.0) * (p.h / p.I_yy) * tilt_slope
        yaw_gain_per_rad = DEG(1.0) * (p.L / p.I_zz) * tilt_slope
        alt_gain_per_unit = thrust_slope / p.m
        return ControlScales(
            roll_to_throttle=roll_authority / roll_gain_per_unit,
            tilt_to_servo=tilt_authority / tilt_gain_per_rad,
            yaw_to_servo=yaw_authority / yaw_gain_per_rad,
            alt_to_throttle=alt_authority / alt_gain_per_unit,
        )


UNIT_SCALES = ControlScales()


def mixer(
    u_roll: float,
    u_pitch: float,
    u_yaw: float,
    u_alt: float,
    sp: Setpoints,
    scales: ControlScales = UNIT_SCALES,
    limits: ActuatorLimits = ActuatorLimits(),
) -> MixerOutput:
    """Combine per-axis outputs into throttles and servo commands.

    Roll output splits the throttles antisymmetrically (positive error
    lowers the right rotor); pitch output moves both servos together, yaw
    differentially. Everything is clamped with per-actuator flags.
    """
    d_thr = scales.roll_to_throttle * u_roll
    d_alt = scales.alt_to_throttle * u_alt
    d_pitch = scales.tilt_to_servo * u_pitch
    d_yaw = scales.yaw_to_servo * u_yaw
    thr_r = sp.throttle_base + d_alt - d_thr
    thr_l = sp.throttle_base + d_alt + d_thr
    srv_r = sp.center_servo + d_pitch + d_yaw
    srv_l = sp.center_servo + d_pitch - d_yaw
    flags = 0
    if not 0.0 <= thr_r <= 1.0:
        flags |= SAT_THROTTLE_R
        thr_r = min(1.0, max(0.0, thr_r))
    if not 0.0 <= thr_l <= 1.0:
        flags |= SAT_THROTTLE_L
        thr_l = min(1.0, max(0.0, thr_l))
    g = limits.gamma_max
    if abs(srv_r) > g:
        flags |= SAT_SERVO_R
        srv_r = math.copysign(g, srv_r)
    if abs(srv_l) > g:
        flags |= SAT_SERVO_L
        srv_l = math.copysign(g, srv_l)
    return MixerOutput(thr_r, thr_l, srv_r, srv_l, flags)


def throttle_to_omega(throttle: float, limits: ActuatorLimits = ActuatorLimits()) -> float:
    """Linear throttle-to-rotor-speed map; hover sits at hover_omega/omega_max."""
    if not 0.0 <= throttle <= 1.0:
        raise ValueError("throttle must lie in [0, 1]")
    return throttle * limits.omega_max


def servo_to_tilt(servo: float) -> float:
    """Tilt angle produced by a servo command.

    A positive servo command tilts the rotor toward -x (thrust backward):
    gamma = -servo. This orientation closes the pitch and yaw loops with
    negative feedback against the plant's tilt channels.
    """
    return -servo


@dataclass
class ControllerOutput:
    """Per-axis PID outputs (degree-domain counts) plus the mixed commands."""

    u_roll: float
    u_pitch: float
    u_yaw: float
    u_alt: float
    mixer: MixerOutput


@dataclass
class AttitudeController:
    """Four parallel single-rate loops (roll, pitch, yaw, altitude) + mixer."""

    gains: dict[str, PidGains]
    dt: float = 0.0028
    scales: ControlScales = UNIT_SCALES
    limits: ActuatorLimits = ActuatorLimits()
    setpoints: Setpoints = Setpoints()
    altitude_gains: PidGains = DEFAULT_ALTITUDE_GAINS
    derivative_on_measurement: bool = False
    windup_fraction: float = 0.25
    states: dict[str, PidState] = field(init=False)

    def __post_init__(self) -> None:
        self.gains = dict(self.gains)
        self.gains.setdefault("altitude", self.altitude_gains)
        self.states = {axis: PidState(T=self.dt) for axis in AXES}

    def i_limit(self, axis: str) -> float:
        """Integral clamp: windup_fraction of the actuator span, in counts."""
        if axis == "roll":
            span = 1.0 / self.scales.roll_to_throttle
        elif axis == "altitude":
            span = 1.0 / self.scales.alt_to_throttle
        elif axis == "yaw":
            span = 2.0 * self.limits.gamma_max / self.scales.yaw_to_servo
        else:
            span = 2.0 * self.limits.gamma_max / self.scales.tilt_to_servo
        return self.windup_fraction * span

    def set_gains(self, axis: str, gains: PidGains, reset: bool = False) -> None:
        if axis not in AXES:
            raise ValueError(f"unknown axis {axis!r}")
        self.gains[axis] = gains
        if reset:
            self.states[axis].reset()

    def reset(self) -> None:
        for state in self.states.values():
            state.reset()

    def axis_step(self, axis: str, measured: float, reference: float) -> float:
        """Error in degrees through the axis PID; output in counts."""
        e_deg = DEG(attitude_error(measured, reference, axis))
        return pid_step(
            e_deg,
            self.gains[axis],
            self.states[axis],
            i_limit=self.i_limit(axis),
            measured=DEG(measured),
            derivative_on_measurement=self.derivative_on_measurement,
        )

    def step(
        self,
        measured: tuple[float, float, float],
        z: float = 0.0,
        altitude_hold: bool = False,
    ) -> ControllerOutput:
        """One control tick from estimated attitude (rad) and NED z (m)."""
        sp = self.setpoints
        u_roll = self.axis_step("roll", measured[0], sp.roll)
        u_pitch = self.axis_step("pitch", measured[1], sp.pitch)
        u_yaw = self.axis_step("yaw", measured[2], sp.yaw)
        if altitude_hold:
            u_alt = pid_step(
                z - sp.altitude,
                self.gains["altitude"],
                self.states["altitude"],
                i_limit=self.i_limit("altitude"),
                measured=z,
                derivative_on_measurement=self.derivative_on_measurement,
            )
        else:
            u_alt = 0.0
        out = mixer(u_roll, u_pitch, u_yaw, u_alt, sp, self.scales, self.limits)
        return ControllerOutput(u_roll, u_pitch, u_yaw, u_alt, out)

    def set_setpoints(self, **updates: float) -> None:
        self.setpoints = replace(self.setpoints, **updates)
