"""Rigid-body plant of the bicopter: actuator model, control-vector algebra,
equations of motion and fixed-step RK4 integration.

Frame and sign conventions, fixed once here:

* NED world frame, z positive down, so positive total thrust u1 opposes
  gravity (``z'' = g - u1/m`` at level attitude).
* Rotor speeds enter as Omega^2; thrust per rotor is F = C_T * Omega^2.
  Negative thrust is not modeled (Omega >= 0).
* Positive tilt angle gamma tilts rotor thrust toward +x (nose-forward).
* Attitude dynamics are per-axis double integrators driven by the control
  vector: roll'' = (L/Ixx) u2, pitch'' = (h/Iyy) u3, yaw'' = (L/Izz) u4.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .rotation import wrap_angle

MODE_TESTBED = "testbed"
MODE_FREEFLIGHT = "freeflight"

DEFAULT_DT = 0.0028  # control/sim period, s


class Diverged(RuntimeError):
    """Raised when integration produces a non-finite state."""

    def __init__(self, tick: int):
        super().__init__(f"diverged: non-finite state at tick {tick}")
        self.tick = tick


@dataclass(frozen=True)
class BicopterParams:
    """Physical constants of the vehicle (defaults: the reference airframe)."""

    m: float = 0.725        # mass, kg
    g: float = 9.81         # gravitational acceleration, m/s^2
    h: float = 0.042        # vertical CoG-to-rotor distance, m
    L: float = 0.225        # horizontal CoG-to-rotor distance, m
    C_T: float = 0.1222     # thrust coefficient, N per (rad/s)^2
    I_xx: float = 0.116e-3  # kg m^2
    I_yy: float = 0.0408e-3
    I_zz: float = 0.105e-3

    def __post_init__(self) -> None:
        for name in ("m", "g", "h", "L", "C_T", "I_xx", "I_yy", "I_zz"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")

    def hover_thrust(self) -> float:
        """Total thrust balancing weight, N."""
        return self.m * self.g

    def hover_omega(self) -> float:
        """Per-rotor speed for hover at zero tilt, rad/s."""
        return math.sqrt(self.hover_thrust() / (2.0 * self.C_T))


@dataclass(frozen=True)
class ActuatorLimits:
    """Saturation bounds for rotor speed and tilt servos.

    omega_max defaults to twice the hover speed of the reference airframe so
    mid-range throttle hovers; the tilt range matches a small hobby servo.
    """

    omega_max: float = 12.0                # rad/s
    gamma_max: float = math.radians(45.0)  # rad


@dataclass(frozen=True)
class ActuatorCommand:
    """Rotor speeds (rad/s, >= 0) and tilt angles (rad)."""

    omega_r: float
    omega_l: float
    gamma_r: float
    gamma_l: float


@dataclass(frozen=True)
class ControlVector:
    """Aggregated inputs: total thrust u1, roll u2, pitch u3, yaw u4 channels (N)."""

    u1: float
    u2: float
    u3: float
    u4: float


@dataclass(frozen=True)
class BodyForces:
    """Per-rotor thrusts and net body-frame force components (N)."""

    f_r: float
    f_l: float
    f_x: float
    f_y: float
    f_z: float


@dataclass(frozen=True)
class RigidBodyState:
    """Full 6-DOF truth: NED position/velocity, ZYX attitude and its rates."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    vx: float = 0.0
    vy: float = 0.0
    vz: float = 0.0
    roll: float = 0.0
    pitch: float = 0.0
    yaw: float = 0.0
    roll_rate: float = 0.0
    pitch_rate: float = 0.0
    yaw_rate: float = 0.0

    def as_tuple(self) -> tuple[float, ...]:
        return (self.x, self.y, self.z, self.vx, self.vy, self.vz,
                self.roll, self.pitch, self.yaw,
                self.roll_rate, self.pitch_rate, self.yaw_rate)

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in self.as_tuple())


@dataclass(frozen=True)
class ExternalDisturbance:
    """World-frame force (N) on the CoM plus body-frame torque (N m)."""

    force_world: tuple[float, float, float] = (0.0, 0.0, 0.0)
    torque_body: tuple[float, float, float] = (0.0, 0.0, 0.0)


NO_DISTURBANCE = ExternalDisturbance()


def control_vector(cmd: ActuatorCommand, p: BicopterParams) -> ControlVector:
    """Aggregate rotor speeds and tilts into the thrust/roll/pitch/yaw inputs."""
    fr = p.C_T * cmd.omega_r * cmd.omega_r
    fl = p.C_T * cmd.omega_l * cmd.omega_l
    cr, sr = math.cos(cmd.gamma_r), math.sin(cmd.gamma_r)
    cl, sl = math.cos(cmd.gamma_l), math.sin(cmd.gamma_l)
    return ControlVector(
        u1=fr * cr + fl * cl,
        u2=fr * cr - fl * cl,
        u3=fr * sr + fl * sl,
        u4=fr * sr - fl * sl,
    )


def allocate(
    u: ControlVector, p: BicopterParams, limits: ActuatorLimits = ActuatorLimits()
) -> tuple[ActuatorCommand, bool]:
    """Invert control_vector: recover rotor speeds and tilts from (u1..u4).

    Returns the command and a saturation flag; when the flag is set the
    command has been clamped to the actuator limits and the round trip
    through control_vector will not reproduce u.
    """
    # Right side carries (u1+u2, u3+u4), left side (u1-u2, u3-u4); the
    # radicand below cannot go negative by construction.
    saturated = False
    cmds = []
    for axial, tilt in ((u.u1 + u.u2, u.u3 + u.u4), (u.u1 - u.u2, u.u3 - u.u4)):
        gamma = math.atan2(tilt, axial) if (tilt != 0.0 or axial != 0.0) else 0.0
        omega_sq = math.sqrt(axial * axial + tilt * tilt) / (2.0 * p.C_T)
        omega = math.sqrt(omega_sq)
        if omega > limits.omega_max:
            omega = limits.omega_max
            saturated = True
        if abs(gamma) > limits.gamma_max:
            gamma = math.copysign(limits.gamma_max, gamma)
            saturated = True
        cmds.append((omega, gamma))
    (omega_r, gamma_r), (omega_l, gamma_l) = cmds
    return ActuatorCommand(omega_r, omega_l, gamma_r, gamma_l), saturated


def body_forces(cmd: ActuatorCommand, p: BicopterParams) -> BodyForces:
    """Per-rotor thrusts and their body-frame x/z components (y is always zero)."""
    fr = p.C_T * cmd.omega_r * cmd.omega_r
    fl = p.C_T * cmd.omega_l * cmd.omega_l
    return BodyForces(
        f_r=fr,
        f_l=fl,
        f_x=fr * math.sin(cmd.gamma_r) + fl * math.sin(cmd.gamma_l),
        f_y=0.0,
        f_z=fr * math.cos(cmd.gamma_r) + fl * math.cos(cmd.gamma_l),
    )


def accelerations(
    s: RigidBodyState,
    u: ControlVector,
    p: BicopterParams,
    dist: ExternalDisturbance = NO_DISTURBANCE,
) -> tuple[float, float, float, float, float, float]:
    """Second derivatives (x'', y'', z'', roll'', pitch'', yaw'')."""
    sph, cph = math.sin(s.roll), math.cos(s.roll)
    sth, cth = math.sin(s.pitch), math.cos(s.pitch)
    sps, cps = math.sin(s.yaw), math.cos(s.yaw)
    fx, fy, fz = dist.force_world
    tx, ty, tz = dist.torque_body
    ax = -(sph * sps + cph * sth * cps) * u.u1 / p.m - (cth * cps) * u.u3 / p.m + fx / p.m
    ay = -(-sph * cps + cph * sth * sps) * u.u1 / p.m + (cth * sps) * u.u3 / p.m + fy / p.m
    az = p.g - (cph * cth) * u.u1 / p.m - sth * u.u3 / p.m + fz / p.m
    aroll = (p.L / p.I_xx) * u.u2 + tx / p.I_xx
    apitch = (p.h / p.I_yy) * u.u3 + ty / p.I_yy
    ayaw = (p.L / p.I_zz) * u.u4 + tz / p.I_zz
    return ax, ay, az, aroll, apitch, ayaw


def step(
    s: RigidBodyState,
    cmd: ActuatorCommand,
    p: BicopterParams,
    dt: float = DEFAULT_DT,
    mode: str = MODE_FREEFLIGHT,
    dist: ExternalDisturbance = NO_DISTURBANCE,
    tick: int = 0,
) -> RigidBodyState:
    """Advance the state one fixed RK4 step under a zero-order-hold command.

    In testbed mode the rig pins the vehicle: translational position and
    velocity are forced to zero after the step. Yaw and roll are wrapped
    to (-pi, pi].
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    u = control_vector(cmd, p)

    def deriv(y: tuple[float, ...]) -> tuple[float, ...]:
        st = RigidBodyState(*y)
        ax, ay, az, ar, apitch, ayaw = accelerations(st, u, p, dist)
        return (y[3], y[4], y[5], ax, ay, az,
                y[9], y[10], y[11], ar, apitch, ayaw)

    y0 = s.as_tuple()
    try:
        k1 = deriv(y0)
        k2 = deriv(tuple(y0[i] + 0.5 * dt * k1[i] for i in range(12)))
        k3 = deriv(tuple(y0[i] + 0.5 * dt * k2[i] for i in range(12)))
        k4 = deriv(tuple(y0[i] + dt * k3[i] for i in range(12)))
        y1 = tuple(
            y0[i] + dt * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0
            for i in range(12)
        )
    except (ValueError, OverflowError) as exc:
        # trig/exp of a non-finite intermediate state
        raise Diverged(tick) from exc
    out = RigidBodyState(*y1)
    if mode == MODE_TESTBED:
        out = replace(out, x=0.0, y=0.0, z=0.0, vx=0.0, vy=0.0, vz=0.0)
    out = replace(out, roll=wrap_angle(out.roll), yaw=wrap_angle(out.yaw))
    if not out.is_finite():
        raise Diverged(tick)
    return out


@dataclass
class FirstOrderLag:
    """Discrete first-order actuator lag; tau = 0 passes commands through."""

    tau: float
    value: float = 0.0

    def reset(self, value: float) -> None:
        self.value = value

    def advance(self, command: float, dt: float) -> float:
        if self.tau <= 0.0:
            self.value = command
        else:
            a = 1.0 - math.exp(-dt / self.tau)
            self.value += a * (command - self.value)
        return self.value


@dataclass
class ActuatorBank:
    """Rotor-speed and servo lags for both sides (tau in seconds, 0 = off)."""

    tau_omega: float = 0.05
    tau_gamma: float = 0.03
    omega_r: FirstOrderLag = field(init=False)
    omega_l: FirstOrderLag = field(init=False)
    gamma_r: FirstOrderLag = field(init=False)
    gamma_l: FirstOrderLag = field(init=False)

    def __post_init__(self) -> None:
        self.omega_r = FirstOrderLag(self.tau_omega)
        self.omega_l = FirstOrderLag(self.tau_omega)
        self.gamma_r = FirstOrderLag(self.tau_gamma)
        self.gamma_l = FirstOrderLag(self.tau_gamma)

    def reset(self, cmd: ActuatorCommand) -> None:
        self.omega_r.reset(cmd.omega_r)
        self.omega_l.reset(cmd.omega_l)
        self.gamma_r.reset(cmd.gamma_r)
        self.gamma_l.reset(cmd.gamma_l)

    def advance(self, cmd: ActuatorCommand, dt: float) -> ActuatorCommand:
        return ActuatorCommand(
            self.omega_r.advance(cmd.omega_r, dt),
            self.omega_l.advance(cmd.omega_l, dt),
            self.gamma_r.advance(cmd.gamma_r, dt),
            self.gamma_l.advance(cmd.gamma_l, dt),
        )
