"""Simulated IMU and the two attitude estimators.

The simulated accelerometer reports specific force in g with the sign
convention of a common MEMS part: a stationary, level sensor reads +1 g on
the z axis. The gyro reports body rates in deg/s. Both estimators keep
their state in radians.

The complementary filter blends, per axis,

    fused <- (1 - alpha) * (fused + gyro_rate * dt) + alpha * accel_angle

so the accelerometer tilt is low-passed and the integrated gyro is
high-passed with the same smoothing factor alpha. Yaw has no absolute
reference without a magnetometer and is integrated from the gyro alone.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .rotation import (
    EulerAngles,
    Quaternion,
    euler_to_quat,
    integrate_gyro,
    normalize,
    quat_from_rotation_vector,
    quat_to_euler,
    quat_to_gravity,
    rotate_world_to_body,
    wrap_angle,
)

MIN_TILT_ACCEL_G = 0.1  # below this norm the tilt direction is unreliable


@dataclass(frozen=True)
class ImuSample:
    """One IMU frame: specific force (g), body rates (deg/s), timestamp (s)."""

    accel: tuple[float, float, float]
    gyro: tuple[float, float, float]
    t: float


@dataclass(frozen=True)
class NoiseModel:
    """Gaussian sensor noise and fixed biases; identical seed => identical stream."""

    accel_std: float = 0.02   # g
    gyro_std: float = 0.3     # deg/s
    accel_bias: tuple[float, float, float] = (0.0, 0.0, 0.0)
    gyro_bias: tuple[float, float, float] = (0.0, 0.0, 0.0)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.accel_std < 0.0 or self.gyro_std < 0.0:
            raise ValueError("noise std must be >= 0")


QUIET = NoiseModel(accel_std=0.0, gyro_std=0.0)


def alpha_from_cutoff(f_c: float, dt: float) -> float:
    """Smoothing factor alpha = dt / (RC + dt) with RC = 1/(2 pi f_c)."""
    if f_c <= 0.0 or dt <= 0.0:
        raise ValueError("cutoff frequency and sampling period must be positive")
    rc = 1.0 / (2.0 * math.pi * f_c)
    return dt / (rc + dt)


@dataclass(frozen=True)
class FilterConfig:
    """Cutoff frequency and sampling period of the complementary filter."""

    f_c: float = 5.0
    dt: float = 0.0028

    @property
    def alpha(self) -> float:
        return alpha_from_cutoff(self.f_c, self.dt)


def lpf_step(x: float, y_prev: float, alpha: float) -> float:
    """Discrete low-pass: y = alpha x + (1 - alpha) y_prev."""
    return alpha * x + (1.0 - alpha) * y_prev


def hpf_step(x: float, x_prev: float, y_prev: float, alpha: float) -> float:
    """Discrete high-pass: y = alpha y_prev + alpha (x - x_prev)."""
    return alpha * y_prev + alpha * (x - x_prev)


def accel_to_angles(accel: tuple[float, float, float]) -> tuple[float, float]:
    """Tilt (roll, pitch) in radians from a specific-force reading.

    Rejects near-free-fall frames where the gravity direction is lost.
    """
    ax, ay, az = accel
    norm = math.sqrt(ax * ax + ay * ay + az * az)
    if norm <= MIN_TILT_ACCEL_G:
        raise ValueError("unreliable tilt: accelerometer norm too small")
    roll = math.atan2(ay, az)
    pitch = math.atan2(-ax, math.sqrt(ay * ay + az * az))
    return roll, pitch


@dataclass
class ComplementaryFilter:
    """Low-pass accel tilt + high-pass integrated gyro, per axis.

    ``alpha`` overrides the cutoff-derived smoothing factor when set; the
    boundary values collapse the blend to pure accel tilt (1.0) or pure
    gyro integration (0.0).
    """

    config: FilterConfig = FilterConfig()
    alpha: float | None = None
    roll: float = 0.0
    pitch: float = 0.0
    yaw: float = 0.0
    initialized: bool = False

    def reset(self, roll: float = 0.0, pitch: float = 0.0, yaw: float = 0.0) -> None:
        self.roll, self.pitch, self.yaw = roll, pitch, yaw
        self.initialized = True

    def update(self, sample: ImuSample) -> tuple[float, float, float]:
        a = self.config.alpha if self.alpha is None else self.alpha
        dt = self.config.dt
        gx, gy, gz = (math.radians(g) for g in sample.gyro)
        try:
            roll_acc, pitch_acc = accel_to_angles(sample.accel)
        except ValueError:
            roll_acc, pitch_acc = None, None
        if not self.initialized:
            # seed the blend from the first usable tilt measurement
            if roll_acc is not None:
                self.roll, self.pitch = roll_acc, pitch_acc
            self.initialized = True
            return self.roll, self.pitch, self.yaw
        if roll_acc is None:
            self.roll += gx * dt
            self.pitch += gy * dt
        else:
            self.roll = (1.0 - a) * (self.roll + gx * dt) + a * roll_acc
            self.pitch = (1.0 - a) * (self.pitch + gy * dt) + a * pitch_acc
        self.yaw = wrap_angle(self.yaw + gz * dt)
        return self.roll, self.pitch, self.yaw


@dataclass
class QuaternionFusion:
    """Gyro-propagated quaternion with proportional gravity correction."""

    gain: float = 0.02
    dt: float = 0.0028
    q: Quaternion = Quaternion(1.0, 0.0, 0.0, 0.0)
    initialized: bool = False

    def __post_init__(self) -> None:
        if not 0.0 <= self.gain <= 1.0:
            raise ValueError("fusion gain must lie in [0, 1]")

    def reset(self, roll: float = 0.0, pitch: float = 0.0, yaw: float = 0.0) -> None:
        self.q = euler_to_quat(EulerAngles(roll, pitch, yaw))
        self.initialized = True

    def update(self, sample: ImuSample) -> tuple[float, float, float]:
        if not self.initialized:
            try:
                roll_acc, pitch_acc = accel_to_angles(sample.accel)
                self.reset(roll_acc, pitch_acc, 0.0)
            except ValueError:
                self.initialized = True
            return self.angles()
        omega = tuple(math.radians(g) for g in sample.gyro)
        self.q = integrate_gyro(self.q, omega, self.dt)
        if self.gain > 0.0:
            self._correct_tilt(sample.accel)
        return self.angles()

    def angles(self) -> tuple[float, float, float]:
        e = quat_to_euler(self.q)
        return e.roll, e.pitch, e.yaw

    def _correct_tilt(self, accel: tuple[float, float, float]) -> None:
        ax, ay, az = accel
        norm = math.sqrt(ax * ax + ay * ay + az * az)
        if norm <= MIN_TILT_ACCEL_G:
            return
        mx, my, mz = ax / norm, ay / norm, az / norm
        g = quat_to_gravity(self.q)
        # rotation vector taking predicted gravity toward the measurement,
        # scaled by the correction gain; body-frame, right-multiplied
        cx = my * g.z - mz * g.y
        cy = mz * g.x - mx * g.z
        cz = mx * g.y - my * g.x
        sin_angle = math.sqrt(cx * cx + cy * cy + cz * cz)
        cos_angle = mx * g.x + my * g.y + mz * g.z
        if sin_angle < 1e-12:
            return
        angle = math.atan2(sin_angle, cos_angle)
        k = self.gain * angle / sin_angle
        self.q = normalize(self.q * quat_from_rotation_vector((cx * k, cy * k, cz * k)))


@dataclass
class ImuSimulator:
    """Synthetic MEMS IMU: specific force + body rates with noise, bias, clipping."""

    noise: NoiseModel = NoiseModel()
    full_scale_g: float = 2.0
    full_scale_dps: float = 250.0
    gravity: float = 9.81
    _rng: random.Random = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._rng = random.Random(self.noise.seed)

    def sample(
        self,
        attitude: tuple[float, float, float],
        body_rates: tuple[float, float, float],
        accel_world: tuple[float, float, float],
        t: float,
    ) -> ImuSample:
        """Measure a state: attitude (rad), body rates (rad/s), world accel (m/s^2)."""
        q = euler_to_quat(_euler(attitude))
        # specific force, g units: R^T (g_world - a_world) / g
        gx, gy, gz = rotate_world_to_body(
            q,
            (-accel_world[0], -accel_world[1], self.gravity - accel_world[2]),
        )
        accel = []
        for i, v in enumerate((gx / self.gravity, gy / self.gravity, gz / self.gravity)):
            v += self.noise.accel_bias[i]
            if self.noise.accel_std > 0.0:
                v += self._rng.gauss(0.0, self.noise.accel_std)
            accel.append(_clip(v, self.full_scale_g))
        gyro = []
        for i, w in enumerate(body_rates):
            v = math.degrees(w) + self.noise.gyro_bias[i]
            if self.noise.gyro_std > 0.0:
                v += self._rng.gauss(0.0, self.noise.gyro_std)
            gyro.append(_clip(v, self.full_scale_dps))
        return ImuSample(accel=tuple(accel), gyro=tuple(gyro), t=t)


def body_rates_from_euler(
    attitude: tuple[float, float, float], rates: tuple[float, float, float]
) -> tuple[float, float, float]:
    """Body angular rates (p, q, r) from ZYX Euler angles and their rates."""
    roll, pitch, _ = attitude
    droll, dpitch, dyaw = rates
    sph, cph = math.sin(roll), math.cos(roll)
    sth, cth = math.sin(pitch), math.cos(pitch)
    p = droll - dyaw * sth
    q = dpitch * cph + dyaw * cth * sph
    r = -dpitch * sph + dyaw * cth * cph
    return p, q, r


def _euler(attitude: tuple[float, float, float]) -> EulerAngles:
    return EulerAngles(attitude[0], attitude[1], attitude[2])


def _clip(v: float, full_scale: float) -> float:
    return max(-full_scale, min(full_scale, v))
