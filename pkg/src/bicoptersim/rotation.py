"""Quaternion and Euler-angle algebra for attitude representation.

Conventions used throughout the package:

* Quaternions are stored as (w, x, y, z) and map body vectors into the
  world frame: ``v_world = R(q) v_body``.
* Euler angles are ZYX (yaw-pitch-roll): ``R = Rz(yaw) Ry(pitch) Rx(roll)``.
* World frame is NED (z positive down); angles are radians internally and
  degrees at every serialized boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

GIMBAL_LOCK_MARGIN = 1e-6  # radians from |pitch| = pi/2


@dataclass(frozen=True)
class Quaternion:
    """Unit quaternion w + ix + jy + kz."""

    w: float
    x: float
    y: float
    z: float

    def norm(self) -> float:
        return math.sqrt(self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z)

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        """Hamilton product self ⊗ other."""
        w1, x1, y1, z1 = self.w, self.x, self.y, self.z
        w2, x2, y2, z2 = other.w, other.x, other.y, other.z
        return Quaternion(
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        )


IDENTITY = Quaternion(1.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class EulerAngles:
    """ZYX Euler triple in radians; roll/yaw in (-pi, pi], pitch in [-pi/2, pi/2].

    ``gimbal_lock`` is raised (with roll forced to 0) when pitch is within
    GIMBAL_LOCK_MARGIN of +/-90 deg, where roll and yaw are not separable.
    """

    roll: float
    pitch: float
    yaw: float
    gimbal_lock: bool = False


@dataclass(frozen=True)
class GravityVector:
    """Body-frame direction of gravity (unit vector, dimensionless)."""

    x: float
    y: float
    z: float


def normalize(q: Quaternion) -> Quaternion:
    """Scale q to unit norm, preserving direction."""
    n = q.norm()
    if n <= 0.0 or not math.isfinite(n):
        raise ValueError("degenerate quaternion")
    return Quaternion(q.w / n, q.x / n, q.y / n, q.z / n)


def quat_to_gravity(q: Quaternion) -> GravityVector:
    """Body-frame gravity direction: the transpose rotation of world (0, 0, 1).

    Equals the third row of R(q), i.e. R(q)^T (0,0,1).
    """
    _require_unit(q)
    w, x, y, z = q.w, q.x, q.y, q.z
    return GravityVector(
        2.0 * (x * z - w * y),
        2.0 * (w * x + y * z),
        w * w - x * x - y * y + z * z,
    )


def quat_to_euler(q: Quaternion) -> EulerAngles:
    """Decompose a unit quaternion into ZYX Euler angles.

    At gimbal lock (|pitch| within GIMBAL_LOCK_MARGIN of 90 deg) the result
    carries ``gimbal_lock=True`` with roll set to 0 and yaw absorbing the
    full in-plane rotation; no error is raised so estimators keep running.
    """
    _require_unit(q)
    w, x, y, z = q.w, q.x, q.y, q.z
    # R31 = -sin(pitch) for the ZYX factorization
    s = 2.0 * (x * z - w * y)
    s = max(-1.0, min(1.0, s))
    pitch = -math.asin(s)
    if abs(abs(pitch) - 0.5 * math.pi) < GIMBAL_LOCK_MARGIN:
        # roll/yaw degenerate: only yaw -/+ roll is observable; report it as yaw
        r22 = 1.0 - 2.0 * (x * x + z * z)
        r23 = 2.0 * (y * z - w * x)
        yaw = math.atan2(r23 if pitch > 0.0 else -r23, r22)
        return EulerAngles(0.0, pitch, wrap_angle(yaw), gimbal_lock=True)
    yaw = math.atan2(2.0 * (x * y + w * z), 1.0 - 2.0 * (y * y + z * z))
    roll = math.atan2(2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y))
    return EulerAngles(roll, pitch, yaw)


def euler_to_quat(e: EulerAngles) -> Quaternion:
    """Quaternion for Rz(yaw) Ry(pitch) Rx(roll)."""
    hr, hp, hy = 0.5 * e.roll, 0.5 * e.pitch, 0.5 * e.yaw
    cr, sr = math.cos(hr), math.sin(hr)
    cp, sp = math.cos(hp), math.sin(hp)
    cy, sy = math.cos(hy), math.sin(hy)
    return Quaternion(
        cy * cp * cr + sy * sp * sr,
        cy * cp * sr - sy * sp * cr,
        cy * sp * cr + sy * cp * sr,
        sy * cp * cr - cy * sp * sr,
    )


def integrate_gyro(q: Quaternion, omega: tuple[float, float, float], dt: float) -> Quaternion:
    """Advance q by body rates omega (rad/s) over dt using the exact axis-angle step."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    wx, wy, wz = omega
    angle = math.sqrt(wx * wx + wy * wy + wz * wz) * dt
    if angle == 0.0:
        return q
    half = 0.5 * angle
    k = math.sin(half) / (angle / dt)  # sin(half) / |omega|
    dq = Quaternion(math.cos(half), wx * k, wy * k, wz * k)
    return normalize(q * dq)


def rotate_body_to_world(q: Quaternion, v: tuple[float, float, float]) -> tuple[float, float, float]:
    """Apply R(q) to a body-frame vector."""
    p = q * Quaternion(0.0, v[0], v[1], v[2]) * q.conjugate()
    return (p.x, p.y, p.z)


def rotate_world_to_body(q: Quaternion, v: tuple[float, float, float]) -> tuple[float, float, float]:
    """Apply R(q)^T to a world-frame vector."""
    p = q.conjugate() * Quaternion(0.0, v[0], v[1], v[2]) * q
    return (p.x, p.y, p.z)


def quat_from_rotation_vector(rho: tuple[float, float, float]) -> Quaternion:
    """Unit quaternion for a rotation of |rho| radians about rho's direction."""
    angle = math.sqrt(rho[0] * rho[0] + rho[1] * rho[1] + rho[2] * rho[2])
    if angle == 0.0:
        return IDENTITY
    half = 0.5 * angle
    k = math.sin(half) / angle
    return Quaternion(math.cos(half), rho[0] * k, rho[1] * k, rho[2] * k)


def wrap_angle(a: float) -> float:
    """Reduce a (radians) to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a > math.pi:
        a -= 2.0 * math.pi
    elif a <= -math.pi:
        a += 2.0 * math.pi
    return a


def _require_unit(q: Quaternion, tol: float = 1e-6) -> None:
    if abs(q.norm() - 1.0) > tol:
        raise ValueError("quaternion is not unit norm")
