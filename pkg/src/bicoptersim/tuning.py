"""PD gain synthesis by pole placement on the double-integrator attitude plant.

Each attitude axis linearizes to ``angle'' = b * u`` with plant gain b taken
from the airframe constants (roll: L/Ixx, pitch: h/Iyy, yaw: L/Izz). Closing
the loop with u = Kp e + Kd e' gives the characteristic polynomial

    s^2 + (b Kd) s + (b Kp)

so matching a desired s^2 + c1 s + c0 is the exact inversion Kd = c1/b,
Kp = c0/b.

The step-response oracle is the response of the realizable loop where the
derivative acts on the measured output (no setpoint impulse); its transfer
function is b Kp / (s^2 + b Kd s + b Kp). The variant including the
closed-loop zero b Kd s + b Kp (derivative on the error, reference step
differentiated) is available with ``include_reference_zero=True``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .dynamics import BicopterParams

PLANT_AXES = ("roll", "pitch", "yaw")


@dataclass(frozen=True)
class DoubleIntegratorPlant:
    """Attitude plant angle'' = b u with b > 0 (rad/s^2 per unit input)."""

    b: float

    def __post_init__(self) -> None:
        if self.b <= 0.0:
            raise ValueError("plant gain must be positive")


@dataclass(frozen=True)
class DesiredCharacteristic:
    """Target closed-loop polynomial s^2 + c1 s + c0."""

    c1: float
    c0: float

    @staticmethod
    def from_damping(zeta: float, wn: float) -> "DesiredCharacteristic":
        """Standard second-order target s^2 + 2 zeta wn s + wn^2."""
        if zeta <= 0.0 or wn <= 0.0:
            raise ValueError("damping ratio and natural frequency must be positive")
        return DesiredCharacteristic(2.0 * zeta * wn, wn * wn)

    def is_hurwitz(self) -> bool:
        return self.c1 > 0.0 and self.c0 > 0.0


def plant_from_params(p: BicopterParams, axis: str) -> DoubleIntegratorPlant:
    """Per-axis plant gain from the airframe constants."""
    if axis == "roll":
        return DoubleIntegratorPlant(p.L / p.I_xx)
    if axis == "pitch":
        return DoubleIntegratorPlant(p.h / p.I_yy)
    if axis == "yaw":
        return DoubleIntegratorPlant(p.L / p.I_zz)
    raise ValueError(f"unknown axis {axis!r}")


def gains_from_characteristic(
    plant: DoubleIntegratorPlant, want: DesiredCharacteristic
) -> tuple[float, float]:
    """(Kp, Kd) placing the closed-loop poles at the target polynomial's roots."""
    if not want.is_hurwitz():
        raise ValueError("target characteristic must be Hurwitz (c1, c0 > 0)")
    return want.c0 / plant.b, want.c1 / plant.b


def char_poly_from_gains(
    plant: DoubleIntegratorPlant, kp: float, kd: float
) -> tuple[float, float]:
    """(c1, c0) of the closed loop: c1 = b Kd, c0 = b Kp."""
    return plant.b * kd, plant.b * kp


def poles(c1: float, c0: float) -> tuple[complex, complex]:
    """Roots of s^2 + c1 s + c0 via the numerically stable quadratic formula."""
    disc = c1 * c1 - 4.0 * c0
    if disc >= 0.0:
        root = math.sqrt(disc)
        if c1 == 0.0:
            p1, p2 = -root / 2.0, root / 2.0
        else:
            q = -(c1 + math.copysign(root, c1)) / 2.0
            p1, p2 = q, (c0 / q if q != 0.0 else 0.0)
        lo, hi = sorted((p1, p2))
        return (complex(lo), complex(hi))
    imag = math.sqrt(-disc) / 2.0
    return (complex(-c1 / 2.0, -imag), complex(-c1 / 2.0, imag))


def step_response_value(
    plant: DoubleIntegratorPlant,
    kp: float,
    kd: float,
    t: float,
    include_reference_zero: bool = False,
) -> float:
    """Closed-loop unit-step response at time t, by partial fractions."""
    c1, c0 = char_poly_from_gains(plant, kp, kd)
    p1, p2 = poles(c1, c0)
    if p1.real >= 0.0 or p2.real >= 0.0:
        raise ValueError("closed loop is not stable")
    if t < 0.0:
        return 0.0

    def numerator(s: complex) -> complex:
        return c1 * s + c0 if include_reference_zero else complex(c0)

    if p1 == p2:
        # repeated root: Y(s) = N(s) / (s (s - p)^2)
        p = p1
        dnum = complex(c1) if include_reference_zero else complex(0.0)
        b_res = numerator(p) / p
        a_res = (dnum * p - numerator(p)) / (p * p)
        y = 1.0 + (a_res + b_res * t) * cmath.exp(p * t)
    else:
        r1 = numerator(p1) / (p1 * (p1 - p2))
        r2 = numerator(p2) / (p2 * (p2 - p1))
        y = 1.0 + r1 * cmath.exp(p1 * t) + r2 * cmath.exp(p2 * t)
    return y.real


def cltf_step_response(
    plant: DoubleIntegratorPlant,
    kp: float,
    kd: float,
    duration: float,
    dt: float,
    include_reference_zero: bool = False,
) -> tuple[list[float], list[float]]:
    """Sampled analytic step response (times, values) on [0, duration]."""
    if duration <= 0.0 or dt <= 0.0:
        raise ValueError("duration and dt must be positive")
    n = int(round(duration / dt))
    times = [k * dt for k in range(n + 1)]
    values = [
        step_response_value(plant, kp, kd, t, include_reference_zero) for t in times
    ]
    return times, values


def simulate_pd_step(
    plant: DoubleIntegratorPlant,
    kp: float,
    kd: float,
    duration: float,
    dt: float,
) -> tuple[list[float], list[float]]:
    """RK4 time-domain integration of the closed PD loop for a unit step.

    Integrates x'' = b (Kp (1 - x) - Kd x') from rest: the continuous loop
    with derivative on the measurement, cross-checkable against
    cltf_step_response.
    """
    if duration <= 0.0 or dt <= 0.0:
        raise ValueError("duration and dt must be positive")
    b = plant.b

    def deriv(x: float, v: float) -> tuple[float, float]:
        return v, b * (kp * (1.0 - x) - kd * v)

    n = int(round(duration / dt))
    times = [0.0]
    values = [0.0]
    x, v = 0.0, 0.0
    for k in range(n):
        k1x, k1v = deriv(x, v)
        k2x, k2v = deriv(x + 0.5 * dt * k1x, v + 0.5 * dt * k1v)
        k3x, k3v = deriv(x + 0.5 * dt * k2x, v + 0.5 * dt * k2v)
        k4x, k4v = deriv(x + dt * k3x, v + dt * k3v)
        x += dt * (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0
        v += dt * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
        times.append((k + 1) * dt)
        values.append(x)
    return times, values


