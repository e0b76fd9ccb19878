"""Wind disturbance: steady mean flow plus Ornstein-Uhlenbeck gusts.

The wind velocity is ``mean_speed * direction + gust`` where the gust is a
per-axis OU process (exact discretization, deterministic per seed). The
aerodynamic load is the quadratic drag law

    F = 1/2 rho (Cd A) |v| v          [N, world frame]

which reduces to 1/2 rho Cd A v^2 along the mean direction when gusts are
off. Direction is a world-frame unit vector; the default +x blows head-on
at the vehicle's zero-yaw nose.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace

KNOT = 0.514444  # m/s
AIR_DENSITY = 1.225  # kg/m^3, sea level


@dataclass(frozen=True)
class WindSpec:
    """Wind scenario parameters; speeds in knots to match the fan settings."""

    speed_knots: float = 0.0
    direction: tuple[float, float, float] = (1.0, 0.0, 0.0)
    gust_std: float = 0.0                # m/s, per-axis OU steady-state std
    gust_correlation_time: float = 1.0   # s
    drag_area: float = 0.02              # Cd * A, m^2
    rho: float = AIR_DENSITY

    def __post_init__(self) -> None:
        if self.speed_knots < 0.0 or self.gust_std < 0.0:
            raise ValueError("wind speed and gust std must be >= 0")
        if self.gust_correlation_time <= 0.0:
            raise ValueError("gust correlation time must be positive")
        n = math.sqrt(sum(c * c for c in self.direction))
        if abs(n - 1.0) > 1e-6:
            raise ValueError("wind direction must be a unit vector")

    def mean_speed(self) -> float:
        """Mean wind speed, m/s."""
        return self.speed_knots * KNOT


CALM = WindSpec()


def drag_force(
    spec: WindSpec, velocity: tuple[float, float, float]
) -> tuple[float, float, float]:
    """Quadratic drag load of a wind velocity vector (world frame, N)."""
    vx, vy, vz = velocity
    speed = math.sqrt(vx * vx + vy * vy + vz * vz)
    k = 0.5 * spec.rho * spec.drag_area * speed
    return (k * vx, k * vy, k * vz)


@dataclass(frozen=True)
class WindSample:
    """Instantaneous wind velocity (m/s), its magnitude, and drag force (N)."""

    velocity: tuple[float, float, float]
    speed: float
    force: tuple[float, float, float]


class WindField:
    """Stateful wind generator; identical (spec, seed) gives identical output."""

    def __init__(self, spec: WindSpec, seed: int = 0):
        self.spec = spec
        self._rng = random.Random(seed)
        self._gust = [0.0, 0.0, 0.0]

    def set_speed_knots(self, knots: float) -> None:
        """Change the mean wind speed; the gust state carries over."""
        self.spec = replace(self.spec, speed_knots=knots)

    def step(self, dt: float) -> WindSample:
        """Advance the gust process and return the current wind sample."""
        spec = self.spec
        a = math.exp(-dt / spec.gust_correlation_time)
        sigma = spec.gust_std * math.sqrt(max(0.0, 1.0 - a * a))
        for i in range(3):
            self._gust[i] = a * self._gust[i] + self._rng.gauss(0.0, sigma)
        mean = spec.mean_speed()
        v = tuple(mean * d + g for d, g in zip(spec.direction, self._gust))
        speed = math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
        return WindSample(velocity=v, speed=speed, force=drag_force(spec, v))
