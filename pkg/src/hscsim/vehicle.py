"""Planar vehicle behind the steering column: saturating-tire bicycle model,
PD driver with a lane-change reference, and an obstacle collision check.

The lateral states are (v_y, yaw rate) at constant longitudinal speed; global
pose (x, y, yaw) is integrated alongside so the path can be checked against
an obstacle rectangle. The road-wheel angle is the column angle divided by
the steering ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .steering import SteeringState

__all__ = [
    "VehicleParams",
    "VehicleState",
    "Obstacle",
    "LaneChangeSchedule",
    "DriverParams",
    "tire_lateral_force",
    "bicycle_derivatives",
    "driver_torque",
    "collision_check",
]


@dataclass(frozen=True)
class VehicleParams:
    mass: float = 1500.0              # [kg]
    yaw_inertia: float = 2250.0       # [kg m^2]
    dist_front: float = 1.2           # CG to front axle [m]
    dist_rear: float = 1.3            # CG to rear axle [m]
    cornering_front: float = 8.0e4    # front cornering stiffness [N/rad]
    cornering_rear: float = 8.0e4     # rear cornering stiffness [N/rad]
    tire_peak: float = 8.0e3          # lateral force saturation [N]
    speed: float = 15.0               # longitudinal speed [m/s], constant
    steering_ratio: float = 16.0      # column angle per road-wheel angle

    def __post_init__(self) -> None:
        for name in ("mass", "yaw_inertia", "dist_front", "dist_rear",
                     "cornering_front", "cornering_rear", "tire_peak",
                     "speed", "steering_ratio"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"vehicle parameter {name} must be strictly positive")

    @property
    def wheelbase(self) -> float:
        return self.dist_front + self.dist_rear


@dataclass(frozen=True)
class VehicleState:
    x: float = 0.0          # global position [m]
    y: float = 0.0
    yaw: float = 0.0        # heading [rad]
    v_y: float = 0.0        # body-frame lateral speed [m/s]
    yaw_rate: float = 0.0   # [rad/s]


@dataclass(frozen=True)
class Obstacle:
    """Axis-aligned open rectangle; points on the boundary do not collide."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self) -> None:
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("obstacle rectangle must have positive extent")


@dataclass(frozen=True)
class LaneChangeSchedule:
    """Reference wheel angle: one full sine lobe out, a hold, one lobe back.

    Each lobe is a full sine period, so the vehicle changes lane and
    straightens; the mirrored lobe returns it. Zero outside the lobes, which
    keeps the system exactly at rest until `start`.
    """

    amplitude: float = 0.8       # wheel angle amplitude [rad]
    start: float = 3.5           # [s]
    lobe_duration: float = 2.5   # [s]
    hold: float = 1.5            # [s] between the out and back lobes

    def __post_init__(self) -> None:
        if self.lobe_duration <= 0.0 or self.hold < 0.0 or self.start < 0.0:
            raise ValueError("lane-change schedule times must be non-negative, lobe positive")

    def angle(self, t: float) -> float:
        t_out = t - self.start
        if 0.0 <= t_out < self.lobe_duration:
            return self.amplitude * math.sin(2.0 * math.pi * t_out / self.lobe_duration)
        t_back = t_out - self.lobe_duration - self.hold
        if 0.0 <= t_back < self.lobe_duration:
            return -self.amplitude * math.sin(2.0 * math.pi * t_back / self.lobe_duration)
        return 0.0


@dataclass(frozen=True)
class DriverParams:
    """PD wheel-torque driver tracking a reference schedule, with saturation."""

    kp: float = 1.0            # [N m/rad]
    kd: float = 0.1            # [N m s/rad]
    saturation: float = 20.0   # [N m]
    reference: LaneChangeSchedule = field(default_factory=LaneChangeSchedule)

    def __post_init__(self) -> None:
        if self.kp < 0.0 or self.kd < 0.0:
            raise ValueError("driver gains must be non-negative")
        if not self.saturation > 0.0:
            raise ValueError("driver torque saturation must be strictly positive")


def tire_lateral_force(slip_angle: float, cornering_stiffness: float, peak: float) -> float:
    """Saturating lateral tire force peak * tanh(C * slip / peak).

    Linear with slope C for small slip, bounded by +/- peak. Odd in slip.
    """
    return peak * math.tanh(cornering_stiffness * slip_angle / peak)


def bicycle_derivatives(
    state: VehicleState, road_wheel_angle: float, params: VehicleParams
) -> np.ndarray:
    """State derivative (dx, dy, dyaw, dv_y, dyaw_rate) of the lateral model.

    Slip angles use the small-angle kinematic form; the front force acts along
    the body lateral axis (small road-wheel angles). Longitudinal speed is
    held constant and must be positive.
    """
    v_x = params.speed
    if not v_x > 0.0:
        raise ValueError("longitudinal speed must be strictly positive")
    slip_front = road_wheel_angle - (state.v_y + params.dist_front * state.yaw_rate) / v_x
    slip_rear = -(state.v_y - params.dist_rear * state.yaw_rate) / v_x
    force_front = tire_lateral_force(slip_front, params.cornering_front, params.tire_peak)
    force_rear = tire_lateral_force(slip_rear, params.cornering_rear, params.tire_peak)

    dv_y = (force_front + force_rear) / params.mass - v_x * state.yaw_rate
    dyaw_rate = (params.dist_front * force_front - params.dist_rear * force_rear) / params.yaw_inertia
    dx = v_x * math.cos(state.yaw) - state.v_y * math.sin(state.yaw)
    dy = v_x * math.sin(state.yaw) + state.v_y * math.cos(state.yaw)
    return np.array([dx, dy, state.yaw_rate, dv_y, dyaw_rate])


def driver_torque(t: float, steering: SteeringState, driver: DriverParams) -> float:
    """Saturated PD torque steering the wheel toward the reference angle."""
    ref = driver.reference.angle(t)
    raw = driver.kp * (ref - steering.theta_sw) - driver.kd * steering.theta_dot_sw
    if raw > driver.saturation:
        return driver.saturation
    if raw < -driver.saturation:
        return -driver.saturation
    return raw


def collision_check(state: VehicleState, obstacle: Obstacle) -> bool:
    """True when the vehicle reference point lies strictly inside the rectangle."""
    return (
        obstacle.x_min < state.x < obstacle.x_max
        and obstacle.y_min < state.y < obstacle.y_max
    )
