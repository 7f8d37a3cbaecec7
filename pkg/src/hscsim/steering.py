"""Two-inertia steering plant: driver wheel and steering column with linear friction.

Each inertia obeys  I * theta_ddot + B * theta_dot + K * theta = scaled torques,
with the wheel driven by the human torque plus the wheel-side assist torque and
the column driven by the rack reaction torque plus the column-side assist torque.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SteeringParams",
    "SteeringState",
    "eval_friction",
    "friction_regressor",
    "reaction_torque",
    "steering_accels",
]


@dataclass(frozen=True)
class SteeringParams:
    """Physical constants of the wheel/column pair. SI units, angles in radians.

    Stiffnesses may legitimately be zero: the stock plant has no restoring
    spring on either inertia.
    """

    I_sw: float = 1.16e-2   # wheel inertia [kg m^2]
    I_c: float = 2.35e-2    # column inertia [kg m^2]
    B_sw: float = 1.9e-2    # wheel damping [kg m^2/s]
    B_c: float = 6.0e-2     # column damping [kg m^2/s]
    K_sw: float = 0.0       # wheel stiffness [N m/rad]
    K_c: float = 0.0        # column stiffness [N m/rad]
    alpha_sw: float = 1.0   # driver-torque scaling
    alpha_c: float = 1.0    # reaction-torque scaling
    gamma: float = 0.02     # reaction shape [1/rad]
    C_d: float = 150.0      # reaction magnitude [N m]

    def __post_init__(self) -> None:
        if not (self.I_sw > 0.0 and self.I_c > 0.0):
            raise ValueError("inertias I_sw, I_c must be strictly positive")
        if not (self.alpha_sw > 0.0 and self.alpha_c > 0.0):
            raise ValueError("torque scalings alpha_sw, alpha_c must be strictly positive")
        if min(self.B_sw, self.B_c, self.K_sw, self.K_c) < 0.0:
            raise ValueError("dampings and stiffnesses must be non-negative")
        if not (self.gamma > 0.0 and self.C_d > 0.0):
            raise ValueError("reaction parameters gamma, C_d must be strictly positive")


@dataclass(frozen=True)
class SteeringState:
    """Angles [rad] and rates [rad/s] of the wheel and column inertias."""

    theta_sw: float = 0.0
    theta_dot_sw: float = 0.0
    theta_c: float = 0.0
    theta_dot_c: float = 0.0


def eval_friction(theta: float, theta_dot: float, B: float, K: float) -> float:
    """Damping-plus-stiffness torque B*theta_dot + K*theta for one inertia."""
    return B * theta_dot + K * theta


def friction_regressor(theta: float, theta_dot: float) -> np.ndarray:
    """Row [theta, theta_dot] such that row @ [K, B] reproduces eval_friction exactly.

    The friction torque is linear in (K, B), so the regressor times the stacked
    parameter vector is an identity, not an approximation.
    """
    return np.array([theta, theta_dot])


def reaction_torque(theta_c: float, params: SteeringParams) -> float:
    """Rack reaction torque on the column: -C_d * tanh(gamma * theta_c).

    Odd in theta_c and saturates at +/- C_d for large angles.
    """
    return -params.C_d * math.tanh(params.gamma * theta_c)


def steering_accels(
    state: SteeringState,
    tau_sw: float,
    tau_c: float,
    T_sw: float,
    T_c: float,
    params: SteeringParams,
) -> tuple[float, float]:
    """Angular accelerations of (wheel, column) given the four applied torques.

    tau_sw is the driver torque, tau_c the rack reaction torque, T_sw and T_c
    the control torques on the two inertias. Rejects non-finite inputs so a
    blowup upstream fails loudly instead of silently propagating NaNs.
    """
    values = (
        state.theta_sw, state.theta_dot_sw, state.theta_c, state.theta_dot_c,
        tau_sw, tau_c, T_sw, T_c,
    )
    for v in values:
        if not math.isfinite(v):
            raise ValueError("non-finite input to steering_accels")
    N_sw = eval_friction(state.theta_sw, state.theta_dot_sw, params.B_sw, params.K_sw)
    N_c = eval_friction(state.theta_c, state.theta_dot_c, params.B_c, params.K_c)
    acc_sw = (params.alpha_sw * tau_sw + T_sw - N_sw) / params.I_sw
    acc_c = (params.alpha_c * tau_c + T_c - N_c) / params.I_c
    return acc_sw, acc_c
