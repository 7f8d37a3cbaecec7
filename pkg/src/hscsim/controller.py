"""Adaptive torque policy driving both steering inertias toward the target state.

Filtered tracking errors r = e_dot + mu*e feed gradient parameter estimators,
one 4-vector for the wheel loop and one 8-vector for the column loop. With
exact parameter knowledge the policy reduces each loop to I * r_dot = -k * r,
so r decays exponentially with time constant I/k regardless of the driver and
reaction torques; the unit tests pin that cancellation down symbolically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .steering import SteeringParams, SteeringState

__all__ = [
    "ControllerGains",
    "AdaptiveState",
    "ErrorBundle",
    "tracking_errors",
    "wheel_regressor",
    "column_regressor",
    "regression_rows",
    "true_parameters",
    "adaptation_rates",
    "wheel_attack_torque",
    "column_attack_torque",
    "attack_torques",
]


def _default_gamma(n: int) -> np.ndarray:
    return np.full(n, 80.0)


@dataclass(frozen=True)
class ControllerGains:
    """Error-filter slopes mu, feedback gains k, and diagonal adaptation gains.

    gamma_sw and gamma_c hold the diagonals of the 4x4 and 8x8 adaptation
    gain matrices; all entries must be strictly positive.
    """

    mu_sw: float = 1.01
    mu_c: float = 1.01
    k_sw: float = 1.0
    k_c: float = 1.0
    gamma_sw: np.ndarray = field(default_factory=lambda: _default_gamma(4))
    gamma_c: np.ndarray = field(default_factory=lambda: _default_gamma(8))

    def __post_init__(self) -> None:
        object.__setattr__(self, "gamma_sw", np.asarray(self.gamma_sw, dtype=float))
        object.__setattr__(self, "gamma_c", np.asarray(self.gamma_c, dtype=float))
        if self.gamma_sw.shape != (4,) or self.gamma_c.shape != (8,):
            raise ValueError("gamma_sw must have 4 diagonal entries and gamma_c 8")
        if not (np.all(self.gamma_sw > 0.0) and np.all(self.gamma_c > 0.0)):
            raise ValueError("adaptation gains must be strictly positive")
        if min(self.mu_sw, self.mu_c, self.k_sw, self.k_c) <= 0.0:
            raise ValueError("mu and k gains must be strictly positive")

    @classmethod
    def uniform(cls, mu: float = 1.01, k: float = 1.0, gamma: float = 80.0) -> "ControllerGains":
        return cls(mu_sw=mu, mu_c=mu, k_sw=k, k_c=k,
                   gamma_sw=np.full(4, float(gamma)), gamma_c=np.full(8, float(gamma)))


@dataclass(frozen=True)
class AdaptiveState:
    """Current parameter estimates of the two loops."""

    phi_hat_sw: np.ndarray
    phi_hat_c: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "phi_hat_sw", np.asarray(self.phi_hat_sw, dtype=float))
        object.__setattr__(self, "phi_hat_c", np.asarray(self.phi_hat_c, dtype=float))
        if self.phi_hat_sw.shape != (4,) or self.phi_hat_c.shape != (8,):
            raise ValueError("estimates must have shapes (4,) and (8,)")

    @classmethod
    def zeros(cls) -> "AdaptiveState":
        return cls(np.zeros(4), np.zeros(8))

    @classmethod
    def from_truth(cls, params: SteeringParams) -> "AdaptiveState":
        phi_sw, phi_c = true_parameters(params)
        return cls(phi_sw, phi_c)


@dataclass(frozen=True)
class ErrorBundle:
    """Tracking errors, their rates, and the filtered errors r = e_dot + mu*e.

    e_sw = theta_d - theta_sw chains the wheel to the target; e_c = theta_sw -
    theta_c chains the column to the wheel.
    """

    e_sw: float
    e_c: float
    e_dot_sw: float
    e_dot_c: float
    r_sw: float
    r_c: float


def tracking_errors(
    theta_d: float, theta_dot_d: float, steering: SteeringState, gains: ControllerGains
) -> ErrorBundle:
    """Build the error bundle for the current target and plant states."""
    e_sw = theta_d - steering.theta_sw
    e_dot_sw = theta_dot_d - steering.theta_dot_sw
    e_c = steering.theta_sw - steering.theta_c
    e_dot_c = steering.theta_dot_sw - steering.theta_dot_c
    return ErrorBundle(
        e_sw=e_sw,
        e_c=e_c,
        e_dot_sw=e_dot_sw,
        e_dot_c=e_dot_c,
        r_sw=e_dot_sw + gains.mu_sw * e_sw,
        r_c=e_dot_c + gains.mu_c * e_c,
    )


def wheel_regressor(
    steering: SteeringState,
    tau_sw: float,
    theta_ddot_d: float,
    errors: ErrorBundle,
    gains: ControllerGains,
) -> np.ndarray:
    """Wheel-loop regressor row, paired with [K_sw, B_sw, alpha_sw, I_sw].

    theta_ddot_d must be the instantaneous target acceleration (from
    target_accel), never a numerical difference of logged rates.
    """
    return np.array([
        steering.theta_sw,
        steering.theta_dot_sw,
        -tau_sw,
        theta_ddot_d + gains.mu_sw * errors.e_dot_sw,
    ])


def column_regressor(
    steering: SteeringState,
    tau_sw: float,
    tau_c: float,
    T_sw: float,
    errors: ErrorBundle,
    gains: ControllerGains,
) -> np.ndarray:
    """Column-loop regressor row.

    Pairs with the stacked vector
      [(I_c/I_sw)*K_sw, (I_c/I_sw)*B_sw, (I_c/I_sw)*alpha_sw, I_c/I_sw,
       K_c, B_c, alpha_c, I_c],
    which eliminates the wheel acceleration through the wheel plant relation,
    so the row needs the wheel control torque T_sw computed at this instant.
    """
    return np.array([
        -steering.theta_sw,
        -steering.theta_dot_sw,
        tau_sw,
        T_sw,
        steering.theta_c,
        steering.theta_dot_c,
        -tau_c,
        gains.mu_c * errors.e_dot_c,
    ])


def regression_rows(
    steering: SteeringState,
    tau_sw: float,
    tau_c: float,
    T_sw: float,
    theta_ddot_d: float,
    errors: ErrorBundle,
    gains: ControllerGains,
) -> tuple[np.ndarray, np.ndarray]:
    """Both regressor rows; T_sw must already be the current wheel control torque."""
    Y_sw = wheel_regressor(steering, tau_sw, theta_ddot_d, errors, gains)
    Y_c = column_regressor(steering, tau_sw, tau_c, T_sw, errors, gains)
    return Y_sw, Y_c


def true_parameters(params: SteeringParams) -> tuple[np.ndarray, np.ndarray]:
    """Exact parameter vectors the estimators converge toward."""
    ratio = params.I_c / params.I_sw
    phi_sw = np.array([params.K_sw, params.B_sw, params.alpha_sw, params.I_sw])
    phi_c = np.array([
        ratio * params.K_sw,
        ratio * params.B_sw,
        ratio * params.alpha_sw,
        ratio,
        params.K_c,
        params.B_c,
        params.alpha_c,
        params.I_c,
    ])
    return phi_sw, phi_c


def adaptation_rates(
    Y_sw: np.ndarray, Y_c: np.ndarray, errors: ErrorBundle, gains: ControllerGains
) -> tuple[np.ndarray, np.ndarray]:
    """Gradient update rates Gamma * Y^T * r for both estimate vectors."""
    return gains.gamma_sw * Y_sw * errors.r_sw, gains.gamma_c * Y_c * errors.r_c


def wheel_attack_torque(
    errors: ErrorBundle, Y_sw: np.ndarray, phi_hat_sw: np.ndarray, gains: ControllerGains
) -> float:
    return gains.k_sw * errors.r_sw + float(Y_sw @ phi_hat_sw)


def column_attack_torque(
    errors: ErrorBundle, Y_c: np.ndarray, phi_hat_c: np.ndarray, gains: ControllerGains
) -> float:
    return gains.k_c * errors.r_c + float(Y_c @ phi_hat_c)


def attack_torques(
    errors: ErrorBundle,
    Y_sw: np.ndarray,
    Y_c: np.ndarray,
    adaptive: AdaptiveState,
    gains: ControllerGains,
) -> tuple[float, float]:
    """Control torques (T_sw, T_c) = (k*r + Y @ phi_hat) for both loops.

    Evaluation order matters: T_sw depends only on Y_sw, while Y_c embeds
    T_sw, so callers must build Y_sw, compute T_sw, build Y_c with it, and
    only then compute T_c. The simulation engine does exactly that.
    """
    T_sw = wheel_attack_torque(errors, Y_sw, adaptive.phi_hat_sw, gains)
    T_c = column_attack_torque(errors, Y_c, adaptive.phi_hat_c, gains)
    return T_sw, T_c
