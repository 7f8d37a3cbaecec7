"""Fixed-step closed-loop simulation of the full steering/target/vehicle system.

The composite state stacks, in order: wheel and column angles and rates (4),
target angle and rate (2), wheel-loop estimates (4), column-loop estimates (8),
vehicle pose and lateral states (5). One derivative evaluation follows a fixed
recipe (see step_ordering) so that reruns are bit-reproducible; integration is
classical fourth-order Runge-Kutta on a uniform grid.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .controller import (
    ControllerGains,
    ErrorBundle,
    adaptation_rates,
    column_attack_torque,
    column_regressor,
    tracking_errors,
    true_parameters,
    wheel_attack_torque,
    wheel_regressor,
)
from .steering import SteeringParams, SteeringState, reaction_torque, steering_accels
from .target import (
    TargetParams,
    TargetState,
    storage_value,
    target_accel,
    validate_profile,
)
from .vehicle import (
    DriverParams,
    Obstacle,
    VehicleParams,
    VehicleState,
    bicycle_derivatives,
    collision_check,
    driver_torque,
)

__all__ = [
    "N_STATES",
    "STATE_NAMES",
    "ScenarioConfig",
    "StepTorques",
    "TimeSeriesLog",
    "EnergyAudit",
    "Summary",
    "initial_state_vector",
    "step_ordering",
    "rk4",
    "rk4_step",
    "run_scenario",
    "energy_audit",
]

N_STATES = 23

STATE_NAMES = (
    "theta_sw", "theta_dot_sw", "theta_c", "theta_dot_c",
    "theta_d", "theta_dot_d",
    "phi_hat_sw_0", "phi_hat_sw_1", "phi_hat_sw_2", "phi_hat_sw_3",
    "phi_hat_c_0", "phi_hat_c_1", "phi_hat_c_2", "phi_hat_c_3",
    "phi_hat_c_4", "phi_hat_c_5", "phi_hat_c_6", "phi_hat_c_7",
    "veh_x", "veh_y", "veh_yaw", "veh_vy", "veh_yaw_rate",
)

_ZERO4 = np.zeros(4)
_ZERO8 = np.zeros(8)


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to run one scenario deterministically.

    mode selects only which impedance profile semantics the summary reports;
    the closed loop is the same architecture in both modes. initial_state maps
    state names (see STATE_NAMES) to initial values; unnamed states start at
    zero, except estimates which follow initial_estimates ("zero" or "true").
    """

    mode: str
    steering: SteeringParams = field(default_factory=SteeringParams)
    target: TargetParams = None  # required; no sensible default profile
    gains: ControllerGains = field(default_factory=ControllerGains)
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    driver: DriverParams = field(default_factory=DriverParams)
    obstacle: Obstacle = field(default_factory=lambda: Obstacle(88.0, 103.0, -1.5, 1.5))
    dt: float = 1.0e-3
    duration: float = 10.0
    log_stride: int = 1
    adaptation: bool = True
    initial_estimates: str = "zero"
    initial_state: Optional[dict] = None
    divergence_limit: float = 1.0e9

    def __post_init__(self) -> None:
        if self.mode not in ("nominal", "attack"):
            raise ValueError(f"mode must be 'nominal' or 'attack', got '{self.mode}'")
        if self.target is None:
            raise ValueError("scenario needs target parameters")
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ValueError("dt must be strictly positive")
        if not (self.duration > 0.0 and math.isfinite(self.duration)):
            raise ValueError("duration must be strictly positive")
        if self.duration < self.dt:
            raise ValueError("duration must cover at least one step")
        if not (isinstance(self.log_stride, int) and self.log_stride >= 1):
            raise ValueError("log_stride must be an integer >= 1")
        if self.initial_estimates not in ("zero", "true"):
            raise ValueError("initial_estimates must be 'zero' or 'true'")
        if self.initial_state is not None:
            for name in self.initial_state:
                if name not in STATE_NAMES:
                    raise ValueError(f"unknown initial state entry '{name}'")
        if not self.divergence_limit > 0.0:
            raise ValueError("divergence limit must be strictly positive")


def initial_state_vector(config: ScenarioConfig) -> np.ndarray:
    """Initial composite state: zeros, estimate policy, then explicit overrides."""
    y = np.zeros(N_STATES)
    if config.initial_estimates == "true":
        phi_sw, phi_c = true_parameters(config.steering)
        y[6:10] = phi_sw
        y[10:18] = phi_c
    if config.initial_state:
        for name, value in config.initial_state.items():
            y[STATE_NAMES.index(name)] = float(value)
    return y


@dataclass(frozen=True)
class StepTorques:
    """Instantaneous torques and regressors produced by one derivative evaluation."""

    tau_sw: float
    tau_c: float
    T_sw: float
    T_c: float
    theta_ddot_d: float
    Y_sw: np.ndarray
    Y_c: np.ndarray
    errors: ErrorBundle


def step_ordering(y: np.ndarray, t: float, config: ScenarioConfig):
    """Composite state derivative plus the torques behind it.

    Deterministic evaluation order at one instant:
      reaction torque, driver torque, target acceleration, tracking errors,
      wheel regressor, wheel control torque, column regressor (embedding that
      torque), column control torque, plant accelerations, adaptation rates,
      vehicle derivatives with road-wheel angle = theta_c / steering_ratio.
    """
    steering = SteeringState(y[0], y[1], y[2], y[3])
    target_state = TargetState(y[4], y[5])
    vehicle_state = VehicleState(y[18], y[19], y[20], y[21], y[22])

    tau_c = reaction_torque(steering.theta_c, config.steering)
    tau_sw = driver_torque(t, steering, config.driver)
    theta_ddot_d = target_accel(target_state, tau_sw, tau_c, t, config.target)
    errors = tracking_errors(target_state.theta_d, target_state.theta_dot_d, steering, config.gains)
    Y_sw = wheel_regressor(steering, tau_sw, theta_ddot_d, errors, config.gains)
    T_sw = wheel_attack_torque(errors, Y_sw, y[6:10], config.gains)
    Y_c = column_regressor(steering, tau_sw, tau_c, T_sw, errors, config.gains)
    T_c = column_attack_torque(errors, Y_c, y[10:18], config.gains)
    acc_sw, acc_c = steering_accels(steering, tau_sw, tau_c, T_sw, T_c, config.steering)
    if config.adaptation:
        rate_sw, rate_c = adaptation_rates(Y_sw, Y_c, errors, config.gains)
    else:
        rate_sw, rate_c = _ZERO4, _ZERO8
    road_wheel = steering.theta_c / config.vehicle.steering_ratio
    veh = bicycle_derivatives(vehicle_state, road_wheel, config.vehicle)

    dy = np.empty(N_STATES)
    dy[0] = steering.theta_dot_sw
    dy[1] = acc_sw
    dy[2] = steering.theta_dot_c
    dy[3] = acc_c
    dy[4] = target_state.theta_dot_d
    dy[5] = theta_ddot_d
    dy[6:10] = rate_sw
    dy[10:18] = rate_c
    dy[18:23] = veh
    return dy, StepTorques(tau_sw, tau_c, T_sw, T_c, theta_ddot_d, Y_sw, Y_c, errors)


def rk4(f: Callable[[float, np.ndarray], np.ndarray], t: float, y: np.ndarray, dt: float) -> np.ndarray:
    """One classical Runge-Kutta step of arbitrary f(t, y)."""
    k1 = f(t, y)
    k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = f(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_step(y: np.ndarray, t: float, dt: float, config: ScenarioConfig) -> np.ndarray:
    """Advance the composite state by one step of size dt."""
    if not dt > 0.0:
        raise ValueError("dt must be strictly positive")
    return rk4(lambda tt, yy: step_ordering(yy, tt, config)[0], t, y, dt)


@dataclass(frozen=True)
class TimeSeriesLog:
    """Uniform-stride samples of the run: composite states, torques, audit channels."""

    t: np.ndarray
    states: np.ndarray          # (n, 23), columns ordered as STATE_NAMES
    tau_sw: np.ndarray
    tau_c: np.ndarray
    T_sw: np.ndarray
    T_c: np.ndarray
    theta_ddot_d: np.ndarray
    storage: np.ndarray
    supplied_power: np.ndarray

    def __len__(self) -> int:
        return self.t.size

    def column(self, name: str) -> np.ndarray:
        """Any logged channel by its CSV column name."""
        if name == "t":
            return self.t
        if name in STATE_NAMES:
            return self.states[:, STATE_NAMES.index(name)]
        try:
            return getattr(self, name)
        except AttributeError:
            raise KeyError(f"no logged channel named '{name}'") from None

    def wheel_error(self) -> np.ndarray:
        """Target-minus-wheel tracking error e_sw over the log."""
        return self.states[:, 4] - self.states[:, 0]

    def column_error(self) -> np.ndarray:
        """Wheel-minus-column tracking error e_c over the log."""
        return self.states[:, 0] - self.states[:, 2]


@dataclass(frozen=True)
class Summary:
    """Scalar outcome of a run, JSON-ready via as_dict()."""

    mode: str
    dt: float
    duration: float
    collision: bool
    collision_time: Optional[float]
    max_abs_wheel_error: float
    max_abs_wheel_rate: float
    final_phi_hat_sw: tuple
    final_phi_hat_c: tuple
    energy_verdict: str
    energy_peak_margin: float
    diverged: bool
    divergence_time: Optional[float]
    profile_accepted: Optional[bool]

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "dt": self.dt,
            "duration": self.duration,
            "collision": self.collision,
            "collision_time": self.collision_time,
            "max_abs_wheel_error": self.max_abs_wheel_error,
            "max_abs_wheel_rate": self.max_abs_wheel_rate,
            "final_phi_hat_sw": list(self.final_phi_hat_sw),
            "final_phi_hat_c": list(self.final_phi_hat_c),
            "energy_verdict": self.energy_verdict,
            "energy_peak_margin": self.energy_peak_margin,
            "diverged": self.diverged,
            "divergence_time": self.divergence_time,
            "profile_accepted": self.profile_accepted,
        }


@dataclass(frozen=True)
class EnergyAudit:
    """Supplied-energy integral versus storage along a logged run.

    margin(t) = storage(t) - storage(0) - E_supplied(t); a positive peak
    beyond the tolerance means the target returned more energy than it was
    fed, i.e. the profile acted as a source.
    """

    supplied_energy: np.ndarray
    storage: np.ndarray
    margin: np.ndarray
    peak_margin: float
    verdict: str


def energy_audit(log: TimeSeriesLog, tolerance: float = 1.0e-9) -> EnergyAudit:
    """Trapezoidal supplied-energy integral and generation margin for a log."""
    if len(log) == 0:
        raise ValueError("cannot audit an empty log")
    p = log.supplied_power
    t = log.t
    supplied = np.zeros_like(p)
    if len(log) > 1:
        supplied[1:] = np.cumsum(0.5 * (p[1:] + p[:-1]) * np.diff(t))
    margin = log.storage - log.storage[0] - supplied
    peak = float(margin.max())
    verdict = "non-passive" if peak > tolerance else "passive"
    return EnergyAudit(
        supplied_energy=supplied,
        storage=log.storage,
        margin=margin,
        peak_margin=peak,
        verdict=verdict,
    )


def run_scenario(config: ScenarioConfig) -> tuple[TimeSeriesLog, Summary]:
    """Integrate the scenario on its uniform grid and assemble log plus summary.

    Attack-mode profiles are screened with validate_profile over the run
    duration first; a rejected profile produces a warning and a flag in the
    summary, not an abort. If any state magnitude reaches the divergence
    limit (or goes non-finite) the run stops there and the partial log is
    returned with diverged=True.
    """
    lo, hi = config.target.profile.horizon()
    if lo > 0.0 or hi < config.duration:
        raise ValueError("impedance profile horizon does not cover the run duration")

    profile_accepted: Optional[bool] = None
    if config.mode == "attack":
        report = validate_profile(config.target, horizon=config.duration)
        profile_accepted = report.accepted
        if not report.accepted:
            warnings.warn(
                "attack profile rejected: "
                f"{report.violated_condition} violated at t={report.first_violation_time}",
                RuntimeWarning,
                stacklevel=2,
            )

    n_steps = int(round(config.duration / config.dt))
    y = initial_state_vector(config)

    rows_t: list[float] = []
    rows_y: list[np.ndarray] = []
    rows_torque: list[tuple] = []
    collision = False
    collision_time: Optional[float] = None
    diverged = False
    divergence_time: Optional[float] = None

    def log_row(t: float, yy: np.ndarray) -> None:
        _, torques = step_ordering(yy, t, config)
        target_state = TargetState(yy[4], yy[5])
        V = storage_value(target_state, t, config.target, strict=False)
        u = config.target.alpha_T_sw * torques.tau_sw + config.target.alpha_T_c * torques.tau_c
        rows_t.append(t)
        rows_y.append(yy.copy())
        rows_torque.append((torques.tau_sw, torques.tau_c, torques.T_sw, torques.T_c,
                            torques.theta_ddot_d, V, yy[5] * u))

    if collision_check(VehicleState(y[18], y[19], y[20], y[21], y[22]), config.obstacle):
        collision = True
        collision_time = 0.0
    log_row(0.0, y)

    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(n_steps):
            t = i * config.dt
            t_next = (i + 1) * config.dt
            try:
                y_next = rk4_step(y, t, config.dt, config)
            except (ValueError, OverflowError):
                diverged = True
                divergence_time = t_next
                break
            if not np.all(np.isfinite(y_next)) or np.any(np.abs(y_next) >= config.divergence_limit):
                diverged = True
                divergence_time = t_next
                break
            y = y_next
            if not collision and collision_check(
                VehicleState(y[18], y[19], y[20], y[21], y[22]), config.obstacle
            ):
                collision = True
                collision_time = t_next
            if (i + 1) % config.log_stride == 0:
                log_row(t_next, y)

    t_arr = np.array(rows_t)
    states = np.vstack(rows_y)
    torque_arr = np.array(rows_torque)
    log = TimeSeriesLog(
        t=t_arr,
        states=states,
        tau_sw=torque_arr[:, 0],
        tau_c=torque_arr[:, 1],
        T_sw=torque_arr[:, 2],
        T_c=torque_arr[:, 3],
        theta_ddot_d=torque_arr[:, 4],
        storage=torque_arr[:, 5],
        supplied_power=torque_arr[:, 6],
    )
    audit = energy_audit(log)
    wheel_err = log.wheel_error()
    summary = Summary(
        mode=config.mode,
        dt=config.dt,
        duration=config.duration,
        collision=collision,
        collision_time=collision_time,
        max_abs_wheel_error=float(np.abs(wheel_err).max()),
        max_abs_wheel_rate=float(np.abs(states[:, 1]).max()),
        final_phi_hat_sw=tuple(states[-1, 6:10]),
        final_phi_hat_c=tuple(states[-1, 10:18]),
        energy_verdict=audit.verdict,
        energy_peak_margin=audit.peak_margin,
        diverged=diverged,
        divergence_time=divergence_time,
        profile_accepted=profile_accepted,
    )
    return log, summary
