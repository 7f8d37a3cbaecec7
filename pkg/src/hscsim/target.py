"""Reference-impedance target dynamics and passivity screening.

The haptic controller steers both plant inertias toward a virtual target state
theta_d generated by

    I_T * theta_ddot_d + B_T(t) * theta_dot_d + K_T(t) * theta_d = u,
    u = alpha_T_sw * tau_sw + alpha_T_c * tau_c.

A constant, sufficiently damped profile (K_T, B_T) gives the stock assistive
behaviour. A time-varying profile can instead be chosen so that the target
generates energy; this module provides the storage function used to certify
that, and a validator for the inequality chain an energy-generating profile
must satisfy:

    (a) alpha * I_T - B_T(t) > 0                        "damping_bound"
    (b) K_T_dot/2 + alpha*B_T_dot/2 - alpha*K_T(t) > 0  "growth_bound"
    (c) beta(t) = K_T + alpha*B_T - alpha^2*I_T >= 0    "beta_nonneg"

Conditions (a) and (b) force the two quadratic coefficients of the storage
rate positive; (c) keeps the storage function positive semidefinite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = [
    "PROFILE_KINDS",
    "VIOLATION_CODES",
    "BetaNegativeError",
    "ProfileTable",
    "ImpedanceProfile",
    "TargetParams",
    "TargetState",
    "ValidationReport",
    "eval_profile",
    "target_accel",
    "storage_weight",
    "storage_value",
    "storage_rate",
    "kappa",
    "gronwall_bound",
    "validate_profile",
    "suggest_alpha",
]

PROFILE_KINDS = ("constant", "exponential", "sampled")

# Order doubles as the tie-break priority when several conditions fail at the
# same earliest sample.
VIOLATION_CODES = ("damping_bound", "growth_bound", "beta_nonneg")

# Tolerance of the sampled-profile derivative consistency check, relative with
# an absolute floor of the same size so zero-derivative channels are checkable.
_TABLE_DERIV_TOL = 1e-6


class BetaNegativeError(ValueError):
    """Storage weight beta(t) went negative, so the storage value is undefined."""


@dataclass(frozen=True)
class ProfileTable:
    """Uniform or non-uniform samples of a piecewise-linear impedance profile.

    Values are interpolated linearly between nodes. The supplied derivative
    channels must be consistent with central differences of the value channels
    at interior nodes to within 1e-6 (relative, floored), which is what makes
    the storage-rate formulas meaningful for this kind.
    """

    t: np.ndarray
    stiffness: np.ndarray
    damping: np.ndarray
    stiffness_rate: np.ndarray
    damping_rate: np.ndarray

    def __post_init__(self) -> None:
        arrays = {
            "t": np.asarray(self.t, dtype=float),
            "stiffness": np.asarray(self.stiffness, dtype=float),
            "damping": np.asarray(self.damping, dtype=float),
            "stiffness_rate": np.asarray(self.stiffness_rate, dtype=float),
            "damping_rate": np.asarray(self.damping_rate, dtype=float),
        }
        for name, arr in arrays.items():
            object.__setattr__(self, name, arr)
            if arr.ndim != 1 or arr.size != arrays["t"].size:
                raise ValueError("profile table channels must be 1-d and equally long")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"profile table channel '{name}' has non-finite entries")
        if arrays["t"].size < 3:
            raise ValueError("profile table needs at least 3 samples")
        if not np.all(np.diff(arrays["t"]) > 0.0):
            raise ValueError("profile table times must be strictly increasing")
        self._check_derivatives("stiffness", self.stiffness, self.stiffness_rate)
        self._check_derivatives("damping", self.damping, self.damping_rate)

    def _check_derivatives(self, name: str, values: np.ndarray, rates: np.ndarray) -> None:
        cd = (values[2:] - values[:-2]) / (self.t[2:] - self.t[:-2])
        err = np.abs(cd - rates[1:-1])
        tol = _TABLE_DERIV_TOL * (1.0 + np.abs(rates[1:-1]))
        if np.any(err > tol):
            i = int(np.argmax(err - tol)) + 1
            raise ValueError(
                f"profile table '{name}' rate at t={self.t[i]:g} is inconsistent with "
                f"central difference of the values (|{rates[i]:g} - {cd[i - 1]:g}| > tol)"
            )


@dataclass(frozen=True)
class ImpedanceProfile:
    """Time course of the target stiffness K_T(t) and damping B_T(t).

    kinds:
      constant     K_T = K0, B_T = B0
      exponential  K_T = K0 * exp(growth_rate * t), B_T = B0
      sampled      piecewise-linear interpolation of a ProfileTable
    """

    kind: str
    K0: float = 0.0
    B0: float = 0.0
    growth_rate: float = 0.0
    table: Optional[ProfileTable] = None

    def __post_init__(self) -> None:
        if self.kind not in PROFILE_KINDS:
            raise ValueError(f"unknown profile kind '{self.kind}', expected one of {PROFILE_KINDS}")
        if self.kind == "sampled":
            if self.table is None:
                raise ValueError("sampled profile requires a table")
        else:
            if self.table is not None:
                raise ValueError(f"{self.kind} profile does not take a table")
            if not (math.isfinite(self.K0) and math.isfinite(self.B0)):
                raise ValueError("profile constants must be finite")
        if self.kind == "exponential" and not math.isfinite(self.growth_rate):
            raise ValueError("exponential profile needs a finite growth_rate")

    @classmethod
    def constant(cls, K0: float, B0: float) -> "ImpedanceProfile":
        return cls(kind="constant", K0=K0, B0=B0)

    @classmethod
    def exponential(cls, K0: float, B0: float, growth_rate: float) -> "ImpedanceProfile":
        return cls(kind="exponential", K0=K0, B0=B0, growth_rate=growth_rate)

    @classmethod
    def sampled(cls, t, stiffness, damping, stiffness_rate, damping_rate) -> "ImpedanceProfile":
        table = ProfileTable(t, stiffness, damping, stiffness_rate, damping_rate)
        return cls(kind="sampled", table=table)

    def horizon(self) -> tuple[float, float]:
        """Time interval on which the profile is defined."""
        if self.kind == "sampled":
            return float(self.table.t[0]), float(self.table.t[-1])
        return -math.inf, math.inf


def eval_profile(profile: ImpedanceProfile, t: float) -> tuple[float, float, float, float]:
    """(K_T, B_T, K_T_dot, B_T_dot) at time t.

    Closed-form kinds return exact derivatives; the sampled kind interpolates
    all four channels linearly and refuses t outside the tabulated horizon.
    """
    if profile.kind == "constant":
        return profile.K0, profile.B0, 0.0, 0.0
    if profile.kind == "exponential":
        K = profile.K0 * math.exp(profile.growth_rate * t)
        return K, profile.B0, profile.growth_rate * K, 0.0
    table = profile.table
    if t < table.t[0] or t > table.t[-1]:
        raise ValueError(
            f"t={t:g} is outside the sampled profile horizon "
            f"[{table.t[0]:g}, {table.t[-1]:g}]"
        )
    K = float(np.interp(t, table.t, table.stiffness))
    B = float(np.interp(t, table.t, table.damping))
    K_dot = float(np.interp(t, table.t, table.stiffness_rate))
    B_dot = float(np.interp(t, table.t, table.damping_rate))
    return K, B, K_dot, B_dot


def _profile_arrays(profile: ImpedanceProfile, ts: np.ndarray):
    """Vectorized eval_profile over a time grid (same formulas)."""
    if profile.kind == "constant":
        ones = np.ones_like(ts)
        return profile.K0 * ones, profile.B0 * ones, 0.0 * ones, 0.0 * ones
    if profile.kind == "exponential":
        K = profile.K0 * np.exp(profile.growth_rate * ts)
        ones = np.ones_like(ts)
        return K, profile.B0 * ones, profile.growth_rate * K, 0.0 * ones
    table = profile.table
    if ts[0] < table.t[0] or ts[-1] > table.t[-1]:
        raise ValueError("requested grid extends outside the sampled profile horizon")
    return (
        np.interp(ts, table.t, table.stiffness),
        np.interp(ts, table.t, table.damping),
        np.interp(ts, table.t, table.stiffness_rate),
        np.interp(ts, table.t, table.damping_rate),
    )


@dataclass(frozen=True)
class TargetParams:
    """Target inertia, storage rate alpha, torque weights and impedance profile."""

    profile: ImpedanceProfile
    I_T: float = 1.0e-2       # target inertia [kg m^2]
    alpha: float = 0.5        # storage mixing rate [1/s]
    alpha_T_sw: float = 1.0   # driver-torque weight
    alpha_T_c: float = 0.15   # reaction-torque weight

    def __post_init__(self) -> None:
        if not self.I_T > 0.0:
            raise ValueError("target inertia I_T must be strictly positive")
        if not self.alpha > 0.0:
            raise ValueError("storage rate alpha must be strictly positive")
        if self.alpha_T_sw < 0.0 or self.alpha_T_c < 0.0:
            raise ValueError("torque weights must be non-negative")


@dataclass(frozen=True)
class TargetState:
    """Target angle [rad] and rate [rad/s]."""

    theta_d: float = 0.0
    theta_dot_d: float = 0.0


def _weighted_torque(tau_sw: float, tau_c: float, params: TargetParams) -> float:
    return params.alpha_T_sw * tau_sw + params.alpha_T_c * tau_c


def target_accel(
    state: TargetState, tau_sw: float, tau_c: float, t: float, params: TargetParams
) -> float:
    """Target angular acceleration from the impedance law at time t."""
    for v in (state.theta_d, state.theta_dot_d, tau_sw, tau_c, t):
        if not math.isfinite(v):
            raise ValueError("non-finite input to target_accel")
    K, B, _, _ = eval_profile(params.profile, t)
    u = _weighted_torque(tau_sw, tau_c, params)
    return (u - B * state.theta_dot_d - K * state.theta_d) / params.I_T


def storage_weight(t: float, params: TargetParams) -> float:
    """beta(t) = K_T + alpha*B_T - alpha^2*I_T, the stiffness weight of the storage."""
    K, B, _, _ = eval_profile(params.profile, t)
    return K + params.alpha * B - params.alpha ** 2 * params.I_T


def storage_value(
    state: TargetState, t: float, params: TargetParams, strict: bool = True
) -> float:
    """Storage function 0.5*I_T*(theta_dot_d + alpha*theta_d)^2 + 0.5*beta(t)*theta_d^2.

    Positive semidefinite whenever beta(t) >= 0; with strict=True a negative
    beta raises BetaNegativeError instead of returning an indefinite value.
    """
    beta = storage_weight(t, params)
    if strict and beta < 0.0:
        raise BetaNegativeError(
            f"storage weight beta({t:g}) = {beta:g} < 0; storage value undefined"
        )
    mixed = state.theta_dot_d + params.alpha * state.theta_d
    return 0.5 * params.I_T * mixed * mixed + 0.5 * beta * state.theta_d ** 2


def storage_rate(
    state: TargetState, tau_sw: float, tau_c: float, t: float, params: TargetParams
) -> float:
    """Exact time derivative of storage_value along the target dynamics.

    Expands to two quadratic terms plus input power:

        (alpha*I_T - B_T) * theta_dot_d^2
      + (K_T_dot/2 + alpha*B_T_dot/2 - alpha*K_T) * theta_d^2
      + (theta_dot_d + alpha*theta_d) * u.

    The input power enters through the filtered velocity theta_dot_d +
    alpha*theta_d; that factor is what makes the expression the exact
    derivative of storage_value along trajectories, which the finite
    difference tests pin down.
    """
    for v in (state.theta_d, state.theta_dot_d, tau_sw, tau_c, t):
        if not math.isfinite(v):
            raise ValueError("non-finite input to storage_rate")
    K, B, K_dot, B_dot = eval_profile(params.profile, t)
    a = params.alpha
    c_rate = a * params.I_T - B
    c_angle = 0.5 * K_dot + 0.5 * a * B_dot - a * K
    u = _weighted_torque(tau_sw, tau_c, params)
    return (
        c_rate * state.theta_dot_d ** 2
        + c_angle * state.theta_d ** 2
        + (state.theta_dot_d + a * state.theta_d) * u
    )


def kappa(t: float, params: TargetParams) -> float:
    """kappa(t) = alpha^2*I_T - K_T - alpha*B_T, the negated storage weight.

    Admissible energy-generating profiles keep kappa strictly below its
    initial-value exponential envelope for all t > 0 (see gronwall_bound).
    """
    return -storage_weight(t, params)


def gronwall_bound(t: float, params: TargetParams) -> float:
    """Exponential envelope kappa(0) * exp(2*alpha*t) that kappa(t) must stay under."""
    return kappa(0.0, params) * math.exp(2.0 * params.alpha * t)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of screening a profile against the energy-generation conditions.

    accepted is equivalent to violated_condition == "none". margins holds the
    sampled minimum slack of each inequality; growth_constraint is the minimum
    slack of K_T + alpha*B_T > alpha^2*I_T + beta(0)*exp(2*alpha*t) over t > 0
    (equality holds at t = 0 by construction, so t = 0 is excluded there).
    """

    accepted: bool
    first_violation_time: Optional[float]
    violated_condition: str
    margins: dict = field(default_factory=dict)
    growth_constraint_holds: bool = True
    horizon: float = 0.0
    n_samples: int = 0

    def __post_init__(self) -> None:
        if self.accepted != (self.violated_condition == "none"):
            raise ValueError("accepted must mirror violated_condition == 'none'")


def validate_profile(
    params: TargetParams, horizon: float, n_samples: int = 10001
) -> ValidationReport:
    """Screen the profile on a uniform grid over [0, horizon].

    A profile is accepted iff at every sample the damping bound (a), the
    stiffness growth bound (b) and beta >= 0 (c) all hold. For the constant
    and exponential kinds the three slacks are monotone or single-signed, so
    the grid decision is exact; the closed-form sign checks are applied as
    well and folded into the verdict. The report additionally carries the
    growth-constraint (Gronwall envelope) slack over t > 0.
    """
    if not (horizon > 0.0 and math.isfinite(horizon)):
        raise ValueError("validation horizon must be positive and finite")
    if n_samples < 2:
        raise ValueError("need at least 2 validation samples")
    ts = np.linspace(0.0, horizon, n_samples)
    K, B, K_dot, B_dot = _profile_arrays(params.profile, ts)
    a = params.alpha
    slack_damping = a * params.I_T - B
    slack_growth = 0.5 * K_dot + 0.5 * a * B_dot - a * K
    beta = K + a * B - a * a * params.I_T

    checks = (
        ("damping_bound", slack_damping > 0.0),
        ("growth_bound", slack_growth > 0.0),
        ("beta_nonneg", beta >= 0.0),
    )
    first_violation_time: Optional[float] = None
    violated = "none"
    first_idx = n_samples
    for code, ok in checks:
        bad = np.flatnonzero(~ok)
        if bad.size and bad[0] < first_idx:
            first_idx = int(bad[0])
            violated = code
            first_violation_time = float(ts[first_idx])
    accepted = violated == "none"

    # Closed-form sign checks for the analytic kinds; these agree with the
    # grid on the kinds below (single-signed slacks) and guard the corner
    # where a coarse grid might miss an interior violation.
    profile = params.profile
    if accepted and profile.kind == "constant":
        if not (-a * profile.K0 > 0.0 and a * params.I_T - profile.B0 > 0.0):
            accepted, violated = False, (
                "damping_bound" if a * params.I_T - profile.B0 <= 0.0 else "growth_bound"
            )
            first_violation_time = 0.0
    if accepted and profile.kind == "exponential":
        if not a * params.I_T - profile.B0 > 0.0:
            accepted, violated, first_violation_time = False, "damping_bound", 0.0
        elif not profile.K0 * (0.5 * profile.growth_rate - a) > 0.0:
            accepted, violated, first_violation_time = False, "growth_bound", 0.0

    beta0 = beta[0]
    envelope_gap = (K + a * B) - (a * a * params.I_T + beta0 * np.exp(2.0 * a * ts))
    growth_constraint_holds = bool(np.all(envelope_gap[1:] > 0.0))

    margins = {
        "damping_bound": float(slack_damping.min()),
        "growth_bound": float(slack_growth.min()),
        "beta_nonneg": float(beta.min()),
        "growth_constraint": float(envelope_gap[1:].min()),
    }
    return ValidationReport(
        accepted=accepted,
        first_violation_time=first_violation_time,
        violated_condition=violated,
        margins=margins,
        growth_constraint_holds=growth_constraint_holds,
        horizon=horizon,
        n_samples=n_samples,
    )


def suggest_alpha(profile: ImpedanceProfile, I_T: float) -> Optional[float]:
    """Candidate storage rate alpha = 2*B_T(0)/I_T, or None when infeasible.

    The candidate is returned only when it satisfies the damping bound and
    keeps beta(0) non-negative; otherwise there is no point starting a
    validation run with it.
    """
    K0, B0, _, _ = eval_profile(profile, 0.0)
    if I_T <= 0.0:
        raise ValueError("I_T must be strictly positive")
    alpha = 2.0 * B0 / I_T
    if alpha <= 0.0:
        return None
    if not alpha * I_T - B0 > 0.0:
        return None
    if K0 + alpha * B0 - alpha ** 2 * I_T < 0.0:
        return None
    return alpha
