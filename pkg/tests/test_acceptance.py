"""Acceptance gate: nine end-to-end criteria with pinned tolerances.

Each test prints exactly one `[criterion N] PASS/FAIL` line carrying the
measured numbers (run with `pytest -s tests/test_acceptance.py` to see the
lines for passing tests too). Every criterion also carries a wall-clock
budget; the elapsed time is part of the verdict.
"""

import dataclasses
import time

import numpy as np
import pytest

from hscsim.cli import main
from hscsim.config import default_config
from hscsim.controller import (
    ControllerGains,
    column_regressor,
    tracking_errors,
    true_parameters,
    wheel_regressor,
)
from hscsim.engine import energy_audit, rk4, run_scenario
from hscsim.steering import SteeringParams, SteeringState, eval_friction
from hscsim.target import (
    ImpedanceProfile,
    TargetParams,
    TargetState,
    gronwall_bound,
    kappa,
    storage_rate,
    validate_profile,
)
from hscsim.vehicle import DriverParams, LaneChangeSchedule


def _verdict(criterion: int, ok: bool, detail: str) -> None:
    print(f"[criterion {criterion}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"criterion {criterion}: {detail}"


@pytest.fixture(scope="module")
def default_pair():
    """Both stock scenarios, run once and shared by criteria 6 and 7."""
    t0 = time.perf_counter()
    runs = {name: run_scenario(default_config(name)) for name in ("nominal", "attack")}
    runs["elapsed"] = time.perf_counter() - t0
    return runs


def test_criterion_1_regressor_identities():
    # both regressor rows times the exact parameter vectors must reproduce
    # the defining torque combinations to machine precision
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(2000):
        params = SteeringParams(
            I_sw=float(rng.uniform(1e-3, 1.0)),
            I_c=float(rng.uniform(1e-3, 1.0)),
            B_sw=float(rng.uniform(0.0, 2.0)),
            B_c=float(rng.uniform(0.0, 2.0)),
            K_sw=float(rng.uniform(0.0, 2.0)),
            K_c=float(rng.uniform(0.0, 2.0)),
            alpha_sw=float(rng.uniform(0.1, 3.0)),
            alpha_c=float(rng.uniform(0.1, 3.0)),
        )
        gains = ControllerGains.uniform(mu=float(rng.uniform(0.3, 2.0)))
        steering = SteeringState(*rng.uniform(-3.0, 3.0, size=4))
        theta_d, theta_dot_d = rng.uniform(-3.0, 3.0, size=2)
        tau_sw, tau_c, T_sw, acc_d = rng.uniform(-3.0, 3.0, size=4)
        errors = tracking_errors(float(theta_d), float(theta_dot_d), steering, gains)
        phi_sw, phi_c = true_parameters(params)

        Y_sw = wheel_regressor(steering, float(tau_sw), float(acc_d), errors, gains)
        lhs = float(Y_sw @ phi_sw)
        N_sw = eval_friction(steering.theta_sw, steering.theta_dot_sw,
                             params.B_sw, params.K_sw)
        rhs = (N_sw - params.alpha_sw * tau_sw
               + params.I_sw * (acc_d + gains.mu_sw * errors.e_dot_sw))
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs)))

        Y_c = column_regressor(steering, float(tau_sw), float(tau_c), float(T_sw),
                               errors, gains)
        lhs = float(Y_c @ phi_c)
        N_c = eval_friction(steering.theta_c, steering.theta_dot_c,
                            params.B_c, params.K_c)
        rhs = (params.I_c / params.I_sw * (-N_sw + params.alpha_sw * tau_sw + T_sw)
               + N_c - params.alpha_c * tau_c
               + params.I_c * gains.mu_c * errors.e_dot_c)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs)))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-14 and elapsed < 1.0
    _verdict(1, ok, f"max relative identity error {worst:.3e} (bound 1e-14), "
                    f"elapsed {elapsed:.2f}s (budget 1s)")


def test_criterion_2_perfect_model_error_decay():
    # with true parameters and adaptation off, each filtered error must decay
    # as r(0) * exp(-k t / I) through the full composite simulation
    t0 = time.perf_counter()
    cfg = dataclasses.replace(
        default_config("nominal"),
        dt=1e-5, duration=0.024, adaptation=False, initial_estimates="true",
        initial_state={"theta_sw": -0.05, "theta_c": 0.03, "theta_d": 0.1},
    )
    log, summary = run_scenario(cfg)
    gains, plant = cfg.gains, cfg.steering
    e_sw = log.column("theta_d") - log.column("theta_sw")
    ed_sw = log.column("theta_dot_d") - log.column("theta_dot_sw")
    e_c = log.column("theta_sw") - log.column("theta_c")
    ed_c = log.column("theta_dot_sw") - log.column("theta_dot_c")
    r = {
        "sw": (ed_sw + gains.mu_sw * e_sw, gains.k_sw, plant.I_sw),
        "c": (ed_c + gains.mu_c * e_c, gains.k_c, plant.I_c),
    }
    worst = 0.0
    for series, k, inertia in r.values():
        window = log.t <= inertia / k   # one decay constant
        exact = series[0] * np.exp(-(k / inertia) * log.t[window])
        worst = max(worst, float(np.max(np.abs(series[window] - exact)
                                        / np.abs(exact))))
    elapsed = time.perf_counter() - t0
    ok = (not summary.diverged) and worst < 1e-4 and elapsed < 10.0
    _verdict(2, ok, f"max relative decay error {worst:.3e} (bound 1e-4) "
                    f"at dt=1e-5, elapsed {elapsed:.2f}s (budget 10s)")


def test_criterion_3_profile_screening():
    t0 = time.perf_counter()
    stock = TargetParams(
        profile=ImpedanceProfile.exponential(K0=2.8e-2, B0=4.99e-3, growth_rate=1.05)
    )
    accepted = validate_profile(stock, horizon=10.0)
    overdamped = TargetParams(
        profile=ImpedanceProfile.exponential(K0=2.8e-2, B0=6e-3, growth_rate=1.05)
    )
    rejected = validate_profile(overdamped, horizon=10.0)
    elapsed = time.perf_counter() - t0
    ok = (
        accepted.accepted
        and accepted.growth_constraint_holds
        and all(m > 0.0 for m in accepted.margins.values())
        and not rejected.accepted
        and rejected.violated_condition == "damping_bound"
        and rejected.first_violation_time == 0.0
        and elapsed < 1.0
    )
    _verdict(3, ok, f"stock profile accepted={accepted.accepted}, overdamped "
                    f"variant rejected as {rejected.violated_condition!r} at "
                    f"t={rejected.first_violation_time}, elapsed {elapsed:.2f}s "
                    f"(budget 1s)")


def test_criterion_4_envelope_bound_random_family():
    # admissible exponential profiles keep kappa strictly under its initial
    # exponential envelope for t > 0, with equality exactly at t = 0
    t0 = time.perf_counter()
    rng = np.random.default_rng(20260816)
    ts = np.linspace(0.0, 10.0, 4001)
    checked = 0
    ok = True
    for _ in range(200):
        alpha = float(rng.uniform(0.1, 1.5))
        I_T = float(rng.uniform(1e-3, 5e-2))
        B0 = float(rng.uniform(0.0, 0.9) * alpha * I_T)
        growth = float(alpha * rng.uniform(2.05, 4.0))
        # keep beta(0) = K0 + alpha*B0 - alpha^2*I_T positive by construction
        K0 = alpha * alpha * I_T - alpha * B0 + float(rng.uniform(1e-3, 0.5))
        params = TargetParams(
            profile=ImpedanceProfile.exponential(K0, B0, growth),
            I_T=I_T, alpha=alpha,
        )
        report = validate_profile(params, horizon=10.0)
        kap = np.array([kappa(float(t), params) for t in ts])
        env = np.array([gronwall_bound(float(t), params) for t in ts])
        ok = ok and report.accepted and report.growth_constraint_holds
        ok = ok and kap[0] == env[0] and bool(np.all(kap[1:] < env[1:]))
        checked += 1
        if not ok:
            break
    # a family violating the damping bound must be rejected outright
    for _ in range(50):
        alpha = float(rng.uniform(0.1, 1.5))
        I_T = float(rng.uniform(1e-3, 5e-2))
        B0 = float(alpha * I_T * rng.uniform(1.0, 3.0))
        params = TargetParams(
            profile=ImpedanceProfile.exponential(0.1, B0, 3.0 * alpha),
            I_T=I_T, alpha=alpha,
        )
        ok = ok and not validate_profile(params, horizon=10.0).accepted
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 5.0
    _verdict(4, ok, f"{checked} admissible profiles stayed under the envelope "
                    f"on a 4001-point grid, 50 inadmissible rejected, elapsed "
                    f"{elapsed:.2f}s (budget 5s)")


def test_criterion_5_storage_rate_finite_difference():
    # the analytic storage rate must match the central difference of the
    # stored energy along a full closed-loop attack trajectory; the maneuver
    # is placed so the reference torque is smooth inside the window
    t0 = time.perf_counter()
    cfg = dataclasses.replace(
        default_config("attack"),
        dt=1e-4, duration=3.0,
        driver=DriverParams(reference=LaneChangeSchedule(start=0.2, lobe_duration=2.8)),
    )
    log, summary = run_scenario(cfg)
    V = log.storage
    fd = (V[2:] - V[:-2]) / (log.t[2:] - log.t[:-2])
    analytic = np.array([
        storage_rate(TargetState(log.states[i, 4], log.states[i, 5]),
                     log.tau_sw[i], log.tau_c[i], float(log.t[i]), cfg.target)
        for i in range(1, len(log) - 1)
    ])
    floor = 1e-3 * np.abs(analytic).max()
    keep = np.abs(analytic) >= floor
    rel = np.abs(fd[keep] - analytic[keep]) / np.abs(analytic[keep])
    worst = float(rel.max())
    elapsed = time.perf_counter() - t0
    ok = (not summary.diverged) and worst < 1e-3 and elapsed < 10.0
    _verdict(5, ok, f"max relative rate error {worst:.3e} (bound 1e-3) over "
                    f"{int(keep.sum())} samples at dt=1e-4, elapsed "
                    f"{elapsed:.2f}s (budget 10s)")


def test_criterion_6_energy_audit_verdicts(default_pair):
    t0 = time.perf_counter()
    log_n, _ = default_pair["nominal"]
    log_a, _ = default_pair["attack"]
    audit_n = energy_audit(log_n)
    audit_a = energy_audit(log_a)
    quarter = log_a.t >= 0.75 * log_a.t[-1]
    idx = np.linspace(np.flatnonzero(quarter)[0], len(log_a.t) - 1, 9).astype(int)
    increasing = bool(np.all(np.diff(audit_a.margin[idx]) > 0.0))
    elapsed = default_pair["elapsed"] + time.perf_counter() - t0
    ok = (
        audit_a.verdict == "non-passive"
        and audit_a.peak_margin > 1e-9
        and increasing
        and audit_n.verdict == "passive"
        and audit_n.peak_margin <= 1e-9
        and elapsed < 30.0
    )
    _verdict(6, ok, f"attack peak margin {audit_a.peak_margin:.3e} J rising over "
                    f"the final quarter={increasing}, nominal peak margin "
                    f"{audit_n.peak_margin:.3e} J, elapsed {elapsed:.2f}s "
                    f"(budget 30s)")


def test_criterion_7_scenario_outcomes(default_pair):
    t0 = time.perf_counter()
    log_n, summary_n = default_pair["nominal"]
    log_a, summary_a = default_pair["attack"]
    late = log_n.t >= 5.0
    tracking = float(np.abs(log_n.wheel_error()[late]).max())
    peak_n = float(np.abs(log_n.column("theta_sw")).max())
    peak_a = float(np.abs(log_a.column("theta_sw")).max())
    ratio = peak_a / peak_n
    elapsed = default_pair["elapsed"] + time.perf_counter() - t0
    ok = (
        not summary_n.collision
        and not summary_n.diverged
        and tracking < 1e-2
        and summary_a.collision
        and summary_a.collision_time is not None
        and summary_a.collision_time < summary_a.duration
        and ratio < 0.5
        and elapsed < 60.0
    )
    _verdict(7, ok, f"nominal: no collision, late tracking error {tracking:.2e} rad; "
                    f"attack: collision at t={summary_a.collision_time}s, wheel "
                    f"peak ratio {ratio:.3f} (bound 0.5), elapsed {elapsed:.2f}s "
                    f"(budget 60s)")


def test_criterion_8_integrator_order():
    # global convergence order on a rotation whose exact solution is known
    t0 = time.perf_counter()
    A = np.array([[0.0, 1.0], [-1.0, 0.0]])

    def f(t, y):
        return A @ y

    exact = np.array([np.cos(1.0), -np.sin(1.0)])
    errors = []
    for n in (100, 200, 400):
        dt = 1.0 / n
        y = np.array([1.0, 0.0])
        for i in range(n):
            y = rk4(f, i * dt, y, dt)
        errors.append(float(np.linalg.norm(y - exact)))
    orders = [np.log2(errors[i] / errors[i + 1]) for i in range(2)]
    elapsed = time.perf_counter() - t0
    ok = all(p >= 3.8 for p in orders) and elapsed < 5.0
    _verdict(8, ok, f"observed orders {orders[0]:.3f}, {orders[1]:.3f} "
                    f"(bound 3.8), elapsed {elapsed:.2f}s (budget 5s)")


def test_criterion_9_deterministic_reruns(tmp_path):
    t0 = time.perf_counter()
    identical = True
    for name in ("nominal", "attack"):
        outputs = []
        for attempt in ("first", "second"):
            out = tmp_path / f"{name}_{attempt}"
            code = main(["run", name, "--out", str(out), "--no-plots"])
            assert code == 0
            outputs.append((out / "timeseries.csv").read_bytes())
        identical = identical and outputs[0] == outputs[1]
    elapsed = time.perf_counter() - t0
    ok = identical and elapsed < 60.0
    _verdict(9, ok, f"repeated CLI runs byte-identical={identical}, elapsed "
                    f"{elapsed:.2f}s (budget 60s)")
