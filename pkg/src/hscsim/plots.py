"""Figure rendering for run and comparison outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Rectangle

from .engine import Summary, TimeSeriesLog
from .vehicle import Obstacle

__all__ = ["save_run_figures", "save_compare_figures"]

_RC = {
    "figure.figsize": (8.0, 4.5),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
}


def _save(fig, out_dir: Path, name: str, written: list) -> None:
    path = out_dir / name
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    written.append(path)


def _draw_obstacle(ax, obstacle: Obstacle) -> None:
    ax.add_patch(Rectangle(
        (obstacle.x_min, obstacle.y_min),
        obstacle.x_max - obstacle.x_min,
        obstacle.y_max - obstacle.y_min,
        facecolor="tab:red", alpha=0.25, edgecolor="tab:red",
    ))


def save_run_figures(
    log: TimeSeriesLog,
    summary: Summary,
    obstacle: Obstacle,
    out_dir,
) -> list:
    """Render the standard single-run figures into out_dir, return paths."""
    out_dir = Path(out_dir)
    written: list = []
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.plot(log.t, log.tau_sw, label="driver torque", lw=0.9)
        ax.plot(log.t, log.tau_c, label="column reaction", lw=0.9)
        ax.plot(log.t, log.T_sw, label="wheel-side input", lw=0.9)
        ax.plot(log.t, log.T_c, label="column-side input", lw=0.9)
        ax.set_xlabel("t [s]")
        ax.set_ylabel("torque [Nm]")
        ax.legend(loc="best")
        _save(fig, out_dir, "torque_profiles.png", written)

        fig, ax = plt.subplots()
        ax.plot(log.t, log.column("theta_sw"), label="wheel angle", lw=1.0)
        ax.plot(log.t, log.column("theta_c"), label="column angle", lw=1.0)
        ax.plot(log.t, log.column("theta_d"), label="commanded angle", lw=1.0, ls="--")
        ax.set_xlabel("t [s]")
        ax.set_ylabel("angle [rad]")
        ax.legend(loc="best")
        _save(fig, out_dir, "angle_profiles.png", written)

        fig, ax = plt.subplots()
        ax.plot(log.column("veh_x"), log.column("veh_y"), lw=1.2)
        _draw_obstacle(ax, obstacle)
        if summary.collision and summary.collision_time is not None:
            idx = int(abs(log.t - summary.collision_time).argmin())
            ax.plot(log.column("veh_x")[idx], log.column("veh_y")[idx],
                    "x", color="k", ms=9, mew=2)
        ax.set_xlabel("x [m]")
        ax.set_ylabel("y [m]")
        ax.set_title("vehicle path" + (" (collision)" if summary.collision else ""))
        _save(fig, out_dir, "trajectory.png", written)

        fig, ax = plt.subplots()
        for i in range(4):
            ax.plot(log.t, log.column(f"phi_hat_sw_{i}"), lw=0.8)
        for i in range(8):
            ax.plot(log.t, log.column(f"phi_hat_c_{i}"), lw=0.8, ls="--")
        ax.set_xlabel("t [s]")
        ax.set_ylabel("estimate value")
        ax.set_title("adaptive estimates (solid wheel side, dashed column side)")
        _save(fig, out_dir, "estimates.png", written)

        fig, ax = plt.subplots()
        ax.plot(log.t, log.storage, label="storage", lw=1.0)
        supplied = np.concatenate((
            [0.0],
            np.cumsum(0.5 * np.diff(log.t)
                      * (log.supplied_power[1:] + log.supplied_power[:-1])),
        ))
        ax.plot(log.t, supplied, label="supplied energy", lw=1.0)
        ax.plot(log.t, log.storage - log.storage[0] - supplied,
                label="generation margin", lw=1.0)
        ax.set_xlabel("t [s]")
        ax.set_ylabel("energy [J]")
        ax.legend(loc="best")
        _save(fig, out_dir, "energy.png", written)
    return written


def save_compare_figures(
    label_a: str,
    label_b: str,
    log_a: TimeSeriesLog,
    log_b: TimeSeriesLog,
    obstacle: Obstacle,
    out_dir,
) -> list:
    out_dir = Path(out_dir)
    written: list = []
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.plot(log_a.t, log_a.column("theta_sw"), label=label_a, lw=1.0)
        ax.plot(log_b.t, log_b.column("theta_sw"), label=label_b, lw=1.0)
        ax.set_xlabel("t [s]")
        ax.set_ylabel("wheel angle [rad]")
        ax.legend(loc="best")
        _save(fig, out_dir, "wheel_angle_compare.png", written)

        fig, ax = plt.subplots()
        ax.plot(log_a.column("veh_x"), log_a.column("veh_y"), label=label_a, lw=1.2)
        ax.plot(log_b.column("veh_x"), log_b.column("veh_y"), label=label_b, lw=1.2)
        _draw_obstacle(ax, obstacle)
        ax.set_xlabel("x [m]")
        ax.set_ylabel("y [m]")
        ax.legend(loc="best")
        _save(fig, out_dir, "trajectory_compare.png", written)
    return written
