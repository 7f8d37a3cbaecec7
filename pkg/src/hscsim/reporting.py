"""Delimited-output contract: timeseries CSV, summary JSON, comparison files.

Floats are serialized with 17 significant digits, which round-trips IEEE
doubles exactly, so a rerun of the same config must produce a byte-identical
CSV and parsing an emitted file recovers every logged value bit-for-bit.
Files use UTF-8 and LF line endings regardless of platform.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .engine import STATE_NAMES, Summary, TimeSeriesLog

__all__ = [
    "CSV_COLUMNS",
    "format_value",
    "write_timeseries_csv",
    "read_timeseries_csv",
    "write_summary_json",
    "write_diff_csv",
    "compare_report_text",
]

CSV_COLUMNS = (
    ("t",)
    + STATE_NAMES
    + ("tau_sw", "tau_c", "T_sw", "T_c", "theta_ddot_d", "storage", "supplied_power")
)


def format_value(x: float) -> str:
    """Decimal text with 17 significant digits; exact for IEEE doubles."""
    return "%.17g" % x


def _log_matrix(log: TimeSeriesLog) -> np.ndarray:
    return np.column_stack([
        log.t, log.states,
        log.tau_sw, log.tau_c, log.T_sw, log.T_c,
        log.theta_ddot_d, log.storage, log.supplied_power,
    ])


def write_timeseries_csv(log: TimeSeriesLog, path) -> None:
    matrix = _log_matrix(log)
    lines = [",".join(CSV_COLUMNS)]
    for row in matrix:
        lines.append(",".join(format_value(x) for x in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_timeseries_csv(path) -> dict:
    """Columns of an emitted CSV, keyed by name; values exact per 17-digit text."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [line for line in text.split("\n") if line]
    header = lines[0].split(",")
    data = np.array([[float(cell) for cell in line.split(",")] for line in lines[1:]])
    return {name: data[:, i] for i, name in enumerate(header)}


def write_summary_json(summary: Summary, path) -> None:
    payload = json.dumps(summary.as_dict(), indent=2, sort_keys=True)
    Path(path).write_text(payload + "\n", encoding="utf-8", newline="\n")


def _common_length(log_a: TimeSeriesLog, log_b: TimeSeriesLog) -> int:
    return min(len(log_a), len(log_b))


def write_diff_csv(log_a: TimeSeriesLog, log_b: TimeSeriesLog, path) -> None:
    """Aligned-time channel differences (a minus b) over the common prefix."""
    n = _common_length(log_a, log_b)
    mat_a = _log_matrix(log_a)[:n]
    mat_b = _log_matrix(log_b)[:n]
    if not np.array_equal(mat_a[:, 0], mat_b[:, 0]):
        raise ValueError("logs are not on a common time grid")
    diff = mat_a - mat_b
    header = ["t"] + [f"d_{name}" for name in CSV_COLUMNS[1:]]
    lines = [",".join(header)]
    for i in range(n):
        cells = [format_value(mat_a[i, 0])]
        cells += [format_value(x) for x in diff[i, 1:]]
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _peak_ratio(a: np.ndarray, b: np.ndarray) -> float:
    peak_a = float(np.abs(a).max())
    peak_b = float(np.abs(b).max())
    if peak_a == 0.0:
        return float("inf") if peak_b > 0.0 else 1.0
    return peak_b / peak_a


def compare_report_text(
    label_a: str,
    label_b: str,
    log_a: TimeSeriesLog,
    log_b: TimeSeriesLog,
    summary_a: Summary,
    summary_b: Summary,
    wheel_threshold: float = 0.01,
) -> str:
    """Human-readable comparison: trajectory split time, collisions, torque peaks."""
    n = _common_length(log_a, log_b)
    gap = np.abs(log_a.states[:n, 0] - log_b.states[:n, 0])
    split = np.flatnonzero(gap > wheel_threshold)
    lines = [
        f"a: {label_a}",
        f"   collision={summary_a.collision} time={summary_a.collision_time}"
        f" diverged={summary_a.diverged} energy={summary_a.energy_verdict}",
        f"b: {label_b}",
        f"   collision={summary_b.collision} time={summary_b.collision_time}"
        f" diverged={summary_b.diverged} energy={summary_b.energy_verdict}",
    ]
    if split.size:
        lines.append(
            f"wheel angles split (|diff| > {wheel_threshold:g} rad) at t="
            f"{log_a.t[split[0]]:.6g} s"
        )
    else:
        lines.append(f"wheel angles never differ by more than {wheel_threshold:g} rad")
    lines.append(f"peak |tau_sw| ratio (b/a): {_peak_ratio(log_a.tau_sw, log_b.tau_sw):.6g}")
    lines.append(f"peak |tau_c| ratio (b/a): {_peak_ratio(log_a.tau_c, log_b.tau_c):.6g}")
    lines.append(
        f"peak |theta_sw| ratio (b/a): "
        f"{_peak_ratio(log_a.states[:, 0], log_b.states[:, 0]):.6g}"
    )
    return "\n".join(lines) + "\n"
