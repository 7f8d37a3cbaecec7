"""Command-line front end.

Exit codes:
    0  success
    1  profile rejected (validate-profile only)
    2  simulation diverged; partial outputs were still written
    3  configuration or I/O error
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .config import BUILTIN_CONFIGS, ConfigError, builtin_config_path, parse_config
from .engine import ScenarioConfig, run_scenario
from .reporting import (
    compare_report_text,
    write_diff_csv,
    write_summary_json,
    write_timeseries_csv,
)
from .target import validate_profile

__all__ = ["main", "entry"]


def _resolve_config(arg: str) -> Path:
    path = Path(arg)
    if path.exists():
        return path
    if arg in BUILTIN_CONFIGS:
        return builtin_config_path(arg)
    raise ConfigError(
        "config", f"{arg!r} is not a file or a builtin name {BUILTIN_CONFIGS}"
    )


def _apply_overrides(config: ScenarioConfig, args) -> ScenarioConfig:
    changes = {}
    if args.dt is not None:
        changes["dt"] = args.dt
    if args.duration is not None:
        changes["duration"] = args.duration
    if not changes:
        return config
    try:
        return dataclasses.replace(config, **changes)
    except ValueError as exc:
        raise ConfigError("scenario", str(exc)) from None


def _run_one(config: ScenarioConfig, out_dir: Path, label: str, plots: bool):
    log, summary = run_scenario(config)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_timeseries_csv(log, out_dir / "timeseries.csv")
    write_summary_json(summary, out_dir / "summary.json")
    if plots:
        from .plots import save_run_figures

        save_run_figures(log, summary, config.obstacle, out_dir)
    print(f"{label}: mode={summary.mode} collision={summary.collision}"
          f" energy={summary.energy_verdict} diverged={summary.diverged}")
    return log, summary


def _cmd_run(args) -> int:
    config = _apply_overrides(parse_config(_resolve_config(args.config)), args)
    out_dir = Path(args.out)
    _, summary = _run_one(config, out_dir, "run", not args.no_plots)
    print(f"wrote {out_dir / 'timeseries.csv'}")
    print(f"wrote {out_dir / 'summary.json'}")
    return 2 if summary.diverged else 0


def _cmd_validate(args) -> int:
    config = parse_config(_resolve_config(args.config))
    report = validate_profile(config.target, horizon=config.duration)
    print(f"profile kind: {config.target.profile.kind}")
    print(f"accepted: {report.accepted}")
    if not report.accepted:
        print(f"first violation: t={report.first_violation_time:.6g} s"
              f" condition={report.violated_condition}")
    for name, margin in sorted(report.margins.items()):
        print(f"margin {name}: {margin:.6g}")
    print(f"growth constraint holds: {report.growth_constraint_holds}")
    return 0 if report.accepted else 1


def _cmd_compare(args) -> int:
    config_a = parse_config(_resolve_config(args.config_a))
    config_b = parse_config(_resolve_config(args.config_b))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    label_a, label_b = args.config_a, args.config_b
    log_a, summary_a = _run_one(config_a, out_dir / "a", label_a, not args.no_plots)
    log_b, summary_b = _run_one(config_b, out_dir / "b", label_b, not args.no_plots)
    write_diff_csv(log_a, log_b, out_dir / "diff.csv")
    report = compare_report_text(label_a, label_b, log_a, log_b, summary_a, summary_b)
    (out_dir / "report.txt").write_text(report, encoding="utf-8", newline="\n")
    sys.stdout.write(report)
    if not args.no_plots:
        from .plots import save_compare_figures

        save_compare_figures(label_a, label_b, log_a, log_b,
                             config_a.obstacle, out_dir)
    return 2 if (summary_a.diverged or summary_b.diverged) else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hscsim",
        description="Shared-control steering simulator with impedance-profile "
                    "screening and energy accounting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="simulate one scenario and write outputs")
    run_p.add_argument("config", help="config file path, or 'nominal'/'attack'")
    run_p.add_argument("--out", default="out", help="output directory")
    run_p.add_argument("--dt", type=float, default=None, help="override step size")
    run_p.add_argument("--duration", type=float, default=None,
                       help="override sim duration")
    run_p.add_argument("--no-plots", action="store_true",
                       help="skip figure rendering")
    run_p.set_defaults(func=_cmd_run)

    val_p = sub.add_parser("validate-profile",
                           help="screen a target impedance profile")
    val_p.add_argument("config", help="config file path, or 'nominal'/'attack'")
    val_p.set_defaults(func=_cmd_validate)

    cmp_p = sub.add_parser("compare", help="run two scenarios and diff them")
    cmp_p.add_argument("config_a", help="first config (reference)")
    cmp_p.add_argument("config_b", help="second config")
    cmp_p.add_argument("--out", default="out", help="output directory")
    cmp_p.add_argument("--no-plots", action="store_true",
                       help="skip figure rendering")
    cmp_p.set_defaults(func=_cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    raise SystemExit(main())
