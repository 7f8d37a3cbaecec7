"""Scenario configuration: strict INI-style files and programmatic defaults.

A config file is a flat INI document with dotted section names for nesting
([target.profile], [driver.reference]). Every section and key is checked
against the schema; unknown names and missing required keys are rejected with
a diagnostic naming the offending field, so a typo cannot silently fall back
to a default. Two complete files ship with the package: nominal.cfg and
attack.cfg.
"""

from __future__ import annotations

import configparser
import csv
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .controller import ControllerGains
from .engine import STATE_NAMES, ScenarioConfig
from .steering import SteeringParams
from .target import ImpedanceProfile, TargetParams
from .vehicle import DriverParams, LaneChangeSchedule, Obstacle, VehicleParams

__all__ = [
    "ConfigError",
    "parse_config",
    "default_config",
    "builtin_config_path",
    "BUILTIN_CONFIGS",
]

BUILTIN_CONFIGS = ("nominal", "attack")

_BOOL_WORDS = {
    "true": True, "yes": True, "on": True, "1": True,
    "false": False, "no": False, "off": False, "0": False,
}


class ConfigError(Exception):
    """Configuration problem, carrying the offending 'section.key' when known."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


def builtin_config_path(name: str) -> Path:
    """Filesystem path of a shipped scenario file ('nominal' or 'attack')."""
    if name not in BUILTIN_CONFIGS:
        raise ConfigError("config", f"no builtin scenario named '{name}'")
    return Path(resources.files("hscsim") / "configs" / f"{name}.cfg")


class _Section:
    """One parsed section with tracked key consumption."""

    def __init__(self, name: str, items: dict):
        self.name = name
        self.items = dict(items)
        self.seen: set = set()

    def _raw(self, key: str, required: bool) -> Optional[str]:
        self.seen.add(key)
        if key not in self.items:
            if required:
                raise ConfigError(f"{self.name}.{key}", "required key is missing")
            return None
        return self.items[key]

    def get_float(self, key: str, required: bool = True, default: float = 0.0) -> float:
        raw = self._raw(key, required)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{self.name}.{key}", f"expected a number, got '{raw}'") from None

    def get_int(self, key: str, required: bool = True, default: int = 0) -> int:
        raw = self._raw(key, required)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{self.name}.{key}", f"expected an integer, got '{raw}'") from None

    def get_bool(self, key: str, required: bool = True, default: bool = False) -> bool:
        raw = self._raw(key, required)
        if raw is None:
            return default
        word = raw.strip().lower()
        if word not in _BOOL_WORDS:
            raise ConfigError(f"{self.name}.{key}", f"expected a boolean, got '{raw}'")
        return _BOOL_WORDS[word]

    def get_choice(self, key: str, choices: tuple, required: bool = True, default: str = "") -> str:
        raw = self._raw(key, required)
        if raw is None:
            return default
        value = raw.strip()
        if value not in choices:
            raise ConfigError(f"{self.name}.{key}", f"expected one of {choices}, got '{value}'")
        return value

    def get_str(self, key: str, required: bool = True, default: str = "") -> str:
        raw = self._raw(key, required)
        return default if raw is None else raw.strip()

    def reject_unknown(self) -> None:
        unknown = set(self.items) - self.seen
        if unknown:
            name = sorted(unknown)[0]
            raise ConfigError(f"{self.name}.{name}", "unknown key")


def _load_sections(path: Path) -> dict:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    # Keys keep their case; values are raw strings.
    parser.optionxform = str
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError("", f"cannot read config file '{path}': {exc}") from None
    except configparser.Error as exc:
        raise ConfigError("", f"malformed config file '{path}': {exc}") from None
    return {name: _Section(name, parser[name]) for name in parser.sections()}


def _read_profile_table(path: Path, field: str):
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            rows = [[float(cell) for cell in row] for row in reader if row]
    except (OSError, ValueError) as exc:
        raise ConfigError(field, f"cannot read profile table '{path}': {exc}") from None
    expected = ["t", "stiffness", "damping", "stiffness_rate", "damping_rate"]
    if header is None or [h.strip() for h in header] != expected:
        raise ConfigError(field, f"profile table must have header {','.join(expected)}")
    data = np.array(rows, dtype=float)
    if data.ndim != 2 or data.shape[1] != 5:
        raise ConfigError(field, "profile table must have 5 columns")
    return data


def parse_config(path) -> ScenarioConfig:
    """Parse and validate one scenario file into an immutable ScenarioConfig."""
    path = Path(path)
    sections = _load_sections(path)
    known = {
        "scenario", "steering", "target", "target.profile", "controller",
        "vehicle", "driver", "driver.reference", "obstacle", "initial",
    }
    for name in sections:
        if name not in known:
            raise ConfigError(name, "unknown section")
    required = known - {"initial"}
    for name in sorted(required):
        if name not in sections:
            raise ConfigError(name, "required section is missing")

    def build(section_name: str, builder):
        sec = sections[section_name]
        try:
            value = builder(sec)
        except ValueError as exc:
            raise ConfigError(section_name, str(exc)) from None
        sec.reject_unknown()
        return value

    def build_profile(sec: _Section) -> ImpedanceProfile:
        kind = sec.get_choice("kind", ("constant", "exponential", "sampled"))
        if kind == "sampled":
            table_name = sec.get_str("table")
            data = _read_profile_table(path.parent / table_name, f"{sec.name}.table")
            return ImpedanceProfile.sampled(
                data[:, 0], data[:, 1], data[:, 2], data[:, 3], data[:, 4]
            )
        K0 = sec.get_float("K0")
        B0 = sec.get_float("B0")
        if kind == "exponential":
            return ImpedanceProfile.exponential(K0, B0, sec.get_float("growth_rate"))
        return ImpedanceProfile.constant(K0, B0)

    profile = build("target.profile", build_profile)

    steering = build("steering", lambda s: SteeringParams(
        I_sw=s.get_float("I_sw"), I_c=s.get_float("I_c"),
        B_sw=s.get_float("B_sw"), B_c=s.get_float("B_c"),
        K_sw=s.get_float("K_sw"), K_c=s.get_float("K_c"),
        alpha_sw=s.get_float("alpha_sw"), alpha_c=s.get_float("alpha_c"),
        gamma=s.get_float("gamma"), C_d=s.get_float("C_d"),
    ))
    target = build("target", lambda s: TargetParams(
        profile=profile,
        I_T=s.get_float("I_T"), alpha=s.get_float("alpha"),
        alpha_T_sw=s.get_float("alpha_T_sw"), alpha_T_c=s.get_float("alpha_T_c"),
    ))

    controller_sec = sections["controller"]
    adaptation = controller_sec.get_bool("adaptation", required=False, default=True)
    initial_estimates = controller_sec.get_choice(
        "initial_estimates", ("zero", "true"), required=False, default="zero"
    )
    gains = build("controller", lambda s: ControllerGains(
        mu_sw=s.get_float("mu_sw"), mu_c=s.get_float("mu_c"),
        k_sw=s.get_float("k_sw"), k_c=s.get_float("k_c"),
        gamma_sw=np.full(4, s.get_float("gamma_sw")),
        gamma_c=np.full(8, s.get_float("gamma_c")),
    ))

    vehicle = build("vehicle", lambda s: VehicleParams(
        mass=s.get_float("mass"), yaw_inertia=s.get_float("yaw_inertia"),
        dist_front=s.get_float("dist_front"), dist_rear=s.get_float("dist_rear"),
        cornering_front=s.get_float("cornering_front"),
        cornering_rear=s.get_float("cornering_rear"),
        tire_peak=s.get_float("tire_peak"), speed=s.get_float("speed"),
        steering_ratio=s.get_float("steering_ratio"),
    ))
    reference = build("driver.reference", lambda s: LaneChangeSchedule(
        amplitude=s.get_float("amplitude"), start=s.get_float("start"),
        lobe_duration=s.get_float("lobe_duration"), hold=s.get_float("hold"),
    ))
    driver = build("driver", lambda s: DriverParams(
        kp=s.get_float("kp"), kd=s.get_float("kd"),
        saturation=s.get_float("saturation"), reference=reference,
    ))
    obstacle = build("obstacle", lambda s: Obstacle(
        x_min=s.get_float("x_min"), x_max=s.get_float("x_max"),
        y_min=s.get_float("y_min"), y_max=s.get_float("y_max"),
    ))

    initial_state = None
    if "initial" in sections:
        sec = sections["initial"]
        initial_state = {}
        for key in list(sec.items):
            if key not in STATE_NAMES:
                raise ConfigError(f"initial.{key}", "unknown state name")
            initial_state[key] = sec.get_float(key)
        sec.reject_unknown()

    scenario_sec = sections["scenario"]
    mode = scenario_sec.get_choice("mode", ("nominal", "attack"))
    dt = scenario_sec.get_float("dt")
    duration = scenario_sec.get_float("duration")
    log_stride = scenario_sec.get_int("log_stride", required=False, default=1)
    scenario_sec.reject_unknown()

    try:
        return ScenarioConfig(
            mode=mode,
            steering=steering,
            target=target,
            gains=gains,
            vehicle=vehicle,
            driver=driver,
            obstacle=obstacle,
            dt=dt,
            duration=duration,
            log_stride=log_stride,
            adaptation=adaptation,
            initial_estimates=initial_estimates,
            initial_state=initial_state,
        )
    except ValueError as exc:
        raise ConfigError("scenario", str(exc)) from None


def default_config(mode: str) -> ScenarioConfig:
    """Programmatic twin of the shipped nominal.cfg / attack.cfg files."""
    if mode == "attack":
        profile = ImpedanceProfile.exponential(K0=2.8e-2, B0=4.99e-3, growth_rate=1.05)
    elif mode == "nominal":
        profile = ImpedanceProfile.constant(K0=0.2, B0=0.1)
    else:
        raise ConfigError("scenario.mode", f"expected 'nominal' or 'attack', got '{mode}'")
    return ScenarioConfig(mode=mode, target=TargetParams(profile=profile))
