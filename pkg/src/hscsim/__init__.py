"""Haptic shared-control steering simulator.

Couples a two-inertia steering column to a planar single-track vehicle, drives
the wheel toward a commanded target trajectory with an adaptive two-loop
torque law, and accounts for the energy the target dynamics inject so that
non-passive (actively destabilizing) impedance schedules are detected and
flagged before or during a run.
"""

from .config import BUILTIN_CONFIGS, ConfigError, builtin_config_path, default_config, parse_config
from .controller import AdaptiveState, ControllerGains
from .engine import (
    N_STATES,
    STATE_NAMES,
    EnergyAudit,
    ScenarioConfig,
    Summary,
    TimeSeriesLog,
    energy_audit,
    rk4,
    run_scenario,
)
from .steering import SteeringParams, SteeringState
from .target import (
    BetaNegativeError,
    ImpedanceProfile,
    TargetParams,
    TargetState,
    ValidationReport,
    eval_profile,
    storage_rate,
    storage_value,
    validate_profile,
)
from .vehicle import DriverParams, LaneChangeSchedule, Obstacle, VehicleParams, VehicleState

__version__ = "0.1.0"

__all__ = [
    "AdaptiveState",
    "BetaNegativeError",
    "BUILTIN_CONFIGS",
    "builtin_config_path",
    "ConfigError",
    "ControllerGains",
    "default_config",
    "DriverParams",
    "EnergyAudit",
    "energy_audit",
    "eval_profile",
    "ImpedanceProfile",
    "LaneChangeSchedule",
    "N_STATES",
    "Obstacle",
    "parse_config",
    "rk4",
    "run_scenario",
    "ScenarioConfig",
    "STATE_NAMES",
    "SteeringParams",
    "SteeringState",
    "storage_rate",
    "storage_value",
    "Summary",
    "TargetParams",
    "TargetState",
    "TimeSeriesLog",
    "ValidationReport",
    "validate_profile",
    "VehicleParams",
    "VehicleState",
    "__version__",
]
