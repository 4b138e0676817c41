"""Multirotor range, endurance, and optimal-speed estimation.

The package chains three models: momentum-theory hover power, a lumped
motor-efficiency model, and a one-time-constant equivalent-circuit LiPo
cell model, plus graybox identification of the motor and battery
coefficients from bench logs. See :mod:`rotorperf.estimator` for the
end-to-end pipeline and :mod:`rotorperf.cli` for the command-line entry
points.
"""

from .aero import CruiseTargets, HoverPoint, cruise_power_bands, cruise_powers, hover_point, optimal_speeds
from .battery import (
    BatteryState,
    CapacityResult,
    DischargeEnd,
    DischargeTrace,
    PowerProfile,
    RelativeCapacity,
    advance_state,
    cell_terminal_voltage,
    effective_capacity,
    internal_resistance,
    normalize_power,
    open_circuit_voltage,
    relative_capacity_cubic,
    simulate_discharge,
    write_trace_csv,
)
from .core import (
    BatteryPack,
    BatteryParams,
    EmpiricalCoeffs,
    Environment,
    VehicleSpec,
    builtin_battery_params,
    builtin_empirical_coeffs,
    default_environment,
    parse_battery_designator,
)
from .errors import (
    CapacityUndefinedError,
    FileFormatError,
    FitError,
    InfeasiblePowerError,
    InvalidParameterError,
    RotorPerfError,
    UnknownKeyError,
)
from .estimator import PerformanceReport, SweepPoint, estimate, sweep
from .identification import (
    DischargeLog,
    FitReport,
    ResistanceFit,
    StepResistance,
    ThrustLog,
    fit_battery_dynamics,
    fit_battery_resistance,
    fit_motor,
    read_discharge_log,
    read_thrust_log,
)
from .motor import MotorPropCoeffs, drag_torque, efficiency, electrical_from_mechanical, electrical_power
from .specfile import load_vehicle_file, parse_vehicle_text

__version__ = "0.1.0"

__all__ = [
    "BatteryPack", "BatteryParams", "BatteryState", "CapacityResult",
    "CapacityUndefinedError", "CruiseTargets", "DischargeEnd", "DischargeLog",
    "DischargeTrace", "EmpiricalCoeffs", "Environment", "FileFormatError",
    "FitError", "FitReport", "HoverPoint", "InfeasiblePowerError",
    "InvalidParameterError", "MotorPropCoeffs", "PerformanceReport",
    "PowerProfile", "RelativeCapacity", "ResistanceFit", "RotorPerfError",
    "StepResistance", "SweepPoint", "ThrustLog", "UnknownKeyError",
    "VehicleSpec", "advance_state", "builtin_battery_params",
    "builtin_empirical_coeffs", "cell_terminal_voltage", "cruise_power_bands",
    "cruise_powers", "default_environment", "drag_torque", "effective_capacity",
    "efficiency", "electrical_from_mechanical", "electrical_power", "estimate",
    "fit_battery_dynamics", "fit_battery_resistance", "fit_motor",
    "hover_point", "internal_resistance", "load_vehicle_file",
    "normalize_power", "open_circuit_voltage", "optimal_speeds",
    "parse_battery_designator", "parse_vehicle_text", "read_discharge_log",
    "read_thrust_log", "relative_capacity_cubic", "simulate_discharge",
    "sweep", "write_trace_csv",
]
