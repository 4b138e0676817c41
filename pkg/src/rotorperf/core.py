"""Domain types, unit conventions, and built-in coefficient tables.

Unit conventions used throughout the package:

* pack power is in W, per-cell normalized power in W/Ah
  (pack power divided by cell count and per-cell capacity),
* consumed per-cell energy is in kJ/Ah, so a constant per-cell power P
  held for t seconds consumes ``P * t / 1000`` kJ/Ah,
* speeds in m/s, masses in kg, lengths in m, except the reference
  surface area, which is carried in cm^2.

All types are immutable values and safe to share between threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import InvalidParameterError

#: Nominal LiPo cell voltage used when converting effective amp-hours
#: into energy for the endurance formula.
NOMINAL_CELL_VOLTAGE = 3.7

#: Default end-of-discharge terminal voltage per cell.
DEFAULT_CUTOFF_VOLTAGE = 3.5

#: Default air density (kg/m^3). Chosen so the built-in coefficients and
#: reference vehicle data are mutually consistent; override through
#: :class:`Environment` for other atmospheres.
DEFAULT_AIR_DENSITY = 1.2

#: Standard gravity (m/s^2).
STANDARD_GRAVITY = 9.81


@dataclass(frozen=True)
class Environment:
    """Ambient conditions entering the hover model."""

    air_density: float = DEFAULT_AIR_DENSITY
    gravity: float = STANDARD_GRAVITY

    def __post_init__(self):
        if not self.air_density > 0:
            raise InvalidParameterError(f"air_density must be > 0, got {self.air_density}")
        # gravity 0 is allowed: it is the zero-thrust limit probe
        if self.gravity < 0:
            raise InvalidParameterError(f"gravity must be >= 0, got {self.gravity}")


_DEFAULT_ENVIRONMENT = Environment()


def default_environment() -> Environment:
    """Environment with air density 1.2 kg/m^3 and gravity 9.81 m/s^2."""
    return _DEFAULT_ENVIRONMENT


_DESIGNATOR_RE = re.compile(r"^\s*(\d+)\s*[sS]\s*(?:(\d+)\s*[pP])?\s*$")


def parse_battery_designator(text: str) -> tuple[int, int]:
    """Parse a compact pack designator such as ``"4S1P"`` or ``"6S2P"``.

    A bare series count (``"4S"``) implies a single parallel string.
    Returns ``(series_count, parallel_count)``.
    """
    m = _DESIGNATOR_RE.match(text)
    if m is None:
        raise InvalidParameterError(f"unrecognized battery designator: {text!r}")
    series = int(m.group(1))
    parallel = int(m.group(2)) if m.group(2) else 1
    if series < 1 or parallel < 1:
        raise InvalidParameterError(f"battery designator counts must be >= 1: {text!r}")
    return series, parallel


@dataclass(frozen=True)
class BatteryPack:
    """Series/parallel cell topology and pack capacity.

    ``pack_capacity_ah`` is the labelled capacity of the whole pack;
    the per-cell capacity is ``pack_capacity_ah / parallel_count``.
    """

    series_count: int
    parallel_count: int
    pack_capacity_ah: float
    cutoff_voltage_per_cell: float = DEFAULT_CUTOFF_VOLTAGE
    nominal_cell_voltage: float = NOMINAL_CELL_VOLTAGE

    def __post_init__(self):
        if self.series_count < 1:
            raise InvalidParameterError(f"series_count must be >= 1, got {self.series_count}")
        if self.parallel_count < 1:
            raise InvalidParameterError(f"parallel_count must be >= 1, got {self.parallel_count}")
        if not self.pack_capacity_ah > 0:
            raise InvalidParameterError(
                f"pack_capacity_ah must be > 0, got {self.pack_capacity_ah}")
        if not 0 < self.cutoff_voltage_per_cell < 4.2:
            raise InvalidParameterError(
                f"cutoff_voltage_per_cell must be in (0, 4.2), got {self.cutoff_voltage_per_cell}")

    @property
    def cell_count(self) -> int:
        return self.series_count * self.parallel_count

    @property
    def cell_capacity_ah(self) -> float:
        return self.pack_capacity_ah / self.parallel_count

    @property
    def designator(self) -> str:
        return f"{self.series_count}S{self.parallel_count}P"

    @classmethod
    def from_designator(cls, designator: str, pack_capacity_ah: float, **kwargs) -> "BatteryPack":
        series, parallel = parse_battery_designator(designator)
        return cls(series, parallel, pack_capacity_ah, **kwargs)


@dataclass(frozen=True)
class VehicleSpec:
    """Physical description of a multirotor, the input to the estimator."""

    mass_kg: float
    rotor_count: int
    propeller_radius_m: float
    surface_area_cm2: float
    pack: BatteryPack
    propeller_figure_of_merit: float = 0.6
    motor_efficiency_const: float = 0.75

    def __post_init__(self):
        if not self.mass_kg > 0:
            raise InvalidParameterError(f"mass_kg must be > 0, got {self.mass_kg}")
        if self.rotor_count < 1:
            raise InvalidParameterError(f"rotor_count must be >= 1, got {self.rotor_count}")
        if not self.propeller_radius_m > 0:
            raise InvalidParameterError(
                f"propeller_radius_m must be > 0, got {self.propeller_radius_m}")
        if not self.surface_area_cm2 > 0:
            raise InvalidParameterError(
                f"surface_area_cm2 must be > 0, got {self.surface_area_cm2}")
        if not 0 < self.propeller_figure_of_merit <= 1:
            raise InvalidParameterError(
                f"propeller_figure_of_merit must be in (0, 1], got {self.propeller_figure_of_merit}")
        if not 0 < self.motor_efficiency_const <= 1:
            raise InvalidParameterError(
                f"motor_efficiency_const must be in (0, 1], got {self.motor_efficiency_const}")


@dataclass(frozen=True)
class BatteryParams:
    """Coefficients of the one-time-constant cell model.

    ``a0..a3`` form the open-circuit voltage polynomial in consumed
    per-cell energy (kJ/Ah): ``U0 = a0 + a1*E + a2*E^2 + a3*E^3``.
    ``b0..b2`` and ``r_min`` form the internal-resistance model
    ``R0 = max(b0 + b1*P_avg + b2*C_cell, r_min)`` with the running-mean
    per-cell power in W/Ah and cell capacity in Ah. ``tau_rc`` (s) and
    ``k`` (V per W/Ah) describe the single RC lag on the cell voltage.
    """

    a0: float
    a1: float
    a2: float
    a3: float
    b0: float
    b1: float
    b2: float
    r_min: float
    tau_rc: float
    k: float

    def __post_init__(self):
        if not self.r_min > 0:
            raise InvalidParameterError(f"r_min must be > 0, got {self.r_min}")
        if not self.tau_rc > 0:
            raise InvalidParameterError(f"tau_rc must be > 0, got {self.tau_rc}")
        if not 3.0 <= self.a0 <= 4.4:
            raise InvalidParameterError(f"a0 must be in [3.0, 4.4] V, got {self.a0}")


_BUILTIN_BATTERY_PARAMS = BatteryParams(
    a0=4.2,
    a1=-0.1102178,
    a2=0.0103368,
    a3=-4.3778e-4,
    b0=0.0015778,
    b1=-7.7608e-5,
    b2=0.0069498,
    r_min=0.0045,
    tau_rc=3.3,
    k=0.00104846,
)


def builtin_battery_params() -> BatteryParams:
    """Cell-model coefficients identified from bench discharge tests of
    ten LiPo packs (4S1P 1.55 Ah up to 6S4P 5.2 Ah, 5 C to 70 C)."""
    return _BUILTIN_BATTERY_PARAMS


@dataclass(frozen=True)
class EmpiricalCoeffs:
    """Fitted coefficients of the simplified cruise-performance model.

    ``power_ratio_endurance`` and ``power_ratio_range`` scale hover power
    to the best-endurance and best-range operating points (their fit
    standard deviations are kept as metadata and surfaced in reports as
    an uncertainty band). ``c0e..c2e`` / ``c0r..c2r`` give the inverse
    normalized optimal speed as a linear function of the hover induced
    velocity (m/s) and surface area (cm^2). ``d0..d3`` form the cubic
    relative-capacity shortcut in per-cell power (W/Ah).
    """

    power_ratio_endurance: float = 0.914
    power_ratio_range: float = 1.092
    power_ratio_endurance_std: float = 0.0323
    power_ratio_range_std: float = 0.0361
    c0e: float = 0.10188
    c1e: float = 0.071358
    c2e: float = 0.0007381
    c0r: float = 0.041546
    c1r: float = 0.041122
    c2r: float = 0.00053292
    d0: float = 0.9876
    d1: float = -0.0020
    d2: float = -5.2484e-05
    d3: float = 1.2230e-07

    def __post_init__(self):
        if not self.power_ratio_endurance < 1 < self.power_ratio_range:
            raise InvalidParameterError(
                "power ratios must straddle 1: endurance "
                f"{self.power_ratio_endurance}, range {self.power_ratio_range}")
        for name in ("c0e", "c1e", "c2e", "c0r", "c1r", "c2r"):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(f"{name} must be > 0, got {getattr(self, name)}")


_BUILTIN_EMPIRICAL_COEFFS = EmpiricalCoeffs()


def builtin_empirical_coeffs() -> EmpiricalCoeffs:
    """Cruise-model coefficients fitted on simulated straight-line flights
    of dozens of multicopter configurations."""
    return _BUILTIN_EMPIRICAL_COEFFS
