"""Flat key/value vehicle description files.

The format is one ``key = value`` pair per line; blank lines and ``#``
comments are ignored. Recognized keys::

    mass_kg                 vehicle take-off mass, kg (required)
    rotor_count             number of rotors (required)
    propeller_radius_m      propeller radius, m     } exactly one of
    propeller_diameter_in   propeller diameter, in  } these two
    surface_area_cm2        reference surface area, cm^2 (required)
    battery                 pack designator, e.g. 4S1P (required)
    capacity_ah             pack capacity, Ah (required)
    eta_p                   propeller figure of merit (optional)
    eta_m                   constant motor efficiency (optional)
    rho                     air density override, kg/m^3 (optional)
    cutoff_v_per_cell       end-of-discharge voltage (optional)

Unknown keys are rejected so typos cannot silently fall back to defaults.
"""

from __future__ import annotations

import os

from .core import BatteryPack, Environment, VehicleSpec, default_environment, parse_battery_designator
from .errors import FileFormatError, UnknownKeyError

INCHES_TO_M = 0.0254

_REQUIRED_KEYS = {"mass_kg", "rotor_count", "surface_area_cm2", "battery", "capacity_ah"}
_OPTIONAL_KEYS = {"propeller_radius_m", "propeller_diameter_in", "eta_p", "eta_m",
                  "rho", "cutoff_v_per_cell"}
KNOWN_KEYS = frozenset(_REQUIRED_KEYS | _OPTIONAL_KEYS)


def parse_kv_text(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines into a dict, preserving value strings."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FileFormatError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise FileFormatError(f"line {lineno}: empty key or value in {raw!r}")
        if key in out:
            raise FileFormatError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def format_kv_text(pairs: dict[str, object]) -> str:
    """Render a dict as ``key = value`` lines (floats via repr)."""
    lines = [f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}"
             for key, value in pairs.items()]
    return "\n".join(lines) + "\n"


def _as_float(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise FileFormatError(f"key {key!r}: expected a number, got {value!r}") from None


def _as_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise FileFormatError(f"key {key!r}: expected an integer, got {value!r}") from None


def parse_vehicle_text(text: str) -> tuple[VehicleSpec, Environment]:
    """Build a :class:`VehicleSpec` and its :class:`Environment` from file text."""
    pairs = parse_kv_text(text)
    for key in pairs:
        if key not in KNOWN_KEYS:
            raise UnknownKeyError(key)
    missing = _REQUIRED_KEYS - pairs.keys()
    if missing:
        raise FileFormatError(f"missing required keys: {', '.join(sorted(missing))}")

    if "propeller_radius_m" in pairs and "propeller_diameter_in" in pairs:
        raise FileFormatError(
            "give either propeller_radius_m or propeller_diameter_in, not both")
    if "propeller_radius_m" in pairs:
        radius = _as_float("propeller_radius_m", pairs["propeller_radius_m"])
    elif "propeller_diameter_in" in pairs:
        radius = _as_float("propeller_diameter_in", pairs["propeller_diameter_in"]) * INCHES_TO_M / 2
    else:
        raise FileFormatError("missing propeller size: propeller_radius_m or propeller_diameter_in")

    series, parallel = parse_battery_designator(pairs["battery"])
    pack_kwargs = {}
    if "cutoff_v_per_cell" in pairs:
        pack_kwargs["cutoff_voltage_per_cell"] = _as_float(
            "cutoff_v_per_cell", pairs["cutoff_v_per_cell"])
    pack = BatteryPack(series, parallel,
                       _as_float("capacity_ah", pairs["capacity_ah"]), **pack_kwargs)

    spec_kwargs = {}
    if "eta_p" in pairs:
        spec_kwargs["propeller_figure_of_merit"] = _as_float("eta_p", pairs["eta_p"])
    if "eta_m" in pairs:
        spec_kwargs["motor_efficiency_const"] = _as_float("eta_m", pairs["eta_m"])
    spec = VehicleSpec(
        mass_kg=_as_float("mass_kg", pairs["mass_kg"]),
        rotor_count=_as_int("rotor_count", pairs["rotor_count"]),
        propeller_radius_m=radius,
        surface_area_cm2=_as_float("surface_area_cm2", pairs["surface_area_cm2"]),
        pack=pack,
        **spec_kwargs,
    )

    env = default_environment()
    if "rho" in pairs:
        env = Environment(air_density=_as_float("rho", pairs["rho"]), gravity=env.gravity)
    return spec, env


def load_vehicle_file(path: str | os.PathLike) -> tuple[VehicleSpec, Environment]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_vehicle_text(fh.read())
