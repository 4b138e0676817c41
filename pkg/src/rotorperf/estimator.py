"""Eight-step range/endurance/optimal-speed estimation pipeline.

The pipeline chains the public operations of the other modules:

1. hover induced velocity and mechanical hover power,
2. mechanical power at the best-endurance and best-range points
   (fixed ratios of hover power),
3. electrical power through the constant motor efficiency,
4. per-cell normalized power,
5. effective capacity from the cubic shortcut,
6. flight time from effective capacity at the nominal pack voltage,
7. optimal speeds from the inverse-normalized-speed model,
8. maximum range as flight time times best-range speed.

Every intermediate lands in the report. The hover power of step 1 may be
injected to reproduce externally given numbers, and an optional
cross-check simulates the full cell model at constant electrical power
and reports the simulated flight times alongside the cubic-based ones.
"""

from __future__ import annotations

import csv
import dataclasses
import io
from dataclasses import dataclass

from . import aero, battery, motor
from .core import (
    BatteryPack,
    BatteryParams,
    EmpiricalCoeffs,
    Environment,
    VehicleSpec,
    builtin_battery_params,
    builtin_empirical_coeffs,
    default_environment,
)
from .errors import InfeasiblePowerError, InvalidParameterError

SWEEPABLE_PARAMETERS = ("mass", "capacity", "surface_area")


@dataclass(frozen=True)
class PerformanceReport:
    """All intermediates and results of one estimation run."""

    induced_velocity_m_s: float
    hover_power_w: float
    hover_power_source: str            # "computed" or "injected"
    power_endurance_w: float
    power_range_w: float
    power_endurance_band_w: tuple[float, float]
    power_range_band_w: tuple[float, float]
    motor_power_endurance_w: float
    motor_power_range_w: float
    cell_power_endurance_w_per_ah: float
    cell_power_range_w_per_ah: float
    relative_capacity_endurance: float
    relative_capacity_range: float
    effective_capacity_endurance_ah: float
    effective_capacity_range_ah: float
    endurance_s: float
    range_time_s: float
    speed_endurance_m_s: float
    speed_range_m_s: float
    flight_range_m: float
    battery_model: str                 # "cubic" or "cubic+otc"
    otc_endurance_s: float | None = None
    otc_range_time_s: float | None = None
    warnings: tuple[str, ...] = ()


def flight_time_s(effective_capacity_ah: float, pack: BatteryPack,
                  motor_power_w: float) -> float:
    """Flight time from effective capacity at the nominal pack voltage."""
    return (effective_capacity_ah * pack.nominal_cell_voltage
            * pack.series_count * 3600.0 / motor_power_w)


def _otc_flight_time(pack: BatteryPack, params: BatteryParams, motor_power_w: float,
                     cubic_time_s: float, dt: float) -> tuple[float | None, str | None]:
    horizon = max(3600.0, 2.5 * cubic_time_s)
    profile = battery.PowerProfile.constant(motor_power_w, horizon)
    trace = battery.simulate_discharge(pack, params, profile, dt=dt)
    if trace.terminal is battery.DischargeEnd.INFEASIBLE_POWER:
        raise InfeasiblePowerError(
            battery.normalize_power(motor_power_w, pack),
            trace.infeasible_max_w_per_ah, trace.infeasible_time_s)
    if trace.terminal is battery.DischargeEnd.PROFILE_END:
        return None, (f"full-battery cross-check did not reach cutoff within "
                      f"{horizon:.0f} s at {motor_power_w:.1f} W")
    return float(trace.time_s[-1]), None


def estimate(spec: VehicleSpec, env: Environment | None = None,
             coeffs: EmpiricalCoeffs | None = None,
             params: BatteryParams | None = None, *,
             inject_hover_power_w: float | None = None,
             full_battery: bool = False,
             dt: float = battery.DEFAULT_TIME_STEP) -> PerformanceReport:
    """Run the eight-step pipeline for one vehicle.

    ``inject_hover_power_w`` replaces the computed mechanical hover power
    in steps 2-8 (the induced velocity stays momentum-theory based).
    ``full_battery`` additionally simulates the full cell model at the
    electrical operating powers and reports the simulated flight times;
    an infeasible demand on that path raises
    :class:`~rotorperf.errors.InfeasiblePowerError`.
    """
    env = default_environment() if env is None else env
    coeffs = builtin_empirical_coeffs() if coeffs is None else coeffs
    params = builtin_battery_params() if params is None else params
    pack = spec.pack
    warnings: list[str] = []

    hover = aero.hover_point(spec, env)
    if inject_hover_power_w is None:
        p_h, source = hover.hover_power_w, "computed"
    else:
        if not inject_hover_power_w > 0:
            raise InvalidParameterError(
                f"injected hover power must be > 0, got {inject_hover_power_w}")
        p_h, source = inject_hover_power_w, "injected"

    p_e, p_r = aero.cruise_powers(p_h, coeffs)
    band_e, band_r = aero.cruise_power_bands(p_h, coeffs)
    eta_m = spec.motor_efficiency_const
    p_mot_e = motor.electrical_from_mechanical(p_e, eta_m)
    p_mot_r = motor.electrical_from_mechanical(p_r, eta_m)
    p_cell_e = battery.normalize_power(p_mot_e, pack)
    p_cell_r = battery.normalize_power(p_mot_r, pack)

    rel_e = battery.relative_capacity_cubic(coeffs, p_cell_e)
    rel_r = battery.relative_capacity_cubic(coeffs, p_cell_r)
    for label, rel in (("endurance", rel_e), ("range", rel_r)):
        if not rel.in_fit_domain:
            warnings.append(f"{label} per-cell power is outside the cubic fit "
                            f"domain {battery.CUBIC_FIT_DOMAIN}")
    c_eff_e = rel_e.kappa * pack.pack_capacity_ah
    c_eff_r = rel_r.kappa * pack.pack_capacity_ah

    t_e = flight_time_s(c_eff_e, pack, p_mot_e)
    t_r = flight_time_s(c_eff_r, pack, p_mot_r)
    v_e, v_r = aero.optimal_speeds(hover.induced_velocity_m_s,
                                   spec.surface_area_cm2, coeffs)
    x_r = t_r * v_r

    battery_model = "cubic"
    t_e_otc = t_r_otc = None
    if full_battery:
        battery_model = "cubic+otc"
        t_e_otc, warn = _otc_flight_time(pack, params, p_mot_e, t_e, dt)
        if warn:
            warnings.append(warn)
        t_r_otc, warn = _otc_flight_time(pack, params, p_mot_r, t_r, dt)
        if warn:
            warnings.append(warn)

    return PerformanceReport(
        induced_velocity_m_s=hover.induced_velocity_m_s,
        hover_power_w=p_h,
        hover_power_source=source,
        power_endurance_w=p_e,
        power_range_w=p_r,
        power_endurance_band_w=band_e,
        power_range_band_w=band_r,
        motor_power_endurance_w=p_mot_e,
        motor_power_range_w=p_mot_r,
        cell_power_endurance_w_per_ah=p_cell_e,
        cell_power_range_w_per_ah=p_cell_r,
        relative_capacity_endurance=rel_e.kappa,
        relative_capacity_range=rel_r.kappa,
        effective_capacity_endurance_ah=c_eff_e,
        effective_capacity_range_ah=c_eff_r,
        endurance_s=t_e,
        range_time_s=t_r,
        speed_endurance_m_s=v_e,
        speed_range_m_s=v_r,
        flight_range_m=x_r,
        battery_model=battery_model,
        otc_endurance_s=t_e_otc,
        otc_range_time_s=t_r_otc,
        warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class SweepPoint:
    """One grid point of a parameter sweep; ``report`` is None when the
    point failed, with the reason in ``error``."""

    value: float
    report: PerformanceReport | None
    error: str | None = None


def sweep(spec: VehicleSpec, parameter: str, grid, **options) -> list[SweepPoint]:
    """Estimate along a grid of one vehicle parameter.

    ``parameter`` is one of ``mass`` (kg), ``capacity`` (Ah), or
    ``surface_area`` (cm^2). Point failures are recorded in the returned
    list and do not stop the sweep.
    """
    if parameter not in SWEEPABLE_PARAMETERS:
        raise InvalidParameterError(
            f"parameter must be one of {SWEEPABLE_PARAMETERS}, got {parameter!r}")
    grid = list(grid)
    if not grid:
        raise InvalidParameterError("sweep grid is empty")
    points: list[SweepPoint] = []
    for value in grid:
        try:
            if parameter == "mass":
                varied = dataclasses.replace(spec, mass_kg=value)
            elif parameter == "capacity":
                varied = dataclasses.replace(
                    spec, pack=dataclasses.replace(spec.pack, pack_capacity_ah=value))
            else:
                varied = dataclasses.replace(spec, surface_area_cm2=value)
            points.append(SweepPoint(value, estimate(varied, **options)))
        except Exception as err:
            points.append(SweepPoint(value, None, str(err)))
    return points


# --- serialization ------------------------------------------------------------

REPORT_CSV_COLUMNS = (
    "induced_velocity_m_s",
    "hover_power_w",
    "hover_power_source",
    "power_endurance_w",
    "power_endurance_low_w",
    "power_endurance_high_w",
    "power_range_w",
    "power_range_low_w",
    "power_range_high_w",
    "motor_power_endurance_w",
    "motor_power_range_w",
    "cell_power_endurance_w_per_ah",
    "cell_power_range_w_per_ah",
    "relative_capacity_endurance",
    "relative_capacity_range",
    "effective_capacity_endurance_ah",
    "effective_capacity_range_ah",
    "endurance_s",
    "range_time_s",
    "speed_endurance_m_s",
    "speed_range_m_s",
    "flight_range_m",
    "battery_model",
    "otc_endurance_s",
    "otc_range_time_s",
    "warnings",
)


def _report_values(report: PerformanceReport) -> dict[str, object]:
    values = {
        "power_endurance_low_w": report.power_endurance_band_w[0],
        "power_endurance_high_w": report.power_endurance_band_w[1],
        "power_range_low_w": report.power_range_band_w[0],
        "power_range_high_w": report.power_range_band_w[1],
        "warnings": "; ".join(report.warnings),
    }
    for column in REPORT_CSV_COLUMNS:
        if column not in values:
            values[column] = getattr(report, column)
    return values


def _format_cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_csv_header() -> str:
    return ",".join(REPORT_CSV_COLUMNS)


def report_to_csv_row(report: PerformanceReport) -> str:
    values = _report_values(report)
    buf = io.StringIO()
    csv.writer(buf, lineterminator="").writerow(
        [_format_cell(values[c]) for c in REPORT_CSV_COLUMNS])
    return buf.getvalue()


def report_to_kv_text(report: PerformanceReport) -> str:
    """Key/value form of the report; empty fields are omitted."""
    values = _report_values(report)
    cells = ((c, _format_cell(values[c])) for c in REPORT_CSV_COLUMNS)
    return "".join(f"{c} = {cell}\n" for c, cell in cells if cell != "")
