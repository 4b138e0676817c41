"""Command-line front end.

Subcommands: ``estimate``, ``discharge``, ``capacity-sweep``,
``fit-motor``, ``fit-battery``. Exit codes: 0 success, 2 input or parse
error, 3 infeasible model condition, 4 fit failure. Nonzero exits always
put a diagnostic on stderr. All numeric output is formatted
deterministically, so identical inputs give byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import battery, estimator, identification
from .core import (
    BatteryPack,
    Environment,
    builtin_battery_params,
    builtin_empirical_coeffs,
)
from .errors import (
    CapacityUndefinedError,
    FileFormatError,
    FitError,
    InfeasiblePowerError,
    InvalidParameterError,
)
from .specfile import format_kv_text, load_vehicle_file, parse_kv_text

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_INFEASIBLE = 3
EXIT_FIT_FAILURE = 4


@dataclass(frozen=True)
class CommandOutcome:
    exit_code: int
    message: str
    artifacts: tuple[str, ...] = ()
    diagnostic: str | None = None


def _fmt(x: float, digits: int = 6) -> str:
    return f"{x:.{digits}g}"


def _pack_from_args(args) -> BatteryPack:
    if args.battery is None or args.capacity_ah is None:
        raise InvalidParameterError("--battery and --capacity-ah are required")
    kwargs = {}
    if getattr(args, "cutoff_v_per_cell", None) is not None:
        kwargs["cutoff_voltage_per_cell"] = args.cutoff_v_per_cell
    return BatteryPack.from_designator(args.battery, args.capacity_ah, **kwargs)


# --- estimate -----------------------------------------------------------------

def _estimate_trace_lines(report: estimator.PerformanceReport, pack: BatteryPack,
                          eta_m: float) -> list[str]:
    coeffs = builtin_empirical_coeffs()
    r = report
    lines = [
        (f"step 1  v_ih = sqrt(m*g/(2*rho*pi*r_prop^2*N_r)) = "
         f"{_fmt(r.induced_velocity_m_s)} m/s ; "
         f"P_h = (m*g)^1.5/(eta_p*sqrt(2*rho*pi*N_r)*r_prop) = "
         f"{_fmt(r.hover_power_w)} W [{r.hover_power_source}]"),
        (f"step 2  P_e = {coeffs.power_ratio_endurance}*P_h = {_fmt(r.power_endurance_w)} W ; "
         f"P_r = {coeffs.power_ratio_range}*P_h = {_fmt(r.power_range_w)} W"),
        (f"step 3  P_mot_e = P_e/eta_m({_fmt(eta_m)}) = {_fmt(r.motor_power_endurance_w)} W ; "
         f"P_mot_r = P_r/eta_m = {_fmt(r.motor_power_range_w)} W"),
        (f"step 4  P_cell_e = P_mot_e/(N_cell*C_cell) = "
         f"{_fmt(r.cell_power_endurance_w_per_ah)} W/Ah ; "
         f"P_cell_r = {_fmt(r.cell_power_range_w_per_ah)} W/Ah"),
        (f"step 5  kappa_e = d0+d1*P+d2*P^2+d3*P^3 = {_fmt(r.relative_capacity_endurance)} ; "
         f"C_eff_e = {_fmt(r.effective_capacity_endurance_ah)} Ah ; "
         f"C_eff_r = {_fmt(r.effective_capacity_range_ah)} Ah"),
        (f"step 6  t_e = C_eff_e*{pack.nominal_cell_voltage}V*N_s*3600/P_mot_e = "
         f"{_fmt(r.endurance_s)} s ; t_r = {_fmt(r.range_time_s)} s"),
        (f"step 7  v_e = v_ih/(c0e+c1e*v_ih+c2e*A) = {_fmt(r.speed_endurance_m_s)} m/s ; "
         f"v_r = v_ih/(c0r+c1r*v_ih+c2r*A) = {_fmt(r.speed_range_m_s)} m/s"),
        (f"step 8  x_r = t_r*v_r = {_fmt(r.flight_range_m)} m "
         f"({_fmt(r.flight_range_m / 1000.0, 4)} km)"),
    ]
    if r.otc_endurance_s is not None or r.otc_range_time_s is not None:
        te = "n/a" if r.otc_endurance_s is None else f"{_fmt(r.otc_endurance_s)} s"
        tr = "n/a" if r.otc_range_time_s is None else f"{_fmt(r.otc_range_time_s)} s"
        lines.append(f"full-battery cross-check  t_e = {te} ; t_r = {tr}")
    for warning in r.warnings:
        lines.append(f"warning: {warning}")
    return lines


def cmd_estimate(args) -> CommandOutcome:
    spec, env = load_vehicle_file(args.spec_path)
    if args.rho is not None:
        env = Environment(air_density=args.rho, gravity=env.gravity)
    report = estimator.estimate(
        spec, env,
        inject_hover_power_w=args.inject_hover_power,
        full_battery=args.full_battery)
    lines = _estimate_trace_lines(report, spec.pack, spec.motor_efficiency_const)
    artifacts = ()
    if args.output:
        if args.format == "kv":
            Path(args.output).write_text(estimator.report_to_kv_text(report),
                                         encoding="utf-8")
        else:
            Path(args.output).write_text(
                estimator.report_csv_header() + "\n"
                + estimator.report_to_csv_row(report) + "\n", encoding="utf-8")
        artifacts = (args.output,)
        lines.append(f"report written to {args.output}")
    return CommandOutcome(EXIT_OK, "\n".join(lines), artifacts)


# --- discharge ----------------------------------------------------------------

def _profile_from_args(args) -> battery.PowerProfile:
    if (args.power_w is None) == (args.profile is None):
        raise InvalidParameterError("give exactly one of --power-w or --profile")
    if args.power_w is not None:
        if args.power_w < 0:
            raise InvalidParameterError(f"--power-w must be >= 0, got {args.power_w}")
        return battery.PowerProfile.constant(args.power_w, args.max_time_s)
    return battery.PowerProfile.from_csv(args.profile, duration_s=args.max_time_s)


def cmd_discharge(args) -> CommandOutcome:
    pack = _pack_from_args(args)
    profile = _profile_from_args(args)
    trace = battery.simulate_discharge(pack, builtin_battery_params(), profile,
                                       dt=args.dt)
    lines = []
    artifacts = ()
    if args.output:
        rows = battery.write_trace_csv(trace, args.output)
        artifacts = (args.output,)
        lines.append(f"trace written to {args.output} ({rows} rows)")
    if trace.sample_count:
        lines.append(f"end of trace: t = {_fmt(float(trace.time_s[-1]))} s, "
                     f"U_pack = {_fmt(float(trace.u_pack_v[-1]))} V "
                     f"[{trace.terminal.value}]")
    try:
        cap = battery.effective_capacity(trace, pack)
        lines.append(f"effective capacity: {_fmt(cap.watt_hours)} Wh = "
                     f"{_fmt(cap.amp_hours)} Ah (relative {_fmt(cap.relative_capacity, 4)})")
    except CapacityUndefinedError as err:
        lines.append(f"effective capacity: undefined ({err})")
    if trace.terminal is battery.DischargeEnd.INFEASIBLE_POWER:
        diag = (f"infeasible power at t = {_fmt(trace.infeasible_time_s)} s: demand "
                f"exceeds the deliverable maximum "
                f"{_fmt(trace.infeasible_max_w_per_ah)} W/Ah; partial trace flagged")
        return CommandOutcome(EXIT_INFEASIBLE, "\n".join(lines), artifacts, diag)
    return CommandOutcome(EXIT_OK, "\n".join(lines), artifacts)


# --- capacity sweep -----------------------------------------------------------

def cmd_capacity_sweep(args) -> CommandOutcome:
    pack = _pack_from_args(args)
    params = builtin_battery_params()
    coeffs = builtin_empirical_coeffs()
    if args.steps < 1:
        raise InvalidParameterError(f"--steps must be >= 1, got {args.steps}")
    if args.power_min_w <= 0 or args.power_max_w < args.power_min_w:
        raise InvalidParameterError("need 0 < --power-min-w <= --power-max-w")
    grid = np.linspace(args.power_min_w, args.power_max_w, args.steps)
    rows = []
    for p_pack in grid:
        p_cell = battery.normalize_power(float(p_pack), pack)
        kappa_cubic = battery.relative_capacity_cubic(coeffs, p_cell).kappa
        profile = battery.PowerProfile.constant(float(p_pack), args.max_time_s)
        trace = battery.simulate_discharge(pack, params, profile, dt=args.dt)
        if trace.terminal is battery.DischargeEnd.REACHED_CUTOFF:
            cap = battery.effective_capacity(trace, pack)
            rows.append((float(p_pack), repr(cap.watt_hours),
                         repr(cap.relative_capacity), repr(kappa_cubic), "ok"))
        elif trace.terminal is battery.DischargeEnd.INFEASIBLE_POWER:
            rows.append((float(p_pack), "", "", repr(kappa_cubic), "infeasible_power"))
        else:
            rows.append((float(p_pack), "", "", repr(kappa_cubic), "cutoff_not_reached"))
    lines = [f"{len(rows)} grid points from {_fmt(args.power_min_w)} W "
             f"to {_fmt(args.power_max_w)} W"]
    artifacts = ()
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write("pack_power_w,effective_wh,kappa_full,kappa_cubic,status\n")
            for p, wh, kf, kc, status in rows:
                fh.write(f"{p!r},{wh},{kf},{kc},{status}\n")
        artifacts = (args.output,)
        lines.append(f"sweep written to {args.output}")
    for p, wh, kf, kc, status in rows:
        lines.append(f"  {_fmt(p)} W: " + (f"{wh} Wh (kappa {kf})" if status == "ok"
                                           else status) + f", cubic kappa {kc}")
    return CommandOutcome(EXIT_OK, "\n".join(lines), artifacts)


# --- fits ---------------------------------------------------------------------

def cmd_fit_motor(args) -> CommandOutcome:
    log = identification.read_thrust_log(args.log_path)
    coeffs, report = identification.fit_motor(log)
    lines = [f"c_d = {coeffs.c_d!r}", f"m0 = {coeffs.m0!r}", f"m1 = {coeffs.m1!r}",
             f"m2 = {coeffs.m2!r}", f"power rmse = {_fmt(report.rmse)} W"]
    lines += [f"warning: {w}" for w in report.warnings]
    artifacts = ()
    if args.output:
        text = format_kv_text({"c_d": coeffs.c_d, "m0": coeffs.m0, "m1": coeffs.m1,
                               "m2": coeffs.m2, "rmse_w": report.rmse})
        text += "".join(f"# warning: {w}\n" for w in report.warnings)
        Path(args.output).write_text(text, encoding="utf-8")
        artifacts = (args.output,)
        lines.append(f"coefficients written to {args.output}")
    return CommandOutcome(EXIT_OK, "\n".join(lines), artifacts)


def _pack_for_log(path: Path, args) -> BatteryPack:
    sidecar = path.with_suffix(".pack")
    if sidecar.exists():
        pairs = parse_kv_text(sidecar.read_text(encoding="utf-8"))
        if "battery" not in pairs or "capacity_ah" not in pairs:
            raise FileFormatError(f"{sidecar}: needs keys 'battery' and 'capacity_ah'")
        return BatteryPack.from_designator(pairs["battery"], float(pairs["capacity_ah"]))
    return _pack_from_args(args)


def cmd_fit_battery(args) -> CommandOutcome:
    log_dir = Path(args.log_dir)
    if not log_dir.is_dir():
        raise FileFormatError(f"{log_dir} is not a directory")
    csv_paths = sorted(log_dir.glob("*.csv"))
    if not csv_paths:
        raise FileFormatError(f"no .csv discharge logs in {log_dir}")
    logs = [identification.read_discharge_log(p, _pack_for_log(p, args))
            for p in csv_paths]
    resistance = identification.fit_battery_resistance(logs)
    params, report = identification.fit_battery_dynamics(logs, resistance)
    lines = [f"fitted {len(logs)} logs, per-cell voltage rmse = "
             f"{_fmt(report.rmse * 1000.0, 4)} mV"]
    lines += [f"warning: {w}" for w in (*resistance.warnings, *report.warnings)]
    artifacts = ()
    if args.output:
        text = format_kv_text({
            "a0": params.a0, "a1": params.a1, "a2": params.a2, "a3": params.a3,
            "b0": params.b0, "b1": params.b1, "b2": params.b2,
            "r_min": params.r_min, "tau_rc": params.tau_rc, "k": params.k,
            "rmse_v": report.rmse})
        text += "".join(f"# warning: {w}\n"
                        for w in (*resistance.warnings, *report.warnings))
        Path(args.output).write_text(text, encoding="utf-8")
        artifacts = (args.output,)
        lines.append(f"parameters written to {args.output}")
    return CommandOutcome(EXIT_OK, "\n".join(lines), artifacts)


# --- wiring -------------------------------------------------------------------

def _add_pack_flags(p: argparse.ArgumentParser, with_cutoff: bool = True):
    p.add_argument("--battery", help="pack designator, e.g. 4S1P")
    p.add_argument("--capacity-ah", type=float, help="pack capacity in Ah")
    if with_cutoff:
        p.add_argument("--cutoff-v-per-cell", type=float, default=None,
                       help="end-of-discharge voltage per cell (default 3.5)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotorperf",
        description="Multirotor range, endurance, and optimal-speed estimation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="run the eight-step performance estimate")
    p.add_argument("spec_path", help="vehicle description file")
    p.add_argument("--rho", type=float, default=None, help="air density override, kg/m^3")
    p.add_argument("--inject-hover-power", type=float, default=None,
                   help="replace the computed mechanical hover power (W)")
    p.add_argument("--full-battery", action="store_true",
                   help="also simulate the full cell model at the operating powers")
    p.add_argument("--output", default=None, help="write the report to this path")
    p.add_argument("--format", choices=("csv", "kv"), default="csv",
                   help="report file format (default csv)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("discharge", help="simulate one constant or profiled discharge")
    _add_pack_flags(p)
    p.add_argument("--power-w", type=float, default=None, help="constant pack power, W")
    p.add_argument("--profile", default=None, help="time_s,power_w profile CSV")
    p.add_argument("--dt", type=float, default=battery.DEFAULT_TIME_STEP,
                   help="integrator step, s")
    p.add_argument("--max-time-s", type=float, default=10800.0,
                   help="simulation horizon, s")
    p.add_argument("--output", default=None, help="write the trace CSV to this path")
    p.set_defaults(func=cmd_discharge)

    p = sub.add_parser("capacity-sweep",
                       help="effective capacity over a grid of constant powers")
    _add_pack_flags(p)
    p.add_argument("--power-min-w", type=float, required=True)
    p.add_argument("--power-max-w", type=float, required=True)
    p.add_argument("--steps", type=int, default=10, help="grid points (default 10)")
    p.add_argument("--dt", type=float, default=battery.DEFAULT_TIME_STEP)
    p.add_argument("--max-time-s", type=float, default=10800.0)
    p.add_argument("--output", default=None, help="write the sweep CSV to this path")
    p.set_defaults(func=cmd_capacity_sweep)

    p = sub.add_parser("fit-motor", help="fit motor-propeller coefficients from a thrust log")
    p.add_argument("log_path", help="omega_rad_s,thrust_n,torque_nm,power_w CSV")
    p.add_argument("--output", default=None, help="write coefficients to this key/value file")
    p.set_defaults(func=cmd_fit_motor)

    p = sub.add_parser("fit-battery",
                       help="two-step battery identification from discharge logs")
    p.add_argument("log_dir", help="directory of time_s,power_w,voltage_v CSVs")
    _add_pack_flags(p, with_cutoff=False)
    p.add_argument("--output", default=None, help="write parameters to this key/value file")
    p.set_defaults(func=cmd_fit_battery)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        outcome = args.func(args)
    except (FileFormatError, InvalidParameterError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (FileNotFoundError, IsADirectoryError, PermissionError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except InfeasiblePowerError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except FitError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FIT_FAILURE
    if outcome.message:
        print(outcome.message)
    if outcome.diagnostic:
        print(outcome.diagnostic, file=sys.stderr)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
