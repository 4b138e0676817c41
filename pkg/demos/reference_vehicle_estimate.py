#!/usr/bin/env python3
"""Estimate range, endurance, and optimal speed for the packaged
reference vehicle (DJI Mavic 2), then sweep its mass.

The estimate is run twice: once with the mechanical hover power computed
from momentum theory, and once with an externally given hover power, to
show how the injection option feeds the downstream chain.
"""

from pathlib import Path

import rotorperf as rp
from rotorperf import estimator, fixtures

OUT_DIR = Path(__file__).resolve().parent / "out"


def show(label, report):
    print(f"--- {label} ---")
    print(f"hover: v_ih = {report.induced_velocity_m_s:.2f} m/s, "
          f"P_h = {report.hover_power_w:.1f} W [{report.hover_power_source}]")
    print(f"cruise power: {report.power_endurance_w:.1f} W (endurance), "
          f"{report.power_range_w:.1f} W (range)")
    print(f"electrical:   {report.motor_power_endurance_w:.1f} W / "
          f"{report.motor_power_range_w:.1f} W")
    print(f"endurance t_e = {report.endurance_s:.0f} s "
          f"({report.endurance_s / 60:.1f} min) at {report.speed_endurance_m_s:.1f} m/s")
    print(f"range     x_r = {report.flight_range_m / 1000:.2f} km "
          f"in {report.range_time_s:.0f} s at {report.speed_range_m_s:.1f} m/s")
    print()


def main():
    spec, env = fixtures.load_dji_mavic2()
    print(f"vehicle: {spec.mass_kg} kg, {spec.rotor_count} rotors of "
          f"r = {spec.propeller_radius_m} m, pack {spec.pack.designator} "
          f"{spec.pack.pack_capacity_ah} Ah\n")

    show("momentum-theory hover power", rp.estimate(spec, env))
    show("hover power injected at 81.9 W",
         rp.estimate(spec, env, inject_hover_power_w=81.9))

    # the full-battery cross-check simulates the cell model at the
    # electrical operating powers instead of using the cubic shortcut
    report = rp.estimate(spec, env, full_battery=True)
    print(f"full-battery cross-check: t_e = {report.otc_endurance_s:.0f} s "
          f"(cubic said {report.endurance_s:.0f} s)\n")

    OUT_DIR.mkdir(exist_ok=True)
    sweep_path = OUT_DIR / "mass_sweep.csv"
    grid = [0.5 + 0.1 * i for i in range(16)]
    with open(sweep_path, "w", encoding="utf-8") as fh:
        fh.write("mass_kg," + estimator.report_csv_header() + "\n")
        for point in rp.sweep(spec, "mass", grid, env=env):
            fh.write(f"{point.value!r},{estimator.report_to_csv_row(point.report)}\n")
    print(f"mass sweep (0.5..2.0 kg) written to {sweep_path}")
    print("heavier airframes lose endurance twice over: the hover power grows "
          "as m^1.5 and the higher per-cell power also shrinks the usable "
          "capacity.")


if __name__ == "__main__":
    main()
