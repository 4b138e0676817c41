#!/usr/bin/env python3
"""Reconstruct constant-power discharge curves and the capacity-vs-power
(Peukert-style) characteristic of a 4S 1.8 Ah pack.

Writes one trace CSV per power level plus a capacity sweep CSV comparing
the simulated relative capacity with the cubic shortcut. If matplotlib is
imported successfully, a quick-look figure is saved as well.
"""

from pathlib import Path

import numpy as np

import rotorperf as rp

OUT_DIR = Path(__file__).resolve().parent / "out"
POWERS_W = (100.0, 200.0, 400.0, 800.0)


def main():
    OUT_DIR.mkdir(exist_ok=True)
    pack = rp.BatteryPack.from_designator("4S1P", 1.8)
    params = rp.builtin_battery_params()
    coeffs = rp.builtin_empirical_coeffs()

    traces = {}
    for power in POWERS_W:
        trace = rp.simulate_discharge(pack, params,
                                      rp.PowerProfile.constant(power, 20000.0))
        traces[power] = trace
        path = OUT_DIR / f"discharge_{power:.0f}w.csv"
        rp.write_trace_csv(trace, path)
        cap = rp.effective_capacity(trace, pack)
        print(f"{power:5.0f} W: cutoff at {trace.time_s[-1]:7.1f} s, "
              f"{cap.watt_hours:5.2f} Wh effective "
              f"({cap.relative_capacity:.0%} of nominal)  -> {path.name}")

    # capacity over a power grid: the high-rate rolloff is the Peukert
    # effect the cubic shortcut approximates
    sweep_path = OUT_DIR / "capacity_sweep.csv"
    grid = np.linspace(15.0, 500.0, 25)
    rows = []
    for power in grid:
        trace = rp.simulate_discharge(pack, params,
                                      rp.PowerProfile.constant(float(power), 20000.0))
        cap = rp.effective_capacity(trace, pack)
        p_cell = rp.normalize_power(float(power), pack)
        kappa_cubic = rp.relative_capacity_cubic(coeffs, p_cell).kappa
        rows.append((float(power), cap.watt_hours, cap.relative_capacity, kappa_cubic))
    with open(sweep_path, "w", encoding="utf-8") as fh:
        fh.write("pack_power_w,effective_wh,kappa_full,kappa_cubic\n")
        for row in rows:
            fh.write(",".join(repr(v) for v in row) + "\n")
    print(f"\ncapacity sweep written to {sweep_path}")

    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not available; skipping the quick-look figure")
        return

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.2))
    for power, trace in traces.items():
        ax1.semilogx(trace.time_s[1:], trace.u_pack_v[1:], label=f"{power:.0f} W")
    ax1.set_xlabel("time [s]")
    ax1.set_ylabel("pack voltage [V]")
    ax1.legend(fontsize=8)
    data = np.array(rows)
    ax2.plot(data[:, 0], data[:, 1])
    ax2.set_xlabel("pack power [W]")
    ax2.set_ylabel("effective capacity [Wh]")
    fig.tight_layout()
    figure_path = OUT_DIR / "discharge_curves.png"
    fig.savefig(figure_path, dpi=150)
    print(f"figure written to {figure_path}")


if __name__ == "__main__":
    main()
