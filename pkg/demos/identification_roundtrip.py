#!/usr/bin/env python3
"""Identify motor and battery coefficients from synthetic bench logs and
from the packaged bench efficiency curve.

The synthetic logs are produced by the package's own models, so the fits
should land back on the generating coefficients; this is the same oracle
the test suite uses, shown here end to end.
"""

import numpy as np

import rotorperf as rp
from rotorperf import fixtures, identification as ident


def motor_roundtrip():
    print("== motor fit on synthetic thrust-stand data ==")
    true = dict(c_d=1.3e-8, m0=2.0e-4, m1=1.55e-8, m2=5.5e-20)
    omega = np.linspace(300.0, 2800.0, 20)
    torque = true["c_d"] * omega**2
    power = true["m0"] * omega + true["m1"] * omega**3 + true["m2"] * omega**6
    rng = np.random.default_rng(11)
    noisy = power * (1.0 + 0.01 * rng.standard_normal(omega.size))
    coeffs, report = ident.fit_motor(
        ident.ThrustLog(omega, 25.0 * torque, torque, noisy))
    for name, value in true.items():
        fitted = getattr(coeffs, name)
        print(f"  {name}: fitted {fitted:.4e}  true {value:.4e}")
    print(f"  power rmse {report.rmse:.2f} W on "
          f"{np.mean(noisy):.0f} W mean ({report.rmse / np.mean(noisy):.1%})\n")


def bench_curve():
    print("== bench efficiency curve (2400KV motor, 5.1 in propeller) ==")
    points = fixtures.motor_efficiency_points("2400kv_5p1in")
    coeffs, _ = ident.fit_motor(fixtures.thrust_log_from_efficiency(points))
    grid = np.linspace(points[:, 0].min(), points[:, 0].max(), 400)
    eta = np.array([rp.efficiency(coeffs, float(w)) for w in grid])
    peak = grid[eta.argmax()]
    print(f"  peak efficiency {eta.max():.3f} at {peak:.0f} rad/s "
          f"(measured points top out at {points[:, 1].max():.3f})\n")


def battery_roundtrip():
    print("== two-step battery fit on synthetic discharge logs ==")
    params = rp.builtin_battery_params()
    configs = [("4S1P", 1.8, (100.0, 450.0, 150.0, 550.0, 120.0)),
               ("6S2P", 5.2, (150.0, 700.0, 250.0, 1000.0, 200.0)),
               ("4S1P", 1.0, (40.0, 160.0, 60.0, 240.0, 50.0))]
    logs = []
    for designator, capacity, powers in configs:
        pack = rp.BatteryPack.from_designator(designator, capacity)
        profile = rp.PowerProfile.stepwise([0.0, 15.0, 30.0, 45.0, 60.0],
                                           powers, 75.0)
        logs.append(fixtures.generate_synthetic_discharge(
            pack, params, profile, noise_mv=20.0, seed=len(logs)))
    resistance = ident.fit_battery_resistance(logs)
    print(f"  step 1: {len(resistance.steps)} power steps -> "
          f"b0 {resistance.b0:.3e} (true {params.b0:.3e}), "
          f"b2 {resistance.b2:.3e} (true {params.b2:.3e})")
    fitted, report = ident.fit_battery_dynamics(logs, resistance)
    print(f"  step 2: per-cell voltage rmse {report.rmse * 1000:.1f} mV "
          f"against logs carrying 20 mV noise")
    print(f"  open-circuit polynomial at empty: {fitted.a0:.3f} V "
          f"(true {params.a0:.3f} V), rc lag {fitted.tau_rc:.2f} s "
          f"(true {params.tau_rc:.2f} s)")


if __name__ == "__main__":
    motor_roundtrip()
    bench_curve()
    battery_roundtrip()
