"""Shared oracles and synthetic-data builders for the test suite."""

from scipy.optimize import brentq

import rotorperf as rp
from rotorperf import fixtures


def quasi_static_cutoff_energy(params, p_cell, cell_capacity_ah, cutoff=3.5):
    """Analytic discharge endpoint, independent of the time stepper.

    At a steady constant load the RC voltage sits at k*P and the terminal
    voltage obeys U = D - R0*P/U with D = U0(E) - U_cap, so the cutoff
    condition inverts to U0(E) = cutoff + R0*P/cutoff + k*P; the cubic is
    strictly decreasing over the physical range, so the root is unique.
    """
    r0 = rp.internal_resistance(params, p_cell, cell_capacity_ah)
    target = cutoff + r0 * p_cell / cutoff + params.k * p_cell
    return brentq(lambda e: rp.open_circuit_voltage(params, e) - target,
                  0.0, 40.0, xtol=1e-12)


# Pack/profile set for the battery identification round-trips: three cell
# capacities, power steps spanning a wide running-average range, each log
# stepping down last so the running average peaks exactly at a step (the
# smallest observed step resistance then equals the smallest resistance
# the model visits, keeping the fitted floor out of the way).
SYNTHETIC_SET = (
    ("4S1P", 1.8, (100.0, 450.0, 150.0, 550.0, 120.0)),
    ("6S2P", 5.2, (150.0, 700.0, 250.0, 1000.0, 200.0)),
    ("4S1P", 1.0, (40.0, 160.0, 60.0, 240.0, 50.0)),
    ("6S1P", 1.216, (50.0, 200.0, 80.0, 300.0, 60.0)),
)
SYNTHETIC_STEP_TIMES = (0.0, 15.0, 30.0, 45.0, 60.0)
SYNTHETIC_DURATION = 75.0


def synthetic_discharge_set(params, noise_mv=0.0, seed_base=0):
    """Discharge logs generated by the cell model itself."""
    logs = []
    for i, (designator, capacity, powers) in enumerate(SYNTHETIC_SET):
        pack = rp.BatteryPack.from_designator(designator, capacity)
        profile = rp.PowerProfile.stepwise(SYNTHETIC_STEP_TIMES, powers,
                                           SYNTHETIC_DURATION)
        logs.append(fixtures.generate_synthetic_discharge(
            pack, params, profile, noise_mv=noise_mv, seed=seed_base * 10 + i))
    return logs
