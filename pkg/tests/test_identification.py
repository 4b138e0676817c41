import math

import numpy as np
import pytest

import rotorperf as rp
from rotorperf import fixtures, identification as ident
from helpers import synthetic_discharge_set

TRUE_MOTOR = dict(c_d=1.3e-8, m0=2.0e-4, m1=1.55e-8, m2=5.5e-20)


def make_thrust_log(omega, c_d, m0, m1, m2, power_noise=None):
    omega = np.asarray(omega, dtype=float)
    torque = c_d * omega**2
    power = m0 * omega + m1 * omega**3 + m2 * omega**6
    if power_noise is not None:
        power = power * (1.0 + power_noise)
    return ident.ThrustLog(omega, 25.0 * torque, torque, power)


# --- motor -------------------------------------------------------------------

def test_motor_fit_noiseless_round_trip():
    log = make_thrust_log(np.linspace(300, 2800, 20), **TRUE_MOTOR)
    coeffs, report = ident.fit_motor(log)
    for name, value in TRUE_MOTOR.items():
        assert abs(getattr(coeffs, name) / value - 1.0) < 1e-6
    assert report.rmse < 1e-9
    assert report.warnings == ()


def test_motor_fit_duplicated_rows_unchanged():
    omega = np.linspace(300, 2800, 20)
    log = make_thrust_log(omega, **TRUE_MOTOR)
    doubled = ident.ThrustLog(np.concatenate([log.omega, log.omega]),
                              np.concatenate([log.thrust, log.thrust]),
                              np.concatenate([log.torque, log.torque]),
                              np.concatenate([log.electrical_power,
                                              log.electrical_power]))
    c1, _ = ident.fit_motor(log)
    c2, _ = ident.fit_motor(doubled)
    for name in TRUE_MOTOR:
        assert math.isclose(getattr(c1, name), getattr(c2, name), rel_tol=1e-9)


def test_motor_fit_noise_monte_carlo():
    # bounds established over 100 seeds before freezing: the power signal
    # is recovered to the noise floor and the identifiable coefficients
    # tightly; the small m0/m2 lumps sit below the noise floor, so only
    # their nonnegativity and the resulting efficiency curve are pinned
    omega = np.linspace(300, 2800, 20)
    true = TRUE_MOTOR
    p_true = true["m0"] * omega + true["m1"] * omega**3 + true["m2"] * omega**6
    eta_true = true["c_d"] * omega**3 / p_true
    high_speed = omega >= 1000.0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        log = make_thrust_log(omega, **true,
                              power_noise=0.01 * rng.standard_normal(omega.size))
        coeffs, report = ident.fit_motor(log)
        assert report.rmse <= 0.02 * float(np.mean(log.electrical_power))
        assert abs(coeffs.c_d / true["c_d"] - 1.0) < 0.10
        assert abs(coeffs.m1 / true["m1"] - 1.0) < 0.10
        assert coeffs.m0 >= 0.0 and coeffs.m2 >= 0.0
        p_fit = coeffs.m0 * omega + coeffs.m1 * omega**3 + coeffs.m2 * omega**6
        eta_fit = coeffs.c_d * omega**3 / p_fit
        assert np.max(np.abs(eta_fit[high_speed] - eta_true[high_speed])) <= 0.03


def test_motor_fit_clamps_negative_coefficients():
    # a power curve with a negative linear component pushes the m0
    # solution below zero; the fit clamps it, refits, and says so
    omega = np.linspace(300.0, 2800.0, 20)
    torque = TRUE_MOTOR["c_d"] * omega**2
    power = 1.55e-8 * omega**3 - 1e-4 * omega
    assert np.all(power > 0)
    log = ident.ThrustLog(omega, 25.0 * torque, torque, power)
    coeffs, report = ident.fit_motor(log)
    assert coeffs.m0 == 0.0
    assert any("clamped" in w and "m0" in w for w in report.warnings)


def test_motor_fit_warns_on_efficiency_above_one():
    # electrical power below the mechanical output is unphysical; the fit
    # keeps the curve as-is and raises a warning instead of clamping
    omega = np.linspace(300.0, 2800.0, 20)
    torque = TRUE_MOTOR["c_d"] * omega**2
    log = ident.ThrustLog(omega, 25.0 * torque, torque,
                          0.8 * TRUE_MOTOR["c_d"] * omega**3)
    coeffs, report = ident.fit_motor(log)
    assert any("exceeds 1" in w for w in report.warnings)
    assert rp.efficiency(coeffs, 1500.0) > 1.0


def test_motor_fit_rank_deficient():
    omega = np.array([500.0, 500.0, 500.0, 500.0, 1500.0, 1500.0, 1500.0, 1500.0])
    log = make_thrust_log(omega, **TRUE_MOTOR)
    with pytest.raises(rp.FitError, match="distinct speeds"):
        ident.fit_motor(log)


def test_motor_fit_needs_enough_rows():
    log = make_thrust_log(np.linspace(300, 2800, 7), **TRUE_MOTOR)
    with pytest.raises(rp.FitError, match="at least"):
        ident.fit_motor(log)


def test_motor_fit_reports_consistent_rmse():
    rng = np.random.default_rng(3)
    log = make_thrust_log(np.linspace(300, 2800, 20), **TRUE_MOTOR,
                          power_noise=0.01 * rng.standard_normal(20))
    coeffs, report = ident.fit_motor(log)
    predicted = (coeffs.m0 * log.omega + coeffs.m1 * log.omega**3
                 + coeffs.m2 * log.omega**6)
    residuals = log.electrical_power - predicted
    assert np.allclose(residuals, report.residuals, atol=1e-12)
    assert math.isclose(report.rmse, float(np.sqrt(np.mean(residuals**2))),
                        rel_tol=1e-12)


def test_bench_curve_fit_peak_efficiency():
    points = fixtures.motor_efficiency_points("2400kv_5p1in")
    log = fixtures.thrust_log_from_efficiency(points)
    coeffs, report = ident.fit_motor(log)
    grid = np.linspace(points[:, 0].min(), points[:, 0].max(), 2001)
    eta = np.array([rp.efficiency(coeffs, float(w)) for w in grid])
    assert 0.80 <= float(eta.max()) <= 0.88
    assert not any("exceeds 1" in w for w in report.warnings)


# --- battery: resistance stage -------------------------------------------------

def test_single_step_resistance_extraction(pack_4s18, params):
    profile = rp.PowerProfile.stepwise([0.0, 30.0], [100.0, 200.0], 60.0)
    log = fixtures.generate_synthetic_discharge(pack_4s18, params, profile)
    fit = ident.fit_battery_resistance([log])
    assert len(fit.steps) == 1
    step = fit.steps[0]
    generating = rp.internal_resistance(params, step.avg_cell_power_w_per_ah,
                                        pack_4s18.cell_capacity_ah)
    assert abs(step.resistance_ohm / generating - 1.0) < 0.02
    assert any("rank-deficient" in w for w in fit.warnings)


def test_resistance_recovery_within_tolerance(params):
    logs = synthetic_discharge_set(params)
    fit = ident.fit_battery_resistance(logs)
    assert abs(fit.b0 / params.b0 - 1.0) < 0.05
    assert abs(fit.b1 / params.b1 - 1.0) < 0.05
    assert abs(fit.b2 / params.b2 - 1.0) < 0.05
    assert fit.r_min == max(min(s.resistance_ohm for s in fit.steps), 0.001)
    assert len(fit.steps) == 16


def test_zero_voltage_jump_excluded_with_warning(pack_4s18):
    log = ident.DischargeLog(
        pack_4s18,
        np.array([0.0, 1.0, 2.0, 3.0, 4.0]),
        np.array([100.0, 100.0, 200.0, 200.0, 400.0]),
        np.array([15.2, 15.2, 15.2, 15.1, 14.9]),
        step_indices=(2, 4))
    fit = ident.fit_battery_resistance([log])
    assert any("zero voltage jump" in w for w in fit.warnings)
    assert len(fit.steps) == 1
    assert fit.steps[0].time_s == 4.0


def test_no_usable_steps_is_fit_error(pack_4s18):
    log = ident.DischargeLog(pack_4s18, np.array([0.0, 1.0]),
                             np.array([100.0, 100.0]), np.array([15.2, 15.1]))
    with pytest.raises(rp.FitError, match="no usable power steps"):
        ident.fit_battery_resistance([log])


# --- battery: dynamics stage ----------------------------------------------------

def test_two_step_fit_noiseless(params):
    logs = synthetic_discharge_set(params)
    resistance = ident.fit_battery_resistance(logs)
    fitted, report = ident.fit_battery_dynamics(logs, resistance)
    assert report.rmse < 1e-3
    assert report.residuals.size == sum(log.row_count for log in logs)


@pytest.mark.parametrize("seed_base", [0, 1, 2])
def test_two_step_fit_with_noise(params, seed_base):
    logs = synthetic_discharge_set(params, noise_mv=20.0, seed_base=seed_base)
    resistance = ident.fit_battery_resistance(logs)
    fitted, report = ident.fit_battery_dynamics(logs, resistance,
                                                max_iterations=200)
    assert report.rmse <= 0.025


def test_dynamics_recovers_shifted_parameters(params):
    generating = rp.BatteryParams(
        a0=4.15, a1=params.a1 * 1.08, a2=params.a2 * 0.9, a3=params.a3 * 1.15,
        b0=params.b0, b1=params.b1, b2=params.b2, r_min=params.r_min,
        tau_rc=2.6, k=0.00135)
    logs = synthetic_discharge_set(generating)
    resistance = ident.fit_battery_resistance(logs)
    fitted, report = ident.fit_battery_dynamics(logs, resistance)
    assert report.rmse < 1e-3
    assert abs(fitted.a0 - generating.a0) < 0.01
    assert abs(fitted.tau_rc / generating.tau_rc - 1.0) < 0.05
    assert abs(fitted.k / generating.k - 1.0) < 0.05


def test_dynamics_rmse_self_consistent(params):
    logs = synthetic_discharge_set(params, noise_mv=20.0, seed_base=5)
    resistance = ident.fit_battery_resistance(logs)
    fitted, report = ident.fit_battery_dynamics(logs, resistance,
                                                max_iterations=50)
    assert math.isclose(report.rmse,
                        float(np.sqrt(np.mean(report.residuals**2))),
                        rel_tol=1e-12)


def test_dynamics_infeasible_initial_point_is_fit_error():
    # a grossly sagged log whose demanded power exceeds the deliverable
    # maximum under the fixed resistance makes the objective non-finite
    pack = rp.BatteryPack.from_designator("4S1P", 1.0)
    log = ident.DischargeLog(pack, np.array([0.0, 1.0]),
                             np.array([640.0, 640.0]), np.array([8.0, 8.0]))
    resistance = ident.ResistanceFit(b0=0.03, b1=0.0, b2=0.0, r_min=0.001, steps=())
    with pytest.raises(rp.FitError, match="initial point"):
        ident.fit_battery_dynamics([log], resistance)


def test_dynamics_requires_logs(params):
    resistance = ident.ResistanceFit(b0=0.001, b1=0.0, b2=0.0, r_min=0.001, steps=())
    with pytest.raises(rp.FitError):
        ident.fit_battery_dynamics([], resistance)


# --- log containers and CSV formats --------------------------------------------

def test_detect_power_steps():
    power = np.array([100.0, 100.5, 100.0, 200.0, 200.0, 180.0, 0.0, 50.0])
    assert ident.detect_power_steps(power) == (3, 6, 7)


def test_thrust_log_csv_round_trip(tmp_path):
    log = make_thrust_log(np.linspace(300, 2800, 10), **TRUE_MOTOR)
    path = tmp_path / "thrust.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(ident.THRUST_LOG_HEADER + "\n")
        for i in range(log.row_count):
            fh.write(f"{float(log.omega[i])!r},{float(log.thrust[i])!r},"
                     f"{float(log.torque[i])!r},{float(log.electrical_power[i])!r}\n")
    loaded = ident.read_thrust_log(path)
    assert np.array_equal(loaded.omega, log.omega)
    assert np.array_equal(loaded.electrical_power, log.electrical_power)


@pytest.mark.parametrize("content", [
    "",                                       # no header
    "omega_rad_s,thrust_n,torque_nm\n1,2,3\n",  # wrong header
    "omega_rad_s,thrust_n,torque_nm,power_w\n",  # no rows
    "omega_rad_s,thrust_n,torque_nm,power_w\n1,2,3,x\n",  # non-numeric
    "omega_rad_s,thrust_n,torque_nm,power_w\n1,2,3\n",    # short row
])
def test_thrust_log_csv_rejected(tmp_path, content):
    path = tmp_path / "bad.csv"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(rp.FileFormatError):
        ident.read_thrust_log(path)


def test_discharge_log_csv_round_trip(tmp_path, pack_4s18, params):
    profile = rp.PowerProfile.stepwise([0.0, 5.0], [100.0, 200.0], 10.0)
    log = fixtures.generate_synthetic_discharge(pack_4s18, params, profile)
    path = tmp_path / "discharge.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(ident.DISCHARGE_LOG_HEADER + "\n")
        for i in range(log.row_count):
            fh.write(f"{float(log.time_s[i])!r},{float(log.pack_power_w[i])!r},"
                     f"{float(log.pack_voltage_v[i])!r}\n")
    loaded = ident.read_discharge_log(path, pack_4s18)
    assert np.array_equal(loaded.time_s, log.time_s)
    assert loaded.step_indices == log.step_indices  # detection finds the jump


def test_log_container_invariants(pack_4s18):
    with pytest.raises(rp.FileFormatError):
        ident.ThrustLog(np.array([-1.0] * 8), np.zeros(8), np.zeros(8), np.zeros(8))
    with pytest.raises(rp.FileFormatError):
        ident.DischargeLog(pack_4s18, np.array([0.0, 0.0]),
                           np.zeros(2), np.ones(2) * 15)
    with pytest.raises(rp.FileFormatError):
        ident.DischargeLog(pack_4s18, np.array([0.0, 1.0]),
                           np.zeros(2), np.ones(2) * 15, step_indices=(5,))
    log = ident.DischargeLog(pack_4s18, np.array([0.0, 1.0]),
                             np.zeros(2), np.ones(2) * 15)
    with pytest.raises(ValueError):
        log.time_s[0] = 5.0  # arrays are read-only
