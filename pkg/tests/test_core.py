import math

import pytest
from hypothesis import given, strategies as st

import rotorperf as rp
from rotorperf.core import DEFAULT_CUTOFF_VOLTAGE, NOMINAL_CELL_VOLTAGE


def test_default_environment_values():
    env = rp.default_environment()
    assert env.air_density == 1.2
    assert env.gravity == 9.81


def test_builtin_battery_params_table_values(params):
    assert params.a0 == 4.2
    assert params.a1 == -0.1102178
    assert params.a2 == 0.0103368
    assert params.a3 == -4.3778e-4
    assert params.b0 == 0.0015778
    assert params.b1 == -7.7608e-5
    assert params.b2 == 0.0069498
    assert params.r_min == 0.0045
    assert params.tau_rc == 3.3
    assert params.k == 0.00104846


def test_builtin_empirical_coeffs_values(coeffs):
    assert coeffs.power_ratio_range == 1.092
    assert coeffs.power_ratio_endurance == 0.914
    assert coeffs.power_ratio_range_std == 0.0361
    assert coeffs.power_ratio_endurance_std == 0.0323
    assert coeffs.c0e == 0.10188
    assert coeffs.c1e == 0.071358
    assert coeffs.c2e == 0.0007381
    assert coeffs.c0r == 0.041546
    assert coeffs.c1r == 0.041122
    assert coeffs.c2r == 0.00053292
    assert coeffs.d0 == 0.9876
    assert coeffs.d1 == -0.0020
    assert coeffs.d2 == -5.2484e-05
    assert coeffs.d3 == 1.2230e-07


def test_builtin_accessors_are_referentially_transparent():
    assert rp.builtin_battery_params() == rp.builtin_battery_params()
    assert rp.builtin_battery_params() is rp.builtin_battery_params()
    assert rp.builtin_empirical_coeffs() is rp.builtin_empirical_coeffs()


@pytest.mark.parametrize("text,expected", [
    ("4S1P", (4, 1)),
    ("4S", (4, 1)),
    ("6S2P", (6, 2)),
    ("6s4p", (6, 4)),
    (" 12S 3P ", (12, 3)),
])
def test_parse_battery_designator(text, expected):
    assert rp.parse_battery_designator(text) == expected


@pytest.mark.parametrize("text", ["", "S1P", "4P", "4S0P", "0S", "4S1", "abc"])
def test_parse_battery_designator_rejects(text):
    with pytest.raises(rp.InvalidParameterError):
        rp.parse_battery_designator(text)


def test_pack_derived_fields():
    pack = rp.BatteryPack(6, 2, 5.2)
    assert pack.cell_count == 12
    assert pack.cell_capacity_ah == 5.2 / 2
    assert pack.designator == "6S2P"
    assert pack.cutoff_voltage_per_cell == DEFAULT_CUTOFF_VOLTAGE
    assert pack.nominal_cell_voltage == NOMINAL_CELL_VOLTAGE


@given(series=st.integers(1, 12), parallel=st.sampled_from([1, 2, 4]),
       capacity=st.floats(0.1, 50.0, allow_nan=False))
def test_pack_derived_fields_consistent(series, parallel, capacity):
    pack = rp.BatteryPack(series, parallel, capacity)
    assert pack.cell_count == series * parallel
    # division by a power of two is exact, so the product round-trips
    assert pack.cell_capacity_ah * parallel == capacity
    assert pack.cell_capacity_ah == pack.pack_capacity_ah / pack.parallel_count


@pytest.mark.parametrize("kwargs", [
    dict(series_count=0, parallel_count=1, pack_capacity_ah=1.0),
    dict(series_count=4, parallel_count=0, pack_capacity_ah=1.0),
    dict(series_count=4, parallel_count=1, pack_capacity_ah=0.0),
    dict(series_count=4, parallel_count=1, pack_capacity_ah=-1.0),
    dict(series_count=4, parallel_count=1, pack_capacity_ah=1.0,
         cutoff_voltage_per_cell=4.2),
    dict(series_count=4, parallel_count=1, pack_capacity_ah=1.0,
         cutoff_voltage_per_cell=0.0),
])
def test_pack_invariants_rejected(kwargs):
    with pytest.raises(rp.InvalidParameterError):
        rp.BatteryPack(**kwargs)


def test_environment_invariants():
    with pytest.raises(rp.InvalidParameterError):
        rp.Environment(air_density=0.0)
    with pytest.raises(rp.InvalidParameterError):
        rp.Environment(gravity=-1.0)
    # the zero-thrust probe must stay constructible
    assert rp.Environment(gravity=0.0).gravity == 0.0


def test_vehicle_spec_invariants(pack_4s18):
    good = dict(mass_kg=1.0, rotor_count=4, propeller_radius_m=0.1,
                surface_area_cm2=100.0, pack=pack_4s18)
    rp.VehicleSpec(**good)
    for bad in [dict(mass_kg=0.0), dict(mass_kg=-1.0), dict(rotor_count=0),
                dict(propeller_radius_m=0.0), dict(surface_area_cm2=0.0),
                dict(propeller_figure_of_merit=0.0),
                dict(propeller_figure_of_merit=1.1),
                dict(motor_efficiency_const=0.0),
                dict(motor_efficiency_const=1.2)]:
        with pytest.raises(rp.InvalidParameterError):
            rp.VehicleSpec(**{**good, **bad})


def test_battery_params_invariants(params):
    base = dict(a0=4.2, a1=-0.1, a2=0.01, a3=-4e-4, b0=1e-3, b1=-7e-5,
                b2=7e-3, r_min=4e-3, tau_rc=3.0, k=1e-3)
    rp.BatteryParams(**base)
    for bad in [dict(r_min=0.0), dict(tau_rc=0.0), dict(a0=2.9), dict(a0=4.5)]:
        with pytest.raises(rp.InvalidParameterError):
            rp.BatteryParams(**{**base, **bad})


def test_empirical_coeffs_invariants():
    with pytest.raises(rp.InvalidParameterError):
        rp.EmpiricalCoeffs(power_ratio_endurance=1.01)
    with pytest.raises(rp.InvalidParameterError):
        rp.EmpiricalCoeffs(power_ratio_range=0.99)
    with pytest.raises(rp.InvalidParameterError):
        rp.EmpiricalCoeffs(c1e=0.0)


def test_types_are_immutable(params, coeffs, pack_4s18):
    for obj, field, value in [(params, "a0", 4.0), (coeffs, "d0", 1.0),
                              (pack_4s18, "series_count", 6)]:
        with pytest.raises(Exception):
            setattr(obj, field, value)


def test_nominal_voltage_constant_used_in_flight_time(pack_4s18):
    # step 6 of the pipeline hard-codes the nominal conversion
    from rotorperf.estimator import flight_time_s
    t = flight_time_s(1.8, pack_4s18, 100.0)
    assert math.isclose(t, 1.8 * 3.7 * 4 * 3600.0 / 100.0)
