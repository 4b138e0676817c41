import pytest

import rotorperf as rp
from rotorperf import fixtures


@pytest.fixture(scope="session")
def mavic():
    """(VehicleSpec, Environment) of the reference quadcopter."""
    return fixtures.load_dji_mavic2()


@pytest.fixture(scope="session")
def coeffs():
    return rp.builtin_empirical_coeffs()


@pytest.fixture(scope="session")
def params():
    return rp.builtin_battery_params()


@pytest.fixture
def pack_4s18():
    return rp.BatteryPack.from_designator("4S1P", 1.8)
