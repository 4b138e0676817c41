"""Checked-in desk-scale fixtures and synthetic-data generators.

The packaged files under ``rotorperf/data`` are the only external data
the test suite consumes: a reference vehicle description, six transcribed
bench efficiency curves (one per motor-propeller pairing), and a frozen
expected report for the reference estimation chain. Each fixture carries
a provenance tag; the transcriptions are pinned by checksum in the test
suite so they cannot drift.
"""

from __future__ import annotations

import csv
import enum
import hashlib
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import battery
from .core import BatteryPack, BatteryParams, Environment, VehicleSpec
from .errors import InvalidParameterError
from .identification import DischargeLog, ThrustLog
from .specfile import load_vehicle_file


class FixtureKind(enum.Enum):
    VEHICLE_SPEC = "vehicle_spec"
    THRUST_LOG = "thrust_log"
    DISCHARGE_LOG = "discharge_log"
    EXPECTED_REPORT = "expected_report"
    EFFICIENCY_CURVE = "efficiency_curve"


@dataclass(frozen=True)
class Fixture:
    name: str
    kind: FixtureKind
    filename: str
    provenance: str

    def __post_init__(self):
        if not self.provenance:
            raise InvalidParameterError(f"fixture {self.name!r} lacks a provenance tag")


_EFFICIENCY_PROVENANCE = ("transcribed thrust-stand efficiency measurements "
                          "for one motor-propeller pairing")

_FIXTURES = (
    Fixture("dji_mavic2", FixtureKind.VEHICLE_SPEC, "dji_mavic2.spec",
            "manufacturer-published DJI Mavic 2 specifications"),
    Fixture("dji_mavic2_expected", FixtureKind.EXPECTED_REPORT, "dji_mavic2_expected.kv",
            "frozen pipeline output for the DJI Mavic 2 reference chain "
            "(hover power injected at 81.9 W)"),
    Fixture("2800kv_3p0in", FixtureKind.EFFICIENCY_CURVE, "motor_eff_2800kv_3p0in.csv",
            _EFFICIENCY_PROVENANCE),
    Fixture("2400kv_5p1in", FixtureKind.EFFICIENCY_CURVE, "motor_eff_2400kv_5p1in.csv",
            _EFFICIENCY_PROVENANCE),
    Fixture("1500kv_6p0in", FixtureKind.EFFICIENCY_CURVE, "motor_eff_1500kv_6p0in.csv",
            _EFFICIENCY_PROVENANCE),
    Fixture("2400kv_3p0in", FixtureKind.EFFICIENCY_CURVE, "motor_eff_2400kv_3p0in.csv",
            _EFFICIENCY_PROVENANCE),
    Fixture("2400kv_6p0in", FixtureKind.EFFICIENCY_CURVE, "motor_eff_2400kv_6p0in.csv",
            _EFFICIENCY_PROVENANCE),
    Fixture("1500kv_12in", FixtureKind.EFFICIENCY_CURVE, "motor_eff_1500kv_12in.csv",
            _EFFICIENCY_PROVENANCE),
)

_BY_NAME = {f.name: f for f in _FIXTURES}


def fixtures() -> tuple[Fixture, ...]:
    return _FIXTURES


def fixture(name: str) -> Fixture:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise InvalidParameterError(f"no fixture named {name!r}") from None


def fixture_path(name: str) -> Path:
    return Path(str(resources.files(__package__).joinpath("data", fixture(name).filename)))


def fixture_sha256(name: str) -> str:
    return hashlib.sha256(fixture_path(name).read_bytes()).hexdigest()


def load_dji_mavic2() -> tuple[VehicleSpec, Environment]:
    """The reference vehicle used across the tests and the docs."""
    return load_vehicle_file(fixture_path("dji_mavic2"))


def motor_efficiency_points(name: str = "2400kv_5p1in") -> np.ndarray:
    """Measured (omega rad/s, efficiency) pairs of one bench curve, as an
    (n, 2) array in transcription order."""
    f = fixture(name)
    if f.kind is not FixtureKind.EFFICIENCY_CURVE:
        raise InvalidParameterError(f"fixture {name!r} is not an efficiency curve")
    with open(fixture_path(name), "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        pts = np.array([[float(w), float(e)] for w, e in reader])
    pts.flags.writeable = False
    return pts


def thrust_log_from_efficiency(points: np.ndarray, c_d: float = 1.3e-8,
                               thrust_per_torque: float = 25.0) -> ThrustLog:
    """Build a thrust log that reproduces a measured efficiency curve.

    Efficiency fixes only the coefficient ratios, so torque and power are
    synthesized around the reference ``c_d``; the thrust column uses a
    fixed thrust-to-torque ratio and plays no role in the motor fit.
    """
    omega = np.asarray(points)[:, 0]
    eta = np.asarray(points)[:, 1]
    torque = c_d * omega ** 2
    power = torque * omega / eta
    return ThrustLog(omega, thrust_per_torque * torque, torque, power)


def generate_synthetic_discharge(pack: BatteryPack, params: BatteryParams,
                                 profile: battery.PowerProfile,
                                 noise_mv: float = 0.0, seed: int = 0,
                                 dt: float = battery.DEFAULT_TIME_STEP) -> DischargeLog:
    """Discharge log produced by the cell model itself, with optional
    seeded Gaussian noise (mV, per cell) on the voltage signal.

    Power steps are annotated from the profile boundaries, not detected.
    """
    if noise_mv < 0:
        raise InvalidParameterError(f"noise_mv must be >= 0, got {noise_mv}")
    trace = battery.simulate_discharge(pack, params, profile, dt=dt)
    u_cell = np.array(trace.u_cell_v)
    if noise_mv > 0.0:
        rng = np.random.default_rng(seed)
        u_cell = u_cell + rng.standard_normal(u_cell.size) * (noise_mv / 1000.0)
    time = trace.time_s
    steps = tuple(int(i) for i in np.searchsorted(time, profile.times_s[1:])
                  if 0 < i < time.size)
    scale = pack.cell_count * pack.cell_capacity_ah
    return DischargeLog(pack, time, trace.p_cell_w_per_ah * scale,
                        u_cell * pack.series_count, step_indices=steps)
