"""One-time-constant equivalent-circuit cell model and discharge simulation.

The model works in per-cell normalized units so one coefficient set covers
any series/parallel pack:

* ``P_cell`` (W/Ah): pack power divided by ``cell_count * cell_capacity``,
* ``E_cell`` (kJ/Ah): consumed energy, the time integral of ``P_cell``
  divided by 1000,
* ``avg_power`` (W/Ah): running mean ``E_cell * 1000 / t`` (defined as the
  instantaneous demand at t = 0).

The open-circuit voltage is a cubic in ``E_cell``; the internal resistance
is an affine function of the running-mean power (a proxy for cell heating)
and the cell capacity, floored at ``r_min``; a single first-order lag
``dU_cap/dt = (k*P_cell - U_cap)/tau_rc`` adds the slow voltage transient.
Terminal voltage under a power load solves the quadratic
``U^2 - (U0 - U_cap)*U + R0*P_cell = 0``; the physical branch is

    U = 0.5 * ((U0 - U_cap) + sqrt((U0 - U_cap)^2 - 4*R0*P_cell))

which returns exactly ``U0 - U_cap`` at zero load. A negative discriminant
means the cell cannot deliver the demanded power at all.

``simulate_discharge`` is sequential per trace; distinct simulations are
independent. Everything else is pure.
"""

from __future__ import annotations

import csv
import enum
import math
import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import BatteryPack, BatteryParams, EmpiricalCoeffs
from .errors import (
    CapacityUndefinedError,
    FileFormatError,
    InfeasiblePowerError,
    InvalidParameterError,
)

#: Default integrator step (s); the RC lag is the only dynamics, so a
#: fixed step well below ``tau_rc`` is ample.
DEFAULT_TIME_STEP = 0.05

#: Per-cell power range (W/Ah) covered by the cubic capacity fit.
CUBIC_FIT_DOMAIN = (0.0, 100.0)

TRACE_CSV_HEADER = "time_s,p_cell_w_per_ah,e_cell_kj_per_ah,u_cell_v,u_pack_v"

#: Maximum rows written to a trace CSV; longer traces are thinned uniformly.
TRACE_CSV_MAX_ROWS = 2000


@dataclass(frozen=True)
class BatteryState:
    """Per-cell model state advanced through time."""

    time_s: float
    energy_per_cell: float
    rc_voltage: float
    avg_power: float

    def __post_init__(self):
        if self.time_s < 0:
            raise InvalidParameterError(f"time_s must be >= 0, got {self.time_s}")
        if self.energy_per_cell < 0:
            raise InvalidParameterError(
                f"energy_per_cell must be >= 0, got {self.energy_per_cell}")
        if self.avg_power < 0:
            raise InvalidParameterError(f"avg_power must be >= 0, got {self.avg_power}")
        if not math.isfinite(self.rc_voltage):
            raise InvalidParameterError(f"rc_voltage must be finite, got {self.rc_voltage}")


def initial_state(p_cell: float = 0.0) -> BatteryState:
    """Fresh-cell state at t = 0 under demand ``p_cell``."""
    return BatteryState(0.0, 0.0, 0.0, p_cell)


def normalize_power(p_mot_w: float, pack: BatteryPack) -> float:
    """Per-cell normalized power (W/Ah) for a pack-level demand (W)."""
    if p_mot_w < 0:
        raise InvalidParameterError(f"power must be >= 0, got {p_mot_w}")
    return p_mot_w / (pack.cell_count * pack.cell_capacity_ah)


def open_circuit_voltage(params: BatteryParams, energy_per_cell: float) -> float:
    """Open-circuit voltage (V) at consumed per-cell energy (kJ/Ah)."""
    if energy_per_cell < 0:
        raise InvalidParameterError(
            f"energy_per_cell must be >= 0, got {energy_per_cell}")
    e = energy_per_cell
    return ((params.a3 * e + params.a2) * e + params.a1) * e + params.a0


def internal_resistance(params: BatteryParams, avg_power: float,
                        cell_capacity_ah: float) -> float:
    """Series resistance (Ohm) at running-mean power (W/Ah) and capacity (Ah)."""
    if avg_power < 0:
        raise InvalidParameterError(f"avg_power must be >= 0, got {avg_power}")
    if not cell_capacity_ah > 0:
        raise InvalidParameterError(
            f"cell_capacity_ah must be > 0, got {cell_capacity_ah}")
    return max(params.b0 + params.b1 * avg_power + params.b2 * cell_capacity_ah,
               params.r_min)


def max_deliverable_power(u0: float, u_cap: float, r0: float) -> float:
    """Largest per-cell power (W/Ah) with a real terminal-voltage solution."""
    d = u0 - u_cap
    return d * d / (4.0 * r0)


def cell_terminal_voltage(u0: float, u_cap: float, r0: float, p_cell: float) -> float:
    """Terminal voltage (V) of one cell under per-cell power ``p_cell``.

    Raises :class:`InfeasiblePowerError` when the demand exceeds
    :func:`max_deliverable_power`.
    """
    if p_cell < 0:
        raise InvalidParameterError(f"p_cell must be >= 0, got {p_cell}")
    d = u0 - u_cap
    if p_cell == 0.0:
        return d
    disc = d * d - 4.0 * r0 * p_cell
    if disc < 0.0:
        raise InfeasiblePowerError(p_cell, max_deliverable_power(u0, u_cap, r0))
    return 0.5 * (d + math.sqrt(disc))


def advance_state(state: BatteryState, p_cell: float, dt: float,
                  params: BatteryParams) -> BatteryState:
    """Advance the cell state by ``dt`` seconds under constant ``p_cell``.

    The RC voltage is integrated with one classical fourth-order
    Runge-Kutta step; the energy integral is exact for the constant
    segment power.
    """
    if dt <= 0:
        raise InvalidParameterError(f"dt must be > 0, got {dt}")
    if p_cell < 0:
        raise InvalidParameterError(f"p_cell must be >= 0, got {p_cell}")
    tau = params.tau_rc
    target = params.k * p_cell
    u = state.rc_voltage
    k1 = (target - u) / tau
    k2 = (target - (u + 0.5 * dt * k1)) / tau
    k3 = (target - (u + 0.5 * dt * k2)) / tau
    k4 = (target - (u + dt * k3)) / tau
    u_next = u + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
    t_next = state.time_s + dt
    e_next = state.energy_per_cell + p_cell * dt / 1000.0
    avg = e_next * 1000.0 / t_next if t_next > 0 else p_cell
    return BatteryState(t_next, e_next, u_next, avg)


class PowerProfile:
    """Stepwise-constant pack power over a finite horizon.

    Segment ``i`` holds ``powers[i]`` from ``times[i]`` (inclusive) to the
    next boundary; the last segment runs to ``duration_s``. Times must
    start at 0 and increase strictly.
    """

    def __init__(self, times_s, powers_w, duration_s: float):
        times = np.asarray(times_s, dtype=float)
        powers = np.asarray(powers_w, dtype=float)
        if times.ndim != 1 or times.shape != powers.shape or times.size == 0:
            raise InvalidParameterError("times and powers must be equal-length 1-D sequences")
        if times[0] != 0.0:
            raise InvalidParameterError(f"profile must start at t = 0, got {times[0]}")
        if np.any(np.diff(times) <= 0):
            raise InvalidParameterError("profile times must increase strictly")
        if np.any(powers < 0):
            raise InvalidParameterError("profile powers must be >= 0")
        if not duration_s > 0:
            raise InvalidParameterError(f"duration_s must be > 0, got {duration_s}")
        if duration_s < times[-1]:
            raise InvalidParameterError(
                f"duration_s = {duration_s} is before the last segment start {times[-1]}")
        times.flags.writeable = False
        powers.flags.writeable = False
        self.times_s = times
        self.powers_w = powers
        self.duration_s = float(duration_s)

    @classmethod
    def constant(cls, power_w: float, duration_s: float) -> "PowerProfile":
        return cls([0.0], [power_w], duration_s)

    @classmethod
    def stepwise(cls, times_s, powers_w, duration_s: float) -> "PowerProfile":
        return cls(times_s, powers_w, duration_s)

    @classmethod
    def from_csv(cls, path: str | os.PathLike,
                 duration_s: float | None = None) -> "PowerProfile":
        """Read a ``time_s,power_w`` CSV; the last segment runs to
        ``duration_s`` (default: the last row's time)."""
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["time_s", "power_w"]:
                raise FileFormatError(f"{path}: expected header 'time_s,power_w'")
            rows = [(float(t), float(p)) for t, p in reader]
        if not rows:
            raise FileFormatError(f"{path}: no profile rows")
        times = [r[0] for r in rows]
        powers = [r[1] for r in rows]
        if duration_s is None:
            duration_s = times[-1] if times[-1] > 0 else 1.0
        return cls(times, powers, duration_s)

    def power_at(self, t: float) -> float:
        idx = int(np.searchsorted(self.times_s, t, side="right")) - 1
        return float(self.powers_w[max(idx, 0)])

    def next_boundary_after(self, t: float) -> float | None:
        idx = int(np.searchsorted(self.times_s, t, side="right"))
        if idx < self.times_s.size:
            return float(self.times_s[idx])
        return None


class DischargeEnd(enum.Enum):
    REACHED_CUTOFF = "reached_cutoff"
    INFEASIBLE_POWER = "infeasible_power"
    PROFILE_END = "profile_end"


@dataclass(frozen=True)
class DischargeTrace:
    """Sampled result of one discharge simulation.

    Arrays are aligned per sample and read-only. ``u_pack_v`` is the
    per-cell voltage times the series count. When the terminal flag is
    ``INFEASIBLE_POWER`` the last feasible sample closes the trace and
    ``infeasible_time_s`` / ``infeasible_max_w_per_ah`` describe the event.
    """

    time_s: np.ndarray
    p_cell_w_per_ah: np.ndarray
    e_cell_kj_per_ah: np.ndarray
    u_cell_v: np.ndarray
    u_pack_v: np.ndarray
    terminal: DischargeEnd
    infeasible_time_s: float | None = None
    infeasible_max_w_per_ah: float | None = None

    def __post_init__(self):
        for arr in (self.time_s, self.p_cell_w_per_ah, self.e_cell_kj_per_ah,
                    self.u_cell_v, self.u_pack_v):
            arr.flags.writeable = False
        if self.time_s.size and np.any(np.diff(self.time_s) <= 0):
            raise InvalidParameterError("trace times must increase strictly")

    @property
    def sample_count(self) -> int:
        return int(self.time_s.size)


def simulate_discharge(pack: BatteryPack, params: BatteryParams,
                       profile: PowerProfile, dt: float = DEFAULT_TIME_STEP,
                       cutoff_per_cell: float | None = None) -> DischargeTrace:
    """Step the cell model until cutoff, infeasible power, or profile end.

    Samples are taken on the ``dt`` grid and additionally at every profile
    boundary, so power steps land exactly where the profile places them.
    """
    if dt <= 0:
        raise InvalidParameterError(f"dt must be > 0, got {dt}")
    cutoff = pack.cutoff_voltage_per_cell if cutoff_per_cell is None else cutoff_per_cell
    c_cell = pack.cell_capacity_ah
    n_series = pack.series_count

    state = initial_state(normalize_power(profile.power_at(0.0), pack))
    times: list[float] = []
    p_cells: list[float] = []
    e_cells: list[float] = []
    u_cells: list[float] = []
    terminal = DischargeEnd.PROFILE_END
    infeasible_time = None
    infeasible_max = None

    while True:
        t = state.time_s
        p_cell = normalize_power(profile.power_at(t), pack)
        r0 = internal_resistance(params, state.avg_power, c_cell)
        u0 = open_circuit_voltage(params, state.energy_per_cell)
        try:
            u_cell = cell_terminal_voltage(u0, state.rc_voltage, r0, p_cell)
        except InfeasiblePowerError as err:
            terminal = DischargeEnd.INFEASIBLE_POWER
            infeasible_time = t
            infeasible_max = err.max_deliverable_w_per_ah
            break
        times.append(t)
        p_cells.append(p_cell)
        e_cells.append(state.energy_per_cell)
        u_cells.append(u_cell)
        if u_cell < cutoff:
            terminal = DischargeEnd.REACHED_CUTOFF
            break
        if t >= profile.duration_s - 1e-9:
            terminal = DischargeEnd.PROFILE_END
            break
        # next sample: the following dt-grid point, clipped by the next
        # profile boundary and the horizon; grid points are recomputed as
        # exact products so rounding cannot accumulate into micro-steps
        t_next = min((math.floor(t / dt + 1e-9) + 1) * dt, profile.duration_s)
        boundary = profile.next_boundary_after(t)
        if boundary is not None and boundary < t_next:
            t_next = boundary
        state = advance_state(state, p_cell, t_next - t, params)

    u_cell_arr = np.array(u_cells)
    return DischargeTrace(
        time_s=np.array(times),
        p_cell_w_per_ah=np.array(p_cells),
        e_cell_kj_per_ah=np.array(e_cells),
        u_cell_v=u_cell_arr,
        u_pack_v=n_series * u_cell_arr,
        terminal=terminal,
        infeasible_time_s=infeasible_time,
        infeasible_max_w_per_ah=infeasible_max,
    )


class CapacityResult(NamedTuple):
    watt_hours: float
    amp_hours: float
    relative_capacity: float


def effective_capacity(trace: DischargeTrace, pack: BatteryPack) -> CapacityResult:
    """Deliverable capacity of a discharge that terminated at cutoff.

    Energy is mean pack power times discharge time; amp-hours follow from
    the nominal pack voltage (nominal cell voltage times series count);
    the relative capacity is amp-hours over the labelled pack capacity.
    """
    if trace.terminal is not DischargeEnd.REACHED_CUTOFF:
        raise CapacityUndefinedError(
            f"discharge ended with {trace.terminal.value}, not at cutoff")
    e_end = float(trace.e_cell_kj_per_ah[-1])
    watt_hours = e_end * pack.cell_count * pack.cell_capacity_ah / 3.6
    amp_hours = watt_hours / (pack.nominal_cell_voltage * pack.series_count)
    return CapacityResult(watt_hours, amp_hours, amp_hours / pack.pack_capacity_ah)


class RelativeCapacity(NamedTuple):
    kappa: float
    in_fit_domain: bool


def relative_capacity_cubic(coeffs: EmpiricalCoeffs, p_cell: float) -> RelativeCapacity:
    """Relative capacity from the cubic shortcut at per-cell power (W/Ah).

    ``in_fit_domain`` is False outside the fitted range
    :data:`CUBIC_FIT_DOMAIN`; the polynomial value is still returned.
    """
    if p_cell < 0:
        raise InvalidParameterError(f"p_cell must be >= 0, got {p_cell}")
    p = p_cell
    kappa = ((coeffs.d3 * p + coeffs.d2) * p + coeffs.d1) * p + coeffs.d0
    lo, hi = CUBIC_FIT_DOMAIN
    return RelativeCapacity(kappa, lo <= p_cell <= hi)


def _thin_indices(n: int, max_rows: int) -> np.ndarray:
    if n <= max_rows:
        return np.arange(n)
    return np.unique(np.round(np.linspace(0, n - 1, max_rows)).astype(int))


def write_trace_csv(trace: DischargeTrace, path: str | os.PathLike,
                    max_rows: int = TRACE_CSV_MAX_ROWS) -> int:
    """Write a trace CSV (thinned to ``max_rows``); returns rows written.

    The final sample, which sits at the termination event, is always kept.
    """
    idx = _thin_indices(trace.sample_count, max_rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(TRACE_CSV_HEADER + "\n")
        for i in idx:
            fh.write(",".join(repr(float(col[i])) for col in (
                trace.time_s, trace.p_cell_w_per_ah, trace.e_cell_kj_per_ah,
                trace.u_cell_v, trace.u_pack_v)) + "\n")
    return int(idx.size)
