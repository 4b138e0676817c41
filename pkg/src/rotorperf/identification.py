"""Graybox parameter identification from bench-test logs.

Motor-propeller coefficients come from thrust-stand sweeps in two linear
least-squares stages: the drag coefficient from ``Q = c_d*omega^2``, then
the electrical-power lumps from ``P = m0*omega + m1*omega^3 + m2*omega^6``
with nonnegativity enforced by clamping-and-refitting.

Battery parameters come from step-wise constant discharge logs in two
steps. First, each power step yields an instantaneous resistance from the
voltage jump across it (the RC branch cannot move within one sample, so
the jump isolates the series resistance); regressing those against the
running-mean per-cell power and the cell capacity gives the resistance
model. Second, the open-circuit polynomial and the RC lump are fitted by
descending the RMSE between simulated and logged per-cell voltage.

Voltage jumps are read one sample before versus the first sample after a
step. The per-cell current change is capacity-normalized (divided by the
per-cell capacity) so the extracted resistance lands directly in the
convention the cell model uses.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .core import BatteryPack, BatteryParams, builtin_battery_params
from .errors import FileFormatError, FitError, InvalidParameterError
from .motor import MotorPropCoeffs

THRUST_LOG_HEADER = "omega_rad_s,thrust_n,torque_nm,power_w"
DISCHARGE_LOG_HEADER = "time_s,power_w,voltage_v"

#: Relative power change between consecutive rows that marks a step.
STEP_DETECTION_THRESHOLD = 0.10

#: Fewest thrust-log rows accepted for a motor fit.
MIN_THRUST_ROWS = 8

#: Lower bound applied to the smallest observed step resistance.
R_MIN_FLOOR = 0.001


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.asarray(arr, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ThrustLog:
    """Thrust-stand sweep: per row speed (rad/s), thrust (N), torque (N*m),
    electrical power (W)."""

    omega: np.ndarray
    thrust: np.ndarray
    torque: np.ndarray
    electrical_power: np.ndarray

    def __post_init__(self):
        arrays = [_readonly(a) for a in
                  (self.omega, self.thrust, self.torque, self.electrical_power)]
        for name, arr in zip(("omega", "thrust", "torque", "electrical_power"), arrays):
            object.__setattr__(self, name, arr)
            if arr.ndim != 1 or arr.shape != arrays[0].shape:
                raise FileFormatError("thrust log columns must be equal-length 1-D arrays")
        if np.any(self.omega < 0):
            raise FileFormatError("thrust log omega values must be >= 0")

    @property
    def row_count(self) -> int:
        return int(self.omega.size)


@dataclass(frozen=True)
class DischargeLog:
    """Bench discharge record: pack description plus (time, pack power,
    pack voltage) rows and the indices where the power steps."""

    pack: BatteryPack
    time_s: np.ndarray
    pack_power_w: np.ndarray
    pack_voltage_v: np.ndarray
    step_indices: tuple[int, ...] = ()

    def __post_init__(self):
        arrays = [_readonly(a) for a in (self.time_s, self.pack_power_w, self.pack_voltage_v)]
        for name, arr in zip(("time_s", "pack_power_w", "pack_voltage_v"), arrays):
            object.__setattr__(self, name, arr)
            if arr.ndim != 1 or arr.shape != arrays[0].shape:
                raise FileFormatError("discharge log columns must be equal-length 1-D arrays")
        if self.time_s.size == 0:
            raise FileFormatError("discharge log has no rows")
        if np.any(np.diff(self.time_s) <= 0):
            raise FileFormatError("discharge log times must increase strictly")
        for i in self.step_indices:
            if not 0 < i < self.time_s.size:
                raise FileFormatError(f"step index {i} outside log rows")

    @property
    def row_count(self) -> int:
        return int(self.time_s.size)


@dataclass(frozen=True)
class FitReport:
    """Fit quality summary: residual RMSE in the units of the fitted
    signal, per-row residuals, and any warnings raised along the way."""

    rmse: float
    residuals: np.ndarray
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "residuals", _readonly(self.residuals))
        if self.rmse < 0:
            raise InvalidParameterError(f"rmse must be >= 0, got {self.rmse}")


def read_thrust_log(path: str | os.PathLike) -> ThrustLog:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or ",".join(h.strip() for h in header) != THRUST_LOG_HEADER:
            raise FileFormatError(f"{path}: expected header '{THRUST_LOG_HEADER}'")
        try:
            rows = [tuple(float(x) for x in row) for row in reader if row]
        except ValueError as err:
            raise FileFormatError(f"{path}: non-numeric value ({err})") from None
    if not rows:
        raise FileFormatError(f"{path}: no data rows")
    if any(len(r) != 4 for r in rows):
        raise FileFormatError(f"{path}: every row needs 4 columns")
    cols = np.array(rows, dtype=float).T
    return ThrustLog(cols[0], cols[1], cols[2], cols[3])


def detect_power_steps(power: np.ndarray,
                       threshold: float = STEP_DETECTION_THRESHOLD) -> tuple[int, ...]:
    """Indices where the power changes by more than ``threshold`` relative
    to the larger of the two neighbouring samples."""
    power = np.asarray(power, dtype=float)
    if power.size < 2:
        return ()
    dp = np.abs(np.diff(power))
    ref = np.maximum(np.maximum(power[:-1], power[1:]), 1e-12)
    return tuple(int(i) + 1 for i in np.nonzero(dp > threshold * ref)[0])


def read_discharge_log(path: str | os.PathLike, pack: BatteryPack) -> DischargeLog:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or ",".join(h.strip() for h in header) != DISCHARGE_LOG_HEADER:
            raise FileFormatError(f"{path}: expected header '{DISCHARGE_LOG_HEADER}'")
        try:
            rows = [tuple(float(x) for x in row) for row in reader if row]
        except ValueError as err:
            raise FileFormatError(f"{path}: non-numeric value ({err})") from None
    if not rows:
        raise FileFormatError(f"{path}: no data rows")
    if any(len(r) != 3 for r in rows):
        raise FileFormatError(f"{path}: every row needs 3 columns")
    cols = np.array(rows, dtype=float).T
    return DischargeLog(pack, cols[0], cols[1], cols[2],
                        step_indices=detect_power_steps(cols[1]))


# --- motor fit ---------------------------------------------------------------

def _nonneg_power_lstsq(omega: np.ndarray, power: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Least squares of power on [omega, omega^3, omega^6] with negative
    coefficients clamped to zero and the rest refit."""
    design = np.column_stack([omega, omega ** 3, omega ** 6])
    active = [0, 1, 2]
    coeffs = np.zeros(3)
    clamped: list[int] = []
    while active:
        sub = design[:, active]
        scale = np.linalg.norm(sub, axis=0)
        scale[scale == 0] = 1.0
        sol, *_ = np.linalg.lstsq(sub / scale, power, rcond=None)
        sol = sol / scale
        if np.all(sol >= 0):
            for pos, col in enumerate(active):
                coeffs[col] = sol[pos]
            return coeffs, clamped
        keep = []
        for pos, col in enumerate(active):
            if sol[pos] < 0:
                clamped.append(col)
            else:
                keep.append(col)
        active = keep
    return coeffs, clamped


def fit_motor(log: ThrustLog) -> tuple[MotorPropCoeffs, FitReport]:
    """Fit one motor-propeller pairing from a thrust-stand log.

    Returns the coefficients and a report whose RMSE and residuals are on
    the electrical-power signal (W).
    """
    if log.row_count < MIN_THRUST_ROWS:
        raise FitError(f"need at least {MIN_THRUST_ROWS} rows, got {log.row_count}")
    if np.unique(log.omega).size < 3:
        raise FitError("rank-deficient thrust log: fewer than 3 distinct speeds")

    w2 = log.omega ** 2
    denom = float(np.sum(w2 * w2))
    if denom == 0.0:
        raise FitError("all speeds are zero; drag coefficient is undetermined")
    c_d = float(np.sum(log.torque * w2) / denom)
    if c_d <= 0:
        raise FitError(f"fitted drag coefficient is not positive ({c_d:.3e})")

    warnings: list[str] = []
    m, clamped = _nonneg_power_lstsq(log.omega, log.electrical_power)
    if clamped:
        names = ", ".join(f"m{c}" for c in sorted(clamped))
        warnings.append(f"negative least-squares solution for {names}; clamped to 0 and refit")
    try:
        coeffs = MotorPropCoeffs(c_d, float(m[0]), float(m[1]), float(m[2]))
    except Exception as err:
        raise FitError(f"fitted coefficients are not usable: {err}") from err

    predicted = m[0] * log.omega + m[1] * log.omega ** 3 + m[2] * log.omega ** 6
    residuals = log.electrical_power - predicted
    rmse = float(np.sqrt(np.mean(residuals ** 2)))

    spinning = log.omega > 0
    if np.any(spinning):
        w = log.omega[spinning]
        eta = c_d * w ** 3 / (m[0] * w + m[1] * w ** 3 + m[2] * w ** 6)
        if np.any(eta > 1.0):
            worst = float(w[np.argmax(eta)])
            warnings.append(
                f"fitted efficiency exceeds 1 near omega = {worst:.0f} rad/s; "
                "check the log or the pairing")
    return coeffs, FitReport(rmse, residuals, tuple(warnings))


# --- battery fit, step 1: resistance -----------------------------------------

@dataclass(frozen=True)
class StepResistance:
    """One resistance estimate extracted from a power step.

    ``current_jump_a_per_ah`` is the capacity-normalized current change
    across the step; the voltage-noise-induced error of the estimate
    scales with its inverse, so it doubles as a precision weight.
    """

    log_index: int
    time_s: float
    resistance_ohm: float
    avg_cell_power_w_per_ah: float
    cell_capacity_ah: float
    current_jump_a_per_ah: float


@dataclass(frozen=True)
class ResistanceFit:
    """Result of the resistance stage: model coefficients, the floor, and
    the per-step estimates behind them."""

    b0: float
    b1: float
    b2: float
    r_min: float
    steps: tuple[StepResistance, ...]
    warnings: tuple[str, ...] = ()


def _cell_energy_zoh(time_s: np.ndarray, p_cell: np.ndarray) -> np.ndarray:
    """Cumulative consumed energy (kJ/Ah) with the power held constant
    from each sample to the next."""
    e = np.zeros_like(p_cell)
    if time_s.size > 1:
        e[1:] = np.cumsum(p_cell[:-1] * np.diff(time_s)) / 1000.0
    return e


def _running_avg_power(time_s: np.ndarray, p_cell: np.ndarray,
                       e_cell: np.ndarray) -> np.ndarray:
    elapsed = time_s - time_s[0]
    avg = np.empty_like(p_cell)
    avg[0] = p_cell[0]
    if time_s.size > 1:
        avg[1:] = e_cell[1:] * 1000.0 / elapsed[1:]
    return avg


def fit_battery_resistance(logs: list[DischargeLog]) -> ResistanceFit:
    """Estimate the resistance model from the power steps of the logs."""
    warnings: list[str] = []
    steps: list[StepResistance] = []
    for li, log in enumerate(logs):
        pack = log.pack
        c_cell = pack.cell_capacity_ah
        scale = pack.cell_count * c_cell
        p_cell = log.pack_power_w / scale
        e_cell = _cell_energy_zoh(log.time_s, p_cell)
        avg = _running_avg_power(log.time_s, p_cell, e_cell)
        u_cell = log.pack_voltage_v / pack.series_count
        for i in log.step_indices:
            du = u_cell[i] - u_cell[i - 1]
            # capacity-normalized per-cell current change, A/Ah
            di = (log.pack_power_w[i] / log.pack_voltage_v[i]
                  - log.pack_power_w[i - 1] / log.pack_voltage_v[i - 1]) \
                / (pack.parallel_count * c_cell)
            if di == 0.0:
                warnings.append(f"log {li}: step at t = {log.time_s[i]:.2f} s has no "
                                "current change; excluded")
                continue
            if du == 0.0:
                warnings.append(f"log {li}: step at t = {log.time_s[i]:.2f} s has zero "
                                "voltage jump; excluded")
                continue
            r = -du / di
            if r <= 0.0:
                warnings.append(f"log {li}: step at t = {log.time_s[i]:.2f} s gives a "
                                f"nonpositive resistance ({r:.2e}); excluded")
                continue
            steps.append(StepResistance(li, float(log.time_s[i]), float(r),
                                        float(avg[i]), c_cell, float(abs(di))))
    if not steps:
        raise FitError("no usable power steps found in the discharge logs")

    # rows are precision-weighted by the current jump: the voltage-noise
    # error of each extracted resistance scales as 1/|dI|
    weight = np.array([s.current_jump_a_per_ah for s in steps])
    design = weight[:, None] * np.array(
        [[1.0, s.avg_cell_power_w_per_ah, s.cell_capacity_ah] for s in steps])
    target = weight * np.array([s.resistance_ohm for s in steps])
    scale = np.linalg.norm(design, axis=0)
    scale[scale == 0] = 1.0
    if np.linalg.matrix_rank(design / scale) < 3:
        warnings.append("resistance design is rank-deficient (too few distinct steps "
                        "or packs); coefficients are the minimum-norm solution")
    sol, *_ = np.linalg.lstsq(design / scale, target, rcond=None)
    b0, b1, b2 = (sol / scale).tolist()
    r_min = max(min(s.resistance_ohm for s in steps), R_MIN_FLOOR)
    return ResistanceFit(b0, b1, b2, r_min, tuple(steps), tuple(warnings))


# --- battery fit, step 2: open-circuit polynomial and RC lump ----------------

class _PreparedLog:
    """Per-log arrays that do not depend on the fitted parameters."""

    def __init__(self, log: DischargeLog, resistance: ResistanceFit):
        pack = log.pack
        c_cell = pack.cell_capacity_ah
        self.p_cell = log.pack_power_w / (pack.cell_count * c_cell)
        self.e_cell = _cell_energy_zoh(log.time_s, self.p_cell)
        avg = _running_avg_power(log.time_s, self.p_cell, self.e_cell)
        self.r0 = np.maximum(resistance.b0 + resistance.b1 * avg + resistance.b2 * c_cell,
                             resistance.r_min)
        self.u_obs = log.pack_voltage_v / pack.series_count
        dts = np.diff(log.time_s)
        self.uniform = dts.size > 0 and bool(
            np.allclose(dts, dts[0], rtol=1e-9, atol=1e-12))
        self.dt0 = float(dts[0]) if dts.size else 0.0
        self.dts = dts


def _rc_voltage_series(prep: _PreparedLog, k: float, tau: float) -> np.ndarray:
    """RC-branch voltage at every sample for piecewise-constant power,
    using the exact single-interval response."""
    n = prep.p_cell.size
    if n == 1:
        return np.zeros(1)
    if prep.uniform:
        a = math.exp(-prep.dt0 / tau)
        x = (1.0 - a) * k * prep.p_cell[:-1]
        y = lfilter([1.0], [1.0, -a], x)
        return np.concatenate(([0.0], y))
    u = np.empty(n)
    u[0] = 0.0
    for i in range(n - 1):
        a = math.exp(-prep.dts[i] / tau)
        u[i + 1] = a * u[i] + (1.0 - a) * k * prep.p_cell[i]
    return u


def _simulated_cell_voltage(prep: _PreparedLog, a: np.ndarray,
                            k: float, tau: float) -> np.ndarray | None:
    u_cap = _rc_voltage_series(prep, k, tau)
    e = prep.e_cell
    u0 = ((a[3] * e + a[2]) * e + a[1]) * e + a[0]
    d = u0 - u_cap
    disc = d * d - 4.0 * prep.r0 * prep.p_cell
    if np.any(disc < 0.0):
        return None
    return 0.5 * (d + np.sqrt(disc))


def _compass_search(objective, x0: np.ndarray, scales: np.ndarray,
                    max_iterations: int, rel_tol: float,
                    propose=None) -> tuple[np.ndarray, float, bool]:
    """Monotone pattern search: accept only improving points, shrink the
    step on stalled sweeps, stop when an accepted sweep improves the
    objective by less than ``rel_tol`` relatively (or on the sweep cap).

    ``propose``, when given, supplies one extra candidate per sweep (for
    problem-specific moves); it goes through the same accept-if-better
    gate, so descent stays monotone.
    """
    x = np.array(x0, dtype=float)
    f = objective(x)
    if not math.isfinite(f):
        raise FitError(f"objective is not finite at the initial point {x0.tolist()}")
    step = 0.1
    for _ in range(max_iterations):
        f_before = f
        improved = False
        if propose is not None:
            cand = propose(x)
            if cand is not None:
                fc = objective(cand)
                if math.isfinite(fc) and fc < f:
                    x, f = cand, fc
                    improved = True
        for j in range(x.size):
            for sign in (1.0, -1.0):
                cand = x.copy()
                cand[j] = x[j] + sign * step * scales[j]
                fc = objective(cand)
                if math.isfinite(fc) and fc < f:
                    x, f = cand, fc
                    improved = True
        if improved:
            if f_before - f <= rel_tol * max(f_before, 1e-300):
                return x, f, True
        else:
            step *= 0.5
            if step < 1e-10:
                return x, f, True
    return x, f, False


def fit_battery_dynamics(logs: list[DischargeLog], resistance: ResistanceFit,
                         max_iterations: int = 500,
                         rel_tol: float = 1e-8) -> tuple[BatteryParams, FitReport]:
    """Fit the open-circuit polynomial and the RC lump with the resistance
    model held fixed.

    Minimizes the pooled RMSE between simulated and logged per-cell
    voltage over (a0..a3, k, tau_rc), starting from the built-in
    coefficient set. The report's residuals are the concatenated per-cell
    voltage errors at the returned parameters.
    """
    if not logs:
        raise FitError("no discharge logs given")
    prepared = [_PreparedLog(log, resistance) for log in logs]
    base = builtin_battery_params()
    x0 = np.array([base.a0, base.a1, base.a2, base.a3, base.k, base.tau_rc])
    scales = np.abs(x0)

    def residual_vector(x: np.ndarray) -> np.ndarray | None:
        a = x[:4]
        k, tau = float(x[4]), float(x[5])
        # keep iterates inside the constructible parameter region
        if tau <= 0.0 or not 3.0 <= a[0] <= 4.4:
            return None
        parts = []
        for prep in prepared:
            u = _simulated_cell_voltage(prep, a, k, tau)
            if u is None:
                return None
            parts.append(u - prep.u_obs)
        return np.concatenate(parts)

    def objective(x: np.ndarray) -> float:
        res = residual_vector(x)
        if res is None:
            return math.inf
        return float(np.sqrt(np.mean(res ** 2)))

    def refit_polynomial(x: np.ndarray) -> np.ndarray | None:
        # For fixed (k, tau) the quadratic gives the observed source term
        # D = U + R0*P/U, so the polynomial coefficients solve a linear
        # least-squares problem; the accept-if-better gate keeps descent
        # monotone even though this transforms the residual slightly.
        k, tau = float(x[4]), float(x[5])
        if tau <= 0.0:
            return None
        designs, targets = [], []
        for prep in prepared:
            if np.any(prep.u_obs <= 0.0):
                return None
            u_cap = _rc_voltage_series(prep, k, tau)
            d_obs = prep.u_obs + prep.r0 * prep.p_cell / prep.u_obs
            e = prep.e_cell
            designs.append(np.column_stack([np.ones_like(e), e, e * e, e ** 3]))
            targets.append(d_obs + u_cap)
        design = np.vstack(designs)
        col_scale = np.linalg.norm(design, axis=0)
        col_scale[col_scale == 0] = 1.0
        sol, *_ = np.linalg.lstsq(design / col_scale, np.concatenate(targets), rcond=None)
        cand = x.copy()
        cand[:4] = sol / col_scale
        return cand

    best, rmse, converged = _compass_search(objective, x0, scales,
                                            max_iterations, rel_tol,
                                            propose=refit_polynomial)
    warnings: list[str] = []
    if not converged:
        warnings.append(f"stopped at the {max_iterations}-sweep cap before converging")
    params = BatteryParams(
        a0=float(best[0]), a1=float(best[1]), a2=float(best[2]), a3=float(best[3]),
        b0=resistance.b0, b1=resistance.b1, b2=resistance.b2,
        r_min=resistance.r_min, tau_rc=float(best[5]), k=float(best[4]))
    residuals = residual_vector(best)
    assert residuals is not None
    return params, FitReport(rmse, residuals, tuple(warnings))
