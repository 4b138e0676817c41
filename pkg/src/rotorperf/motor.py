"""Lumped motor-propeller efficiency model.

The propeller loads the motor with a drag torque ``Q = c_d * omega^2``.
Electrical input power is modelled as a speed polynomial
``m0*omega + m1*omega^3 + m2*omega^6`` (sliding friction, mechanical
output plus resistive-loss lumps at constant supply voltage), giving

    eta(omega) = c_d*omega^3 / (m0*omega + m1*omega^3 + m2*omega^6)

For estimation a constant efficiency is normally sufficient; the full
curve is for cases where fitted coefficients for the specific
motor-propeller pairing are available (see :mod:`rotorperf.identification`).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidParameterError


@dataclass(frozen=True)
class MotorPropCoeffs:
    """Coefficients of one motor-propeller pairing.

    ``c_d`` (N*m*s^2) maps squared speed to drag torque; ``m0`` (N*m),
    ``m1`` (W*s^3) and ``m2`` (W*s^6) are the electrical-power lumps.
    """

    c_d: float
    m0: float
    m1: float
    m2: float

    def __post_init__(self):
        if not self.c_d > 0:
            raise InvalidParameterError(f"c_d must be > 0, got {self.c_d}")
        if self.m0 < 0:
            raise InvalidParameterError(f"m0 must be >= 0, got {self.m0}")
        if not self.m1 > 0:
            raise InvalidParameterError(f"m1 must be > 0, got {self.m1}")
        if self.m2 < 0:
            raise InvalidParameterError(f"m2 must be >= 0, got {self.m2}")


def drag_torque(coeffs: MotorPropCoeffs, omega: float) -> float:
    """Propeller drag torque (N*m) at rotational speed omega (rad/s)."""
    if omega < 0:
        raise InvalidParameterError(f"omega must be >= 0, got {omega}")
    return coeffs.c_d * omega * omega


def efficiency(coeffs: MotorPropCoeffs, omega: float) -> float:
    """Motor efficiency at speed omega (rad/s).

    Undefined at standstill (the limit is 0 when ``m0 > 0``). Values
    above 1 indicate a bad coefficient fit and are returned as-is so the
    problem surfaces; the identification stage attaches a warning instead
    of clamping.
    """
    if omega <= 0:
        raise InvalidParameterError(f"efficiency is undefined at omega = {omega}")
    w3 = omega ** 3
    return coeffs.c_d * w3 / (coeffs.m0 * omega + coeffs.m1 * w3 + coeffs.m2 * w3 * w3)


def electrical_power(torque_nm: float, omega: float, eta: float) -> float:
    """Electrical power (W) drawn to produce ``torque_nm`` at ``omega``."""
    if torque_nm < 0:
        raise InvalidParameterError(f"torque must be >= 0, got {torque_nm}")
    if omega < 0:
        raise InvalidParameterError(f"omega must be >= 0, got {omega}")
    return electrical_from_mechanical(torque_nm * omega, eta)


def electrical_from_mechanical(mechanical_power_w: float, eta: float) -> float:
    """Electrical power (W) for a given mechanical power and efficiency."""
    if eta <= 0:
        raise InvalidParameterError(f"efficiency must be > 0, got {eta}")
    return mechanical_power_w / eta
