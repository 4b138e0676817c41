"""Momentum-theory hover quantities and empirical cruise surrogates.

At hover the induced velocity and mechanical power follow from a
momentum balance over the rotor disks:

    v_ih = sqrt(m*g / (2*rho*pi*r^2*N))
    P_h  = (m*g)^(3/2) / (eta_p * sqrt(2*rho*pi*N) * r)

with N the rotor count (the same count enters both formulas), r the
propeller radius, and eta_p the propeller figure of merit. Forward-flight
operating points are approximated by fixed ratios of hover power and by a
linear model for the inverse normalized optimal speed.

All functions are pure; concurrent use is unrestricted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import EmpiricalCoeffs, Environment, VehicleSpec
from .errors import InvalidParameterError


@dataclass(frozen=True)
class HoverPoint:
    induced_velocity_m_s: float
    hover_power_w: float
    per_rotor_thrust_n: float


@dataclass(frozen=True)
class CruiseTargets:
    power_endurance_w: float
    power_range_w: float
    speed_endurance_m_s: float
    speed_range_m_s: float


def hover_point(spec: VehicleSpec, env: Environment) -> HoverPoint:
    """Induced velocity, mechanical hover power, and per-rotor thrust."""
    weight = spec.mass_kg * env.gravity
    disk = 2.0 * env.air_density * math.pi * spec.propeller_radius_m ** 2 * spec.rotor_count
    v_ih = math.sqrt(weight / disk)
    p_h = weight ** 1.5 / (
        spec.propeller_figure_of_merit
        * math.sqrt(2.0 * env.air_density * math.pi * spec.rotor_count)
        * spec.propeller_radius_m
    )
    return HoverPoint(v_ih, p_h, weight / spec.rotor_count)


def cruise_powers(hover_power_w: float, coeffs: EmpiricalCoeffs) -> tuple[float, float]:
    """Mechanical power at the best-endurance and best-range points."""
    if hover_power_w < 0:
        raise InvalidParameterError(f"hover power must be >= 0, got {hover_power_w}")
    return (coeffs.power_ratio_endurance * hover_power_w,
            coeffs.power_ratio_range * hover_power_w)


def cruise_power_bands(hover_power_w: float,
                       coeffs: EmpiricalCoeffs) -> tuple[tuple[float, float], tuple[float, float]]:
    """One-standard-deviation bands around the cruise powers.

    The bands come from the spread of the fitted power ratios; they do
    not affect the point estimates from :func:`cruise_powers`.
    """
    if hover_power_w < 0:
        raise InvalidParameterError(f"hover power must be >= 0, got {hover_power_w}")
    e_lo = (coeffs.power_ratio_endurance - coeffs.power_ratio_endurance_std) * hover_power_w
    e_hi = (coeffs.power_ratio_endurance + coeffs.power_ratio_endurance_std) * hover_power_w
    r_lo = (coeffs.power_ratio_range - coeffs.power_ratio_range_std) * hover_power_w
    r_hi = (coeffs.power_ratio_range + coeffs.power_ratio_range_std) * hover_power_w
    return (e_lo, e_hi), (r_lo, r_hi)


def optimal_speeds(induced_velocity_m_s: float, surface_area_cm2: float,
                   coeffs: EmpiricalCoeffs) -> tuple[float, float]:
    """Best-endurance and best-range flight speeds (m/s).

    The model is linear in the inverse normalized speed:
    ``v_ih / v = c0 + c1*v_ih + c2*A``, so each speed is the induced
    velocity divided by that expression. With positive coefficients and
    positive inputs the denominators are strictly positive.
    """
    if not induced_velocity_m_s > 0:
        raise InvalidParameterError(
            f"induced velocity must be > 0, got {induced_velocity_m_s}")
    if not surface_area_cm2 > 0:
        raise InvalidParameterError(f"surface area must be > 0, got {surface_area_cm2}")
    inv_e = coeffs.c0e + coeffs.c1e * induced_velocity_m_s + coeffs.c2e * surface_area_cm2
    inv_r = coeffs.c0r + coeffs.c1r * induced_velocity_m_s + coeffs.c2r * surface_area_cm2
    return induced_velocity_m_s / inv_e, induced_velocity_m_s / inv_r


def cruise_targets(hover: HoverPoint, surface_area_cm2: float,
                   coeffs: EmpiricalCoeffs) -> CruiseTargets:
    """Bundle the cruise powers and optimal speeds for one hover point."""
    p_e, p_r = cruise_powers(hover.hover_power_w, coeffs)
    v_e, v_r = optimal_speeds(hover.induced_velocity_m_s, surface_area_cm2, coeffs)
    return CruiseTargets(p_e, p_r, v_e, v_r)
