import logging
import math
from dataclasses import dataclass
from typing import Optional

from scipy.optimize import brentq

from scdensity.semiclassical.airy import airy_ai
from scdensity.semiclassical.potentials import (
    PotentialModel, Region, Side, TurningGeometry, anchored_integral, frequency, momentum,
    turning_points)

logger = logging.getLogger(__name__)

MATCH_XTOL = 1e-14
TURNING_WINDOW = 1e-6


@dataclass(frozen=True)
class LangerPoint:
    z: float
    s_magnitude: float
    side: Side
    region: Region


def matching_point(pot: PotentialModel, energy: float, mass: float = 1.0,
                   geometry: Optional[TurningGeometry] = None) -> float:
    """x_m with S(x_m, x-, E) = S(x+, x_m, E)."""
    if geometry is None:
        geometry = turning_points(pot, energy)
    mid = geometry.midpoint

    def left(x):
        return anchored_integral(pot, x, energy, Side.LEFT, geometry, mass).magnitude

    def right(x):
        return anchored_integral(pot, x, energy, Side.RIGHT, geometry, mass).magnitude

    half = left(mid) + right(mid)

    def residual(x):
        s_left = left(x) if x <= mid else half - right(x)
        return 2.0 * s_left - half

    if residual(mid) == 0.0:
        return mid
    x_match = brentq(residual, geometry.x_minus, geometry.x_plus,
                     xtol=MATCH_XTOL * max(1.0, geometry.width), maxiter=500)
    logger.debug(f"Matching point at E={energy:.10g}: x_m={x_match:.14g}")
    return float(x_match)


def _geometry_for(system, energy):
    if energy is None or energy == system.fermi_energy:
        return system.fermi_energy, system.fermi_geometry
    geometry = turning_points(system.potential, energy)
    geometry = geometry.with_match(matching_point(system.potential, energy, system.mass, geometry))
    return energy, geometry


def z_from_action(s_magnitude: float, region: Region, hbar: float) -> float:
    magnitude = (1.5 * s_magnitude / hbar) ** (2.0 / 3.0)
    if region is Region.FORBIDDEN:
        return -magnitude
    if region is Region.TURNING:
        return 0.0
    return magnitude


def z_of(system, x: float, energy: Optional[float] = None,
         side: Optional[Side] = None, geometry: Optional[TurningGeometry] = None) -> LangerPoint:
    if geometry is None:
        energy, geometry = _geometry_for(system, energy)
    else:
        energy = geometry.energy
    side = geometry.side(x) if side is None else side
    point = anchored_integral(system.potential, x, energy, side, geometry, system.mass)
    z = z_from_action(point.magnitude, point.region, system.hbar)
    return LangerPoint(z=z, s_magnitude=point.magnitude, side=side, region=point.region)


def langer_wavefunction(system, x: float, energy: Optional[float] = None,
                        geometry: Optional[TurningGeometry] = None,
                        omega: Optional[float] = None) -> float:
    """phi(x, E) = sqrt(2 m omega / p) z^(1/4) Ai(-z), continued into the forbidden region."""
    if geometry is None:
        energy, geometry = _geometry_for(system, energy)
    else:
        energy = geometry.energy
    pot, mass, hbar = system.potential, system.mass, system.hbar
    if omega is None:
        omega = system.omega_f if energy == system.fermi_energy else frequency(pot, energy, mass)

    x_t = geometry.nearest_turning_point(x)
    if abs(x - x_t) < TURNING_WINDOW * geometry.width:
        slope = abs(float(pot.gradient(x_t)))
        inward = (x - x_t) if x_t == geometry.x_minus else (x_t - x)
        z = (2.0 * mass * slope / hbar ** 2) ** (1.0 / 3.0) * inward
        prefactor = math.sqrt(2.0 * mass * omega) * (2.0 * mass * slope * hbar) ** (-1.0 / 6.0)
        return float(prefactor * airy_ai(-z))

    point = z_of(system, x, geometry=geometry)
    p = momentum(pot, x, energy, mass).magnitude
    if point.region is Region.FORBIDDEN:
        return float(math.sqrt(2.0 * mass * omega / p) * abs(point.z) ** 0.25 * airy_ai(abs(point.z)))
    return float(math.sqrt(2.0 * mass * omega / p) * point.z ** 0.25 * airy_ai(-point.z))
