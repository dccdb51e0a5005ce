"""Uniform semiclassical density and kinetic-energy density of N fermions.

All per-point quantities depend on the Fermi level only: p_F(x), the anchored
action S_F(x), z_F(x), the angle alpha_F(x) = omega_F * tau(x, E_F) and Airy
functions of -z_F. In the forbidden region the same expressions are evaluated
on the continued branch p = i|p|, sqrt(z) = i sqrt|z|, z^(3/2) = -i |z|^(3/2),
alpha = i|alpha| with complex arithmetic, and the imaginary residue is checked.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from joblib import Parallel, delayed
from scipy import special
from tqdm import tqdm

from scdensity.errors import ComplexResidual
from scdensity.semiclassical.airy import airy_origin_product, csch, xi0, xi0_hyperbolic
from scdensity.semiclassical.grids import DensityProfile, GridSpec, Kind, Method
from scdensity.semiclassical.langer import TURNING_WINDOW
from scdensity.semiclassical.potentials import (
    OrbitPoint, Region, Side, anchored_integral, momentum)

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-9
JUMP_STEP = 1e-4
DEFAULT_POINTS = 1200
DEFAULT_MARGIN = 4.0
TURNING_REGION_WIDTH = 3.0


@dataclass(frozen=True)
class SemiclassicalTerms:
    x: float
    region: Region
    side: Side
    p_f: float
    s_f: float
    z_f: float
    alpha_f: float
    ai: float
    ai_prime: float
    density: float
    n_leading: float
    n_correction: float
    ked: float
    t_leading: float
    t_correction: float
    airy_ked_term: float


@dataclass(frozen=True)
class AsymptoticEstimate:
    region: Region
    gamma: float
    density: float
    density_leading: float
    density_correction: float
    ked: float
    density_printed: float
    ked_printed: float
    turning_density: float
    turning_correction: float
    turning_ked: float


@dataclass(frozen=True)
class JumpEstimate:
    predicted: float
    measured: float
    limit: float
    left_slope: float
    right_slope: float
    value_jump: float

    @property
    def ratio(self) -> float:
        return self.measured / self.predicted

    @property
    def normalized_ratio(self) -> float:
        """measured / predicted over its small-gamma limit; tends to 1."""
        return self.ratio / self.limit


def _real(value, operation, x):
    value = complex(value)
    if abs(value.imag) > RESIDUAL_TOL * abs(value.real) and abs(value.imag) > 1e-300:
        raise ComplexResidual(
            f"imaginary residue {value.imag:.3e} against real part {value.real:.3e} at x={x:.12g}",
            operation)
    return value.real


def _turning_terms(system, x, x_t, side):
    """Closed-form limits of every term at a simple turning point."""
    pot, mass, hbar, omega = system.potential, system.mass, system.hbar, system.omega_f
    slope = abs(float(pot.gradient(x_t)))
    curvature = float(pot.curvature(x_t))
    ai0, aip0, _, _ = special.airy(0.0)
    prod = airy_origin_product()
    kappa = (2.0 * mass * slope / hbar ** 2) ** (1.0 / 3.0)
    n_correction = mass * omega ** 2 * prod / (6.0 * slope)
    n_leading = kappa * aip0 ** 2 + 2.0 * curvature * prod / (15.0 * slope)
    t_leading = slope * prod / 3.0
    return SemiclassicalTerms(
        x=float(x), region=Region.TURNING, side=side, p_f=0.0, s_f=0.0, z_f=0.0, alpha_f=0.0,
        ai=float(ai0), ai_prime=float(aip0),
        density=n_leading + n_correction, n_leading=n_leading, n_correction=n_correction,
        ked=t_leading, t_leading=t_leading, t_correction=0.0, airy_ked_term=t_leading)


def _allowed_terms(system, x, side, p, s, tau):
    mass, hbar, omega = system.mass, system.hbar, system.omega_f
    z32 = 1.5 * s / hbar
    z = z32 ** (2.0 / 3.0)
    sz = math.sqrt(z)
    alpha = omega * tau
    ai, aip, _, _ = special.airy(-z)
    prod = ai * aip
    csc = 1.0 / math.sin(alpha)
    smooth = (p / hbar) * (sz * ai ** 2 + aip ** 2 / sz)
    density = smooth + (p / hbar) * (hbar * mass * omega * csc / p ** 2 - 0.5 / z32) * prod
    n_leading = smooth + (p / hbar) * (hbar * mass * omega / (p ** 2 * alpha) - 0.5 / z32) * prod
    n_correction = (mass * omega / p) * xi0(alpha) * prod
    airy_ked_term = p * omega * csc * prod / 3.0
    ked = p ** 2 * density / (6.0 * mass) + airy_ked_term
    t_leading = p ** 2 * n_leading / (6.0 * mass) + omega * p * prod / (3.0 * alpha)
    t_correction = p ** 2 * n_correction / (2.0 * mass)
    return SemiclassicalTerms(
        x=float(x), region=Region.ALLOWED, side=side, p_f=p, s_f=s, z_f=z, alpha_f=alpha,
        ai=float(ai), ai_prime=float(aip),
        density=float(density), n_leading=float(n_leading), n_correction=float(n_correction),
        ked=float(ked), t_leading=float(t_leading), t_correction=float(t_correction),
        airy_ked_term=float(airy_ked_term))


def _forbidden_terms(system, x, side, p_abs, s_abs, tau_abs):
    mass, hbar, omega = system.mass, system.hbar, system.omega_f
    z32_abs = 1.5 * s_abs / hbar
    z_abs = z32_abs ** (2.0 / 3.0)
    alpha_abs = omega * tau_abs
    ai, aip, _, _ = special.airy(z_abs)
    prod = ai * aip

    p = 1j * p_abs
    p2 = p * p
    sz = 1j * math.sqrt(z_abs)
    z32 = -1j * z32_abs
    alpha = 1j * alpha_abs
    csc = -1j * csch(alpha_abs)
    xi = -1j * xi0_hyperbolic(alpha_abs)

    smooth = (p / hbar) * (sz * ai ** 2 + aip ** 2 / sz)
    density = smooth + (p / hbar) * (hbar * mass * omega * csc / p2 - 0.5 / z32) * prod
    n_leading = smooth + (p / hbar) * (hbar * mass * omega / (p2 * alpha) - 0.5 / z32) * prod
    n_correction = (mass * omega / p) * xi * prod
    airy_ked_term = p * omega * csc * prod / 3.0
    ked = p2 * density / (6.0 * mass) + airy_ked_term
    t_leading = p2 * n_leading / (6.0 * mass) + omega * p * prod / (3.0 * alpha)
    t_correction = p2 * n_correction / (2.0 * mass)

    op = "density_uniform"
    return SemiclassicalTerms(
        x=float(x), region=Region.FORBIDDEN, side=side, p_f=p_abs, s_f=s_abs, z_f=-z_abs,
        alpha_f=alpha_abs, ai=float(ai), ai_prime=float(aip),
        density=_real(density, op, x), n_leading=_real(n_leading, op, x),
        n_correction=_real(n_correction, op, x),
        ked=_real(ked, "ked_uniform", x), t_leading=_real(t_leading, "ked_uniform", x),
        t_correction=_real(t_correction, "ked_uniform", x),
        airy_ked_term=_real(airy_ked_term, "ked_uniform", x))


def semiclassical_terms(system, x: float, side: Optional[Side] = None) -> SemiclassicalTerms:
    geometry = system.fermi_geometry
    energy, mass = system.fermi_energy, system.mass
    side = geometry.side(x) if side is None else side
    x_t = geometry.nearest_turning_point(x)
    if abs(x - x_t) < TURNING_WINDOW * geometry.width:
        return _turning_terms(system, x, x_t, side)

    pot = system.potential
    orbit = anchored_integral(pot, x, energy, side, geometry, mass, "action")
    tau = anchored_integral(pot, x, energy, side, geometry, mass, "time")
    p = momentum(pot, x, energy, mass).magnitude
    if orbit.region is Region.FORBIDDEN:
        return _forbidden_terms(system, x, side, p, orbit.magnitude, tau.magnitude)
    return _allowed_terms(system, x, side, p, orbit.magnitude, tau.magnitude)


def alpha_f(system, x: float) -> OrbitPoint:
    """omega_F times the time of flight from the anchoring turning point."""
    geometry = system.fermi_geometry
    tau = anchored_integral(system.potential, x, system.fermi_energy, geometry.side(x),
                            geometry, system.mass, "time")
    return OrbitPoint(system.omega_f * tau.magnitude, tau.region, tau.side)


def density_uniform(system, x: float) -> float:
    return semiclassical_terms(system, x).density


def density_leading(system, x: float) -> float:
    return semiclassical_terms(system, x).n_leading


def density_correction(system, x: float) -> float:
    return semiclassical_terms(system, x).n_correction


def ked_uniform(system, x: float) -> float:
    return semiclassical_terms(system, x).ked


def fermi_momentum(system, x: float) -> float:
    """p_F(x) in the allowed region, 0 outside."""
    kinetic = system.fermi_energy - float(system.potential(x))
    return math.sqrt(2.0 * system.mass * kinetic) if kinetic > 0 else 0.0


def density_tf(system, x: float) -> float:
    return fermi_momentum(system, x) / (math.pi * system.hbar)


def ked_tf(system, x: float) -> float:
    return fermi_momentum(system, x) ** 3 / (6.0 * math.pi * system.hbar * system.mass)


def _turning_laws(system, x_t, hbar_g):
    slope = abs(float(system.potential.gradient(x_t)))
    g13, g23 = special.gamma(1.0 / 3.0), special.gamma(2.0 / 3.0)
    density = (2.0 * system.mass * slope / (9.0 * hbar_g ** 2)) ** (1.0 / 3.0) / g13 ** 2
    correction = -system.mass * system.omega_f ** 2 / (18.0 * g13 * g23 * slope)
    ked = -slope / (9.0 * g13 * g23)
    return density, correction, ked


def regional_asymptotics(system, x: float, gamma: float = 1.0) -> AsymptoticEstimate:
    """Small-gamma estimates of n and t at x for the system scaled by gamma."""
    geometry = system.fermi_geometry
    mass, omega = system.mass, system.omega_f
    hbar_g = system.hbar * gamma
    x_t = geometry.nearest_turning_point(x)
    turning = _turning_laws(system, x_t, hbar_g)
    slope = abs(float(system.potential.gradient(x_t)))
    width = TURNING_REGION_WIDTH * (hbar_g ** 2 / (2.0 * mass * slope)) ** (1.0 / 3.0)

    if abs(x - x_t) < width:
        density, correction, ked = turning
        return AsymptoticEstimate(
            region=Region.TURNING, gamma=gamma, density=density, density_leading=density,
            density_correction=correction, ked=ked, density_printed=density, ked_printed=ked,
            turning_density=turning[0], turning_correction=turning[1], turning_ked=turning[2])

    energy, side = system.fermi_energy, geometry.side(x)
    s = anchored_integral(system.potential, x, energy, side, geometry, mass, "action").magnitude
    tau = anchored_integral(system.potential, x, energy, side, geometry, mass, "time")
    p = momentum(system.potential, x, energy, mass).magnitude
    alpha = omega * tau.magnitude

    if tau.region is Region.FORBIDDEN:
        decay = math.exp(-2.0 * s / hbar_g)
        dressing = 1.0 + hbar_g / (36.0 * s)
        leading = decay * (mass * omega * dressing / (4.0 * math.pi * p * alpha)
                           - hbar_g * p / (24.0 * math.pi * s ** 2))
        correction = decay * mass * omega * xi0_hyperbolic(alpha) * dressing / (4.0 * math.pi * p)
        density = leading + correction
        ked = (-p ** 2 * density / (6.0 * mass)
               - omega * p * decay * dressing * csch(alpha) / (12.0 * math.pi))
        printed = decay * (mass * omega * csch(alpha) / (4.0 * math.pi * p)
                           - p / (6.0 * math.pi * s))
        ked_printed = (2.0 * p ** 3 / (3.0 * mass * s)
                       - 3.0 * omega * p * csch(alpha)) * decay / (24.0 * math.pi)
        region = Region.FORBIDDEN
    else:
        wave = math.cos(2.0 * s / hbar_g)
        leading = p / (math.pi * hbar_g) - mass * omega * wave / (2.0 * math.pi * p * alpha)
        correction = -mass * omega * xi0(alpha) * wave / (2.0 * math.pi * p)
        density = leading + correction
        ked = (p ** 3 / (6.0 * math.pi * hbar_g * mass)
               - p * omega * wave / (4.0 * math.pi * math.sin(alpha)))
        printed, ked_printed = density, ked
        region = Region.ALLOWED

    return AsymptoticEstimate(
        region=region, gamma=gamma, density=density, density_leading=leading,
        density_correction=correction, ked=ked, density_printed=printed, ked_printed=ked_printed,
        turning_density=turning[0], turning_correction=turning[1], turning_ked=turning[2])


def derivative_jump_estimate(system, step: Optional[float] = None) -> JumpEstimate:
    """Relative jump of dn/dx at x_m: the closed form m omega_F / (9 N p_F(x_m)) and a measurement.

    Expanding the Airy products to second order in 1/zeta at x_m gives the
    small-gamma limit of measured / predicted,
    12 p_m^2 / (pi^2 m omega_F hbar N) - csc(alpha_m) / pi, which is gamma-invariant.
    """
    geometry = system.fermi_geometry
    x_m = geometry.x_match
    p_m = fermi_momentum(system, x_m)
    mass, omega = system.mass, system.omega_f
    predicted = mass * omega / (9.0 * system.n_particles * p_m)
    fermi_action = system.hbar * system.n_particles
    alpha_m = alpha_f(system, x_m).magnitude
    limit = abs(12.0 * p_m ** 2 / (math.pi ** 2 * mass * omega * fermi_action)
                - 1.0 / (math.pi * math.sin(alpha_m)))

    h = JUMP_STEP * geometry.width if step is None else step

    def n(x, side):
        return semiclassical_terms(system, x, side=side).density

    left_m, right_m = n(x_m, Side.LEFT), n(x_m, Side.RIGHT)
    right_slope = (-3.0 * right_m + 4.0 * n(x_m + h, Side.RIGHT) - n(x_m + 2 * h, Side.RIGHT)) / (2 * h)
    left_slope = (3.0 * left_m - 4.0 * n(x_m - h, Side.LEFT) + n(x_m - 2 * h, Side.LEFT)) / (2 * h)
    measured = abs(right_slope - left_slope) / left_m
    logger.debug(f"Slope jump at x_m={x_m:.8g}: measured={measured:.6e} predicted={predicted:.6e}")
    return JumpEstimate(predicted=predicted, measured=measured, limit=limit, left_slope=left_slope,
                        right_slope=right_slope, value_jump=abs(right_m - left_m))


def default_grid(system, points: int = DEFAULT_POINTS, margin: float = DEFAULT_MARGIN) -> GridSpec:
    """[x- - margin*l, x+ + margin*l] with l the turning-point length scale."""
    geometry = system.fermi_geometry
    pad = margin * system.length_scale
    return GridSpec(geometry.x_minus - pad, geometry.x_plus + pad, points)


def _evaluate_chunk(system, xs, method, kind):
    if method is Method.TF:
        func = density_tf if kind is Kind.DENSITY else ked_tf
        return np.array([func(system, x) for x in xs])
    values = [semiclassical_terms(system, x) for x in xs]
    if kind is Kind.DENSITY:
        return np.array([v.density for v in values])
    return np.array([v.ked for v in values])


def profile(system, grid: GridSpec, method=Method.UNIFORM, kind=Kind.DENSITY,
            n_jobs: int = 1, progress: bool = False, reference=None) -> DensityProfile:
    """Evaluate one method on a grid; Exact and LangerSum are delegated to the reference oracles."""
    method, kind = Method(method), Kind(kind)
    xs = grid.positions()
    metadata = {"system": system.describe(), "grid": f"[{grid.x_min:.8g}, {grid.x_max:.8g}] x {grid.points}"}

    if method is Method.EXACT:
        from scdensity.reference.eigensolver import exact_profile

        return exact_profile(system, grid, kind, solution=reference, metadata=metadata)
    if method is Method.LANGER_SUM:
        from scdensity.reference.langer_sum import langer_sum_profile

        return langer_sum_profile(system, grid, kind, metadata=metadata)

    if n_jobs == 1:
        chunks = np.array_split(xs, max(1, min(len(xs), 50)))
        values = [_evaluate_chunk(system, chunk, method, kind)
                  for chunk in tqdm(chunks, desc=f"{kind.value}:{method.value}", disable=not progress)]
    else:
        chunks = np.array_split(xs, max(1, 4 * abs(n_jobs)))
        values = Parallel(n_jobs=n_jobs)(
            delayed(_evaluate_chunk)(system, chunk, method, kind) for chunk in chunks)
    result = DensityProfile(xs, np.concatenate(values), method, kind, metadata)
    logger.debug(f"{result.column}: integral {result.metadata['integral']:.10g} on {metadata['grid']}")
    return result
