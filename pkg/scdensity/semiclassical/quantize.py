import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

import pandas as pd
from scipy.optimize import brentq

from scdensity.errors import (
    DegenerateTurningPoint, NoBoundOrbit, NonIntegerParticleNumber, QuadratureFailure,
    SpectrumOverflow)
from scdensity.semiclassical.langer import matching_point
from scdensity.semiclassical.potentials import (
    PotentialModel, TurningGeometry, frequency, full_action, turning_points)

logger = logging.getLogger(__name__)

ENERGY_RTOL = 1e-14
ENERGY_XTOL = 1e-13
MAX_BRACKET_STEPS = 200
MAX_BRACKET_STEPS_BOUNDED = 30
PARTICLE_NUMBER_TOL = 1e-9


@dataclass(frozen=True)
class QuantumSystem:
    """A potential filled with N spin-less fermions, with Fermi-level quantities cached."""

    potential: PotentialModel
    hbar: float
    mass: float
    n_particles: int
    fermi_energy: float
    fermi_geometry: TurningGeometry
    omega_f: float
    length_scale: float

    @property
    def fermi_action(self) -> float:
        """S(E_F, x+, x-) = N pi hbar."""
        return math.pi * self.hbar * self.n_particles

    def turning_slope(self, x_t) -> float:
        return abs(float(self.potential.gradient(x_t)))

    def describe(self) -> str:
        g = self.fermi_geometry
        return (f"{self.potential.describe()} hbar={self.hbar:g} m={self.mass:g} N={self.n_particles} "
                f"E_F={self.fermi_energy:.10g} x-={g.x_minus:.8g} x+={g.x_plus:.8g} "
                f"x_m={g.x_match:.8g} omega_F={self.omega_f:.10g} l={self.length_scale:.6g}")


@dataclass(frozen=True)
class SpectrumTable:
    entries: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        energies = [e for _, e in self.entries]
        assert all(a < b for a, b in zip(energies, energies[1:])), "spectrum must increase with lambda"

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(list(self.entries), columns=["lambda", "e_wkb"])


def _action_residual(pot, mass, target):
    def residual(energy):
        if energy <= pot.vmin_value:
            return -target
        return full_action(pot, energy, mass) - target
    return residual


def _bracket(pot, residual, scale):
    vmin, sup = pot.vmin_value, pot.sup_value
    lower = vmin
    bounded = math.isfinite(sup)
    steps = MAX_BRACKET_STEPS_BOUNDED if bounded else MAX_BRACKET_STEPS
    for k in range(steps):
        if bounded:
            upper = vmin + (sup - vmin) * (1.0 - 0.5 ** (k + 1))
        else:
            upper = vmin + scale * 2.0 ** k
        if residual(upper) >= 0:
            return lower, upper
        lower = upper
    return None


def wkb_energy(pot: PotentialModel, hbar: float, lam: float, mass: float = 1.0) -> float:
    """Energy with I(E) = 2 pi hbar (lam + 1/2)."""
    if lam < -0.5:
        raise ValueError(f"quantum number must be >= -1/2, got {lam}")
    if lam == -0.5:
        return pot.vmin_value
    target = 2.0 * math.pi * hbar * (lam + 0.5)
    residual = _action_residual(pot, mass, target)
    try:
        bracket = _bracket(pot, residual, scale=max(hbar, 1e-3))
    except (DegenerateTurningPoint, QuadratureFailure) as e:
        raise SpectrumOverflow(
            f"{pot.describe()} holds no resolvable WKB level lambda={lam:g} at hbar={hbar:g}: {e}",
            "wkb_energy") from e
    if bracket is None:
        raise SpectrumOverflow(
            f"{pot.describe()} holds no WKB level lambda={lam:g} at hbar={hbar:g}", "wkb_energy")
    energy = brentq(residual, *bracket, xtol=ENERGY_XTOL, rtol=ENERGY_RTOL, maxiter=500)
    logger.debug(f"WKB level lambda={lam:g}: E={energy:.14g} in bracket {bracket}")
    return float(energy)


def spectrum_table(pot: PotentialModel, hbar: float, lambdas: Sequence[float],
                   mass: float = 1.0) -> SpectrumTable:
    entries = [(float(lam), wkb_energy(pot, hbar, lam, mass)) for lam in sorted(lambdas)]
    return SpectrumTable(tuple(entries))


def build_system(pot: PotentialModel, hbar: float = 1.0, mass: float = 1.0,
                 n_particles: int = 1) -> QuantumSystem:
    assert n_particles >= 1, "need at least one particle"
    assert hbar > 0 and mass > 0, "hbar and mass must be positive"
    fermi_energy = wkb_energy(pot, hbar, n_particles - 0.5, mass)
    try:
        geometry = turning_points(pot, fermi_energy)
        geometry = geometry.with_match(matching_point(pot, fermi_energy, mass, geometry))
        omega_f = frequency(pot, fermi_energy, mass)
    except NoBoundOrbit as e:
        raise SpectrumOverflow(f"Fermi level of {n_particles} particles is not bound: {e}",
                               "build_system") from e
    slope = abs(float(pot.gradient(geometry.x_plus)))
    length_scale = (hbar ** 2 / (2.0 * mass * slope)) ** (1.0 / 3.0)
    system = QuantumSystem(
        potential=pot, hbar=float(hbar), mass=float(mass), n_particles=int(n_particles),
        fermi_energy=fermi_energy, fermi_geometry=geometry, omega_f=omega_f,
        length_scale=length_scale)
    logger.debug(f"Built system: {system.describe()}")
    return system


def scaled_particle_number(n_particles: int, gamma: float) -> int:
    if not 0 < gamma <= 1:
        raise NonIntegerParticleNumber(f"gamma must lie in (0, 1], got {gamma}", "gamma_scale")
    scaled = n_particles / gamma
    rounded = int(round(scaled))
    if rounded < 1 or abs(scaled - rounded) > PARTICLE_NUMBER_TOL * max(1.0, scaled):
        raise NonIntegerParticleNumber(
            f"N/gamma = {n_particles}/{gamma:g} = {scaled:.12g} is not an integer", "gamma_scale")
    return rounded


def gamma_scale(system: QuantumSystem, gamma: float) -> QuantumSystem:
    """hbar -> gamma hbar and N -> N / gamma; the Fermi energy is unchanged."""
    n_scaled = scaled_particle_number(system.n_particles, gamma)
    if n_scaled == system.n_particles:
        return system
    return build_system(system.potential, system.hbar * gamma, system.mass, n_scaled)


def parse_gamma(value) -> Fraction:
    """Parse "1/4", "0.25" or 0.25 into an exact reciprocal of an integer."""
    fraction = Fraction(str(value).strip()).limit_denominator(10 ** 6)
    if fraction <= 0 or fraction > 1 or fraction.numerator != 1:
        raise ValueError(f"gamma must be 1/k for an integer k >= 1, got {value}")
    return fraction


def gamma_ladder(gammas: Sequence) -> List[Fraction]:
    return sorted({parse_gamma(g) for g in gammas}, reverse=True)
