import logging
from dataclasses import dataclass
from typing import List

import numpy as np

from scdensity.semiclassical.grids import DensityProfile, GridSpec, Kind, Method
from scdensity.semiclassical.langer import langer_wavefunction, matching_point
from scdensity.semiclassical.potentials import TurningGeometry, frequency, turning_points
from scdensity.semiclassical.quantize import wkb_energy

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LangerLevel:
    index: int
    energy: float
    geometry: TurningGeometry
    omega: float


def langer_levels(system) -> List[LangerLevel]:
    pot, mass = system.potential, system.mass
    levels = []
    for j in range(system.n_particles):
        energy = wkb_energy(pot, system.hbar, j, mass)
        geometry = turning_points(pot, energy)
        geometry = geometry.with_match(matching_point(pot, energy, mass, geometry))
        levels.append(LangerLevel(j, energy, geometry, frequency(pot, energy, mass)))
    return levels


def _orbital_table(system, xs, levels):
    return np.array([[langer_wavefunction(system, x, geometry=level.geometry, omega=level.omega)
                      for x in xs] for level in levels])


def langer_sum_density(system, x, levels=None):
    """sum_{j<N} phi^2(x, E_WKB(j)) over WKB-quantized Langer orbitals."""
    levels = langer_levels(system) if levels is None else levels
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    return np.sum(_orbital_table(system, xs, levels) ** 2, axis=0)


def langer_sum_ked(system, x, levels=None):
    """sum_{j<N} (E_j - v(x)) phi_j^2(x)."""
    levels = langer_levels(system) if levels is None else levels
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    energies = np.array([level.energy for level in levels])
    v = system.potential(xs)
    return np.sum((energies[:, None] - v[None, :]) * _orbital_table(system, xs, levels) ** 2, axis=0)


def langer_sum_profile(system, grid: GridSpec, kind=Kind.DENSITY, metadata=None) -> DensityProfile:
    kind = Kind(kind)
    levels = langer_levels(system)
    xs = grid.positions()
    if kind is Kind.DENSITY:
        values = langer_sum_density(system, xs, levels)
    else:
        values = langer_sum_ked(system, xs, levels)
    metadata = dict(metadata or {})
    metadata["energies"] = [level.energy for level in levels]
    return DensityProfile(xs, values, Method.LANGER_SUM, kind, metadata)
