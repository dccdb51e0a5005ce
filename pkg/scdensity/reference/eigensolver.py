"""Finite-difference eigensolver used as the exact oracle for densities."""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from scdensity.errors import ContinuumReached, GridTooSmall
from scdensity.semiclassical.grids import DensityProfile, GridSpec, Kind, Method
from scdensity.semiclassical.potentials import PotentialModel, Side, anchored_integral

logger = logging.getLogger(__name__)

BOUNDARY_TOL = 1e-8
ORACLE_DEPTH = 25.0
MIN_ORACLE_POINTS = 4000
POINTS_PER_WAVELENGTH = 40


@dataclass(frozen=True)
class EigenSolution:
    grid: np.ndarray
    energies: np.ndarray
    orbitals: np.ndarray
    richardson_shift: float = 0.0

    @property
    def spacing(self) -> float:
        return float(self.grid[1] - self.grid[0])

    @property
    def n_levels(self) -> int:
        return len(self.energies)

    def overlaps(self) -> np.ndarray:
        return self.orbitals @ self.orbitals.T * self.spacing


def _diagonalize(pot, hbar, mass, xs, n_levels):
    h = xs[1] - xs[0]
    kinetic = hbar ** 2 / (2.0 * mass * h * h)
    interior = xs[1:-1]
    diagonal = 2.0 * kinetic + pot(interior)
    off_diagonal = np.full(len(interior) - 1, -kinetic)
    energies, vectors = eigh_tridiagonal(
        diagonal, off_diagonal, select="i", select_range=(0, n_levels - 1))
    orbitals = np.zeros((n_levels, len(xs)))
    orbitals[:, 1:-1] = vectors.T / math.sqrt(h)
    for orbital in orbitals:
        first = np.argmax(np.abs(orbital) > 1e-3 * np.abs(orbital).max())
        if orbital[first] < 0:
            orbital *= -1.0
    return energies, orbitals


def _check_solution(pot, grid, energies, orbitals):
    if energies[-1] >= pot.sup_value:
        raise ContinuumReached(
            f"level {len(energies) - 1} at E={energies[-1]:.8g} is above the binding range "
            f"{pot.sup_value:g} of {pot.describe()}", "solve_schrodinger")
    edge = np.maximum(np.abs(orbitals[:, 1]), np.abs(orbitals[:, -2]))
    peak = np.abs(orbitals).max(axis=1)
    bad = np.nonzero(edge > BOUNDARY_TOL * peak)[0]
    if len(bad):
        raise GridTooSmall(
            f"level {bad[0]} keeps relative amplitude {edge[bad[0]] / peak[bad[0]]:.3e} at the edge "
            f"of [{grid.x_min:g}, {grid.x_max:g}]", "solve_schrodinger")


def solve_schrodinger(pot: PotentialModel, hbar: float, mass: float, grid: GridSpec,
                      n_levels: int, richardson: bool = True) -> EigenSolution:
    """Lowest levels of the three-point Hamiltonian with Dirichlet walls at the grid ends.

    With ``richardson`` the problem is solved again at half spacing and energies and
    orbitals are extrapolated as (4 f_{h/2} - f_h) / 3 on the coarse grid.
    """
    assert n_levels >= 1, "need at least one level"
    xs = grid.positions()
    energies, orbitals = _diagonalize(pot, hbar, mass, xs, n_levels)
    shift = 0.0
    if richardson:
        fine_energies, fine_orbitals = _diagonalize(pot, hbar, mass, grid.refined().positions(), n_levels)
        fine_orbitals = fine_orbitals[:, ::2]
        signs = np.sign(np.sum(fine_orbitals * orbitals, axis=1))
        fine_orbitals *= signs[:, None]
        extrapolated = (4.0 * fine_energies - energies) / 3.0
        shift = float(np.max(np.abs(extrapolated - fine_energies)))
        energies = extrapolated
        orbitals = (4.0 * fine_orbitals - orbitals) / 3.0
        norms = np.sqrt(np.sum(orbitals ** 2, axis=1) * grid.spacing)
        orbitals /= norms[:, None]
        logger.debug(f"Richardson shift of {n_levels} levels: {shift:.3e}")
    _check_solution(pot, grid, energies, orbitals)
    return EigenSolution(grid=xs, energies=energies, orbitals=orbitals, richardson_shift=shift)


def density_exact(solution: EigenSolution, n_particles: int) -> DensityProfile:
    assert n_particles <= solution.n_levels, "not enough levels for the requested filling"
    values = np.sum(solution.orbitals[:n_particles] ** 2, axis=0)
    return DensityProfile(solution.grid, values, Method.EXACT, Kind.DENSITY)


def ked_exact(solution: EigenSolution, pot: PotentialModel, n_particles: int) -> DensityProfile:
    """t(x) = sum_i (E_i - v(x)) |psi_i(x)|^2, negative where v > E_i."""
    assert n_particles <= solution.n_levels, "not enough levels for the requested filling"
    v = pot(solution.grid)
    occupied = solution.orbitals[:n_particles]
    values = np.sum((solution.energies[:n_particles, None] - v[None, :]) * occupied ** 2, axis=0)
    return DensityProfile(solution.grid, values, Method.EXACT, Kind.KED)


def laplacian_kinetic_energy(solution: EigenSolution, hbar: float, mass: float,
                             n_particles: int) -> float:
    """-hbar^2/2m sum_i int psi_i psi_i'' with the three-point second difference."""
    h = solution.spacing
    total = 0.0
    for orbital in solution.orbitals[:n_particles]:
        second = np.zeros_like(orbital)
        second[1:-1] = (orbital[2:] - 2.0 * orbital[1:-1] + orbital[:-2]) / h ** 2
        total += -hbar ** 2 / (2.0 * mass) * float(np.sum(orbital * second) * h)
    return total


def _depth_point(system, side, depth):
    """Position in the forbidden region where |S_F| / hbar reaches ``depth``."""
    pot, geometry, energy = system.potential, system.fermi_geometry, system.fermi_energy
    anchor = geometry.x_minus if side is Side.LEFT else geometry.x_plus
    direction = -1.0 if side is Side.LEFT else 1.0
    target = depth * system.hbar

    def excess(distance):
        x = anchor + direction * distance
        return anchored_integral(pot, x, energy, side, geometry, system.mass).magnitude - target

    step = system.length_scale
    lo_edge, hi_edge = pot.domain
    for _ in range(200):
        if excess(step) >= 0:
            distance = brentq(excess, 0.5 * step if step > system.length_scale else 0.0, step,
                              xtol=1e-6 * step)
            return anchor + direction * distance
        step *= 2.0
        if not lo_edge < anchor + direction * step < hi_edge:
            break
    return anchor + direction * step


def oracle_grid(system, depth: float = ORACLE_DEPTH, points: Optional[int] = None) -> GridSpec:
    """Grid reaching |S_F|/hbar >= depth on both sides, resolving the shortest wavelength."""
    x_min = _depth_point(system, Side.LEFT, depth)
    x_max = _depth_point(system, Side.RIGHT, depth)
    if points is None:
        p_max = math.sqrt(2.0 * system.mass * (system.fermi_energy - system.potential.vmin_value))
        wavelength = 2.0 * math.pi * system.hbar / p_max
        points = max(MIN_ORACLE_POINTS,
                     int(math.ceil((x_max - x_min) * POINTS_PER_WAVELENGTH / wavelength)) + 1)
    return GridSpec(x_min, x_max, points)


def solve_system(system, depth: float = ORACLE_DEPTH, points: Optional[int] = None,
                 richardson: bool = True) -> EigenSolution:
    grid = oracle_grid(system, depth, points)
    logger.debug(f"Exact oracle on [{grid.x_min:.6g}, {grid.x_max:.6g}] with {grid.points} points")
    return solve_schrodinger(system.potential, system.hbar, system.mass, grid,
                             system.n_particles, richardson)


def exact_profile(system, grid: GridSpec, kind=Kind.DENSITY,
                  solution: Optional[EigenSolution] = None, metadata=None) -> DensityProfile:
    """Exact density or KED interpolated from the oracle grid onto ``grid``."""
    kind = Kind(kind)
    if solution is None:
        solution = solve_system(system)
    if kind is Kind.DENSITY:
        oracle = density_exact(solution, system.n_particles)
    else:
        oracle = ked_exact(solution, system.potential, system.n_particles)
    xs = grid.positions()
    spline = CubicSpline(oracle.xs, oracle.values, extrapolate=False)
    values = np.nan_to_num(spline(xs), nan=0.0)
    metadata = dict(metadata or {})
    metadata["energies"] = solution.energies[:system.n_particles].tolist()
    metadata["richardson_shift"] = solution.richardson_shift
    return DensityProfile(xs, values, Method.EXACT, kind, metadata)
