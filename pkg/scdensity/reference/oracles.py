"""Closed-form oracles: harmonic-oscillator eigenfunctions and the analytic Morse problem.

Harmonic formulas use hbar = m = omega = 1.
"""
import math

import numpy as np


def hermite_functions(n_max: int, x):
    """psi_0..psi_{n_max} and their derivatives, shape (n_max + 1, len(x))."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    psi = np.zeros((n_max + 2, len(x)))
    psi[0] = math.pi ** -0.25 * np.exp(-0.5 * x ** 2)
    psi[1] = math.sqrt(2.0) * x * psi[0]
    for n in range(1, n_max + 1):
        psi[n + 1] = math.sqrt(2.0 / (n + 1)) * x * psi[n] - math.sqrt(n / (n + 1)) * psi[n - 1]
    d_psi = np.zeros((n_max + 1, len(x)))
    d_psi[0] = -x * psi[0]
    for n in range(1, n_max + 1):
        d_psi[n] = math.sqrt(n / 2.0) * psi[n - 1] - math.sqrt((n + 1) / 2.0) * psi[n + 1]
    return psi[:n_max + 1], d_psi


def hermite_sum_density(n_particles: int, x):
    psi, _ = hermite_functions(n_particles - 1, x)
    return np.sum(psi ** 2, axis=0)


def sho_density_closed(n_particles: int, x):
    """n = psi_N'^2 / 2 + (2N - x^2) psi_N^2 / 2 for N filled oscillator levels."""
    psi, d_psi = hermite_functions(n_particles, x)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return 0.5 * d_psi[n_particles] ** 2 + 0.5 * (2.0 * n_particles - x ** 2) * psi[n_particles] ** 2


def morse_omega0(depth, width, mass=1.0):
    return width * math.sqrt(2.0 * depth / mass)


def morse_levels(depth, width, n_levels, hbar=1.0, mass=1.0):
    """E_n = hbar w0 (n + 1/2) - (hbar w0 (n + 1/2))^2 / (4 D); exact and WKB-exact."""
    w0 = morse_omega0(depth, width, mass)
    quanta = hbar * w0 * (np.arange(n_levels) + 0.5)
    return quanta - quanta ** 2 / (4.0 * depth)


def morse_turning_points(depth, width, energy, center=0.0):
    root = math.sqrt(energy / depth)
    return (center - math.log(1.0 + root) / width,
            center - math.log(1.0 - root) / width)


def morse_action(depth, width, energy, mass=1.0):
    """Closed-orbit action I(E) = 2 pi (2D / w0) (1 - sqrt(1 - E/D))."""
    w0 = morse_omega0(depth, width, mass)
    return 2.0 * math.pi * (2.0 * depth / w0) * (1.0 - math.sqrt(1.0 - energy / depth))


def morse_frequency(depth, width, energy, mass=1.0):
    return width * math.sqrt(2.0 * (depth - energy) / mass)
