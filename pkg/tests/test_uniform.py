import math

import numpy as np
import pytest
from scipy import special

from scdensity.semiclassical.airy import csch
from scdensity.semiclassical.grids import GridSpec, Kind, Method
from scdensity.semiclassical.langer import TURNING_WINDOW, z_of
from scdensity.semiclassical.potentials import (
    Harmonic, Morse, Quartic, PoschlTeller, Region, Side, anchored_integral, momentum)
from scdensity.semiclassical.quantize import build_system, gamma_scale, wkb_energy
from scdensity.semiclassical.uniform import (
    alpha_f, default_grid, density_correction, density_leading, density_tf, density_uniform,
    derivative_jump_estimate, fermi_momentum, ked_tf, ked_uniform, profile, regional_asymptotics,
    semiclassical_terms)


def _sample_points(system):
    geometry = system.fermi_geometry
    ell = system.length_scale
    return [geometry.x_minus - 3.0 * ell, geometry.x_minus + 0.3 * geometry.width,
            geometry.x_match, geometry.x_plus - 0.2 * geometry.width, geometry.x_plus + 2.0 * ell]


def test_thomas_fermi_values(sho4):
    assert density_tf(sho4, 0.0) == pytest.approx(math.sqrt(8.0) / math.pi, rel=1e-9)
    assert ked_tf(sho4, 0.0) == pytest.approx(8.0 ** 1.5 / (6.0 * math.pi), rel=1e-9)
    assert density_tf(sho4, 3.0) == 0.0
    assert ked_tf(sho4, -3.0) == 0.0


def test_alpha_at_the_oscillator_center(sho4):
    point = alpha_f(sho4, 0.0)
    assert point.magnitude == pytest.approx(math.pi / 2.0, rel=1e-7)
    assert point.region is Region.ALLOWED


def test_terms_at_a_turning_point(sho4):
    terms = semiclassical_terms(sho4, sho4.fermi_geometry.x_plus)
    assert terms.region is Region.TURNING
    ai0, aip0, _, _ = special.airy(0.0)
    slope = math.sqrt(8.0)
    assert terms.ked == pytest.approx(slope * ai0 * aip0 / 3.0, rel=1e-12)
    assert terms.n_correction == pytest.approx(ai0 * aip0 / (6.0 * slope), rel=1e-6)
    assert terms.density > 0


@pytest.mark.parametrize("name", ["sho4", "morse10"])
def test_ked_identity_and_correction_split(request, name):
    system = request.getfixturevalue(name)
    for x in _sample_points(system):
        terms = semiclassical_terms(system, x)
        sign = -1.0 if terms.region is Region.FORBIDDEN else 1.0
        p2 = sign * terms.p_f ** 2
        assert terms.ked == pytest.approx(p2 * terms.density / (6.0 * system.mass) + terms.airy_ked_term,
                                          rel=1e-12, abs=1e-300)
        assert terms.t_correction == pytest.approx(p2 * terms.n_correction / (2.0 * system.mass),
                                                   rel=1e-12, abs=1e-300)
        assert terms.density == pytest.approx(terms.n_leading + terms.n_correction,
                                              rel=1e-10, abs=1e-14)
        if terms.region is Region.ALLOWED:
            airy = terms.p_f * system.omega_f * terms.ai * terms.ai_prime / (3.0 * math.sin(terms.alpha_f))
            assert terms.airy_ked_term == pytest.approx(airy, rel=1e-12)


def test_wrappers_agree_with_terms(morse10):
    x = morse10.fermi_geometry.x_match + 0.3
    terms = semiclassical_terms(morse10, x)
    assert density_uniform(morse10, x) == terms.density
    assert density_leading(morse10, x) == terms.n_leading
    assert density_correction(morse10, x) == terms.n_correction
    assert ked_uniform(morse10, x) == terms.ked


def test_forbidden_tail_is_real_and_decaying(sho4):
    x_plus, ell = sho4.fermi_geometry.x_plus, sho4.length_scale
    values = [density_uniform(sho4, x_plus + k * ell) for k in (2.0, 4.0, 6.0, 8.0)]
    assert all(v > 0 for v in values)
    assert all(a > b for a, b in zip(values, values[1:]))
    assert semiclassical_terms(sho4, x_plus + 4.0 * ell).region is Region.FORBIDDEN


@pytest.mark.parametrize("name", ["sho4", "morse10"])
def test_density_is_continuous_at_turning_points(request, name):
    system = request.getfixturevalue(name)
    geometry = system.fermi_geometry
    for x_t in (geometry.x_minus, geometry.x_plus):
        at = density_uniform(system, x_t)
        edge = 2.0 * TURNING_WINDOW * geometry.width
        jump = abs(density_uniform(system, x_t + edge) - density_uniform(system, x_t - edge))
        assert jump / at < 1e-3
        assert density_uniform(system, x_t + edge) == pytest.approx(at, rel=1e-3)
        assert density_uniform(system, x_t - edge) == pytest.approx(at, rel=1e-3)


POSITIVITY_CASES = [
    (Harmonic(), 1), (Harmonic(), 4), (Harmonic(), 10),
    (Morse(depth=12.5, width=0.25), 1), (Morse(depth=12.5, width=0.25), 4),
    (Morse(depth=12.5, width=0.25), 10),
    (Quartic(), 1), (Quartic(), 4), (Quartic(), 10),
    (PoschlTeller(), 1), (PoschlTeller(), 4),
]


@pytest.mark.parametrize("pot,n_particles", POSITIVITY_CASES)
def test_density_is_positive_on_the_default_grid(pot, n_particles):
    system = build_system(pot, n_particles=n_particles)
    result = profile(system, default_grid(system, points=241))
    assert result.values.min() >= -1e-12 * result.values.max()


@pytest.mark.parametrize("name", ["sho4", "morse10"])
def test_normalization(request, name):
    system = request.getfixturevalue(name)
    grid = default_grid(system, points=1200)
    uniform = profile(system, grid, Method.UNIFORM)
    tf = profile(system, grid, Method.TF)
    assert uniform.integral() == pytest.approx(system.n_particles, rel=0.01)
    assert tf.integral() == pytest.approx(system.n_particles, rel=1e-3)
    assert uniform.column == "n_uniform" and tf.column == "n_tf"


def test_kinetic_energy_density_profile(sho4):
    result = profile(sho4, default_grid(sho4, points=400), Method.UNIFORM, Kind.KED)
    assert result.column == "t_uniform"
    bulk = np.abs(result.xs) < 0.8 * sho4.fermi_geometry.x_plus
    assert np.all(result.values[bulk] > 0)
    # virial: half of sum_j (j + 1/2) for j < 4
    assert result.integral() == pytest.approx(4.0, rel=0.05)


def test_parallel_profile_matches_serial(morse10):
    grid = GridSpec(morse10.fermi_geometry.x_minus - 1.0, morse10.fermi_geometry.x_plus + 1.0, 61)
    serial = profile(morse10, grid, Method.UNIFORM)
    parallel = profile(morse10, grid, Method.UNIFORM, n_jobs=2)
    np.testing.assert_array_equal(serial.values, parallel.values)


def test_default_grid_margins(sho4):
    grid = default_grid(sho4)
    assert grid.points == 1200
    assert grid.x_min == pytest.approx(-math.sqrt(8.0) - 4.0 * sho4.length_scale)
    assert grid.x_max == pytest.approx(math.sqrt(8.0) + 4.0 * sho4.length_scale)


@pytest.mark.parametrize("name", ["sho4", "morse10"])
def test_turning_law_at_small_gamma(request, name):
    system = request.getfixturevalue(name)
    gamma = 0.125
    scaled = gamma_scale(system, gamma)
    x_plus = scaled.fermi_geometry.x_plus
    estimate = regional_asymptotics(system, x_plus, gamma)
    assert estimate.region is Region.TURNING
    assert density_uniform(scaled, x_plus) == pytest.approx(estimate.turning_density, rel=0.05)
    assert ked_uniform(scaled, x_plus) == pytest.approx(estimate.turning_ked, rel=1e-6)


def test_allowed_asymptotics_at_small_gamma(sho4):
    gamma = 0.125
    scaled = gamma_scale(sho4, gamma)
    for x in (-1.3, 0.4, 1.7):
        estimate = regional_asymptotics(sho4, x, gamma)
        assert estimate.region is Region.ALLOWED
        assert density_uniform(scaled, x) == pytest.approx(estimate.density, rel=0.01)
        assert estimate.density_printed == estimate.density


@pytest.mark.parametrize("name", ["sho4", "morse10"])
def test_forbidden_asymptotics_at_small_gamma(request, name):
    system = request.getfixturevalue(name)
    gamma = 0.125
    scaled = gamma_scale(system, gamma)
    x = scaled.fermi_geometry.x_plus + 10.0 * scaled.length_scale
    estimate = regional_asymptotics(system, x, gamma)
    assert estimate.region is Region.FORBIDDEN
    assert 0.9 <= density_uniform(scaled, x) / estimate.density <= 1.1
    assert 0.9 <= ked_uniform(scaled, x) / estimate.ked <= 1.1


def test_jump_estimate_for_the_oscillator(sho4):
    jump = derivative_jump_estimate(sho4)
    assert jump.predicted == pytest.approx(1.0 / (36.0 * math.sqrt(8.0)), rel=1e-6)
    assert jump.value_jump < 1e-6
    assert jump.limit == pytest.approx(24.0 / math.pi ** 2 - 1.0 / math.pi, rel=1e-6)
    assert abs(jump.normalized_ratio - 1.0) < 0.15


def test_forced_side_matches_default_side(morse10):
    x = morse10.fermi_geometry.x_match - 0.5
    assert semiclassical_terms(morse10, x, side=Side.LEFT).density == density_uniform(morse10, x)


def test_uniform_profile_on_the_full_default_grid(sho4):
    result = profile(sho4, default_grid(sho4), Method.UNIFORM)
    assert len(result.values) == 1200
    assert np.all(np.isfinite(result.values))
    assert result.integral() == pytest.approx(4.0, rel=0.01)


def test_uniform_profile_on_a_scaled_grid(sho4):
    scaled = gamma_scale(sho4, 0.25)
    result = profile(scaled, default_grid(scaled, points=301), Method.UNIFORM)
    assert np.all(np.isfinite(result.values))
    assert result.integral() == pytest.approx(16.0, rel=0.01)


def test_alpha_on_the_oscillator_flank(sho4):
    point = alpha_f(sho4, -2.0)
    assert point.side is Side.LEFT
    assert point.magnitude == pytest.approx(math.pi / 4.0, rel=1e-7)


@pytest.mark.parametrize("name", ["sho4", "morse10"])
def test_alpha_is_the_lambda_derivative_of_the_langer_phase(request, name):
    system = request.getfixturevalue(name)
    geometry = system.fermi_geometry
    lam, h = system.n_particles - 0.5, 1e-3
    for x in (geometry.x_minus + 0.2 * geometry.width, geometry.x_plus - 0.3 * geometry.width):
        side = geometry.side(x)

        def phase(level):
            energy = wkb_energy(system.potential, system.hbar, level, system.mass)
            return z_of(system, x, energy=energy, side=side).z ** 1.5 / 1.5

        derivative = (phase(lam + h) - phase(lam - h)) / (2.0 * h)
        assert alpha_f(system, x).magnitude == pytest.approx(derivative, rel=1e-6)


def test_classical_fermi_quantities_are_gamma_invariant(morse10):
    scaled = gamma_scale(morse10, 0.25)
    geometry = morse10.fermi_geometry
    xs = np.linspace(geometry.x_minus + 0.01 * geometry.width, geometry.x_plus - 0.01 * geometry.width, 20)
    for x in xs:
        assert fermi_momentum(scaled, x) == pytest.approx(fermi_momentum(morse10, x), rel=1e-6)
        assert alpha_f(scaled, x).magnitude == pytest.approx(alpha_f(morse10, x).magnitude, rel=1e-5)


@pytest.mark.parametrize("x0", [-1.3, 0.4, 1.7])
def test_period_average_recovers_thomas_fermi(sho4, x0):
    scaled = gamma_scale(sho4, 0.125)
    wavelength = math.pi * scaled.hbar / fermi_momentum(scaled, x0)
    xs = np.linspace(x0, x0 + wavelength, 201)
    averaged = np.mean([density_uniform(scaled, x) for x in xs])
    thomas_fermi = np.mean([density_tf(scaled, x) for x in xs])
    assert averaged == pytest.approx(thomas_fermi, rel=1e-3)


def test_ked_per_particle_approaches_the_local_kinetic_energy(sho4):
    scaled = gamma_scale(sho4, 0.125)
    for x in (-1.3, 0.4, 1.7):
        terms = semiclassical_terms(scaled, x)
        local = terms.p_f ** 2 / (6.0 * scaled.mass)
        bound = 1.1 * scaled.hbar * scaled.omega_f / (6.0 * math.sin(terms.alpha_f))
        assert abs(terms.ked / terms.density - local) <= bound
        assert terms.ked / terms.density == pytest.approx(local, rel=0.05)


@pytest.mark.parametrize("name", ["sho4", "morse10"])
def test_printed_forbidden_forms_share_the_csch_terms(request, name):
    system = request.getfixturevalue(name)
    gamma = 0.125
    scaled = gamma_scale(system, gamma)
    geometry, mass, omega = system.fermi_geometry, system.mass, system.omega_f
    hbar_g = system.hbar * gamma
    for k in (6.0, 10.0, 14.0):
        x = geometry.x_plus + k * scaled.length_scale
        s = anchored_integral(system.potential, x, system.fermi_energy, Side.RIGHT, geometry, mass).magnitude
        tau = anchored_integral(system.potential, x, system.fermi_energy, Side.RIGHT, geometry, mass,
                                kind="time").magnitude
        p = momentum(system.potential, x, system.fermi_energy, mass).magnitude
        decay = math.exp(-2.0 * s / hbar_g)
        density_csch = decay * mass * omega * csch(omega * tau) / (4.0 * math.pi * p)
        ked_csch = -decay * omega * p * csch(omega * tau) / (8.0 * math.pi)

        estimate = regional_asymptotics(system, x, gamma)
        assert estimate.density_printed == pytest.approx(
            density_csch - decay * p / (6.0 * math.pi * s), rel=1e-9)
        assert estimate.ked_printed == pytest.approx(
            ked_csch + decay * p ** 3 / (36.0 * math.pi * mass * s), rel=1e-9)
        # the uniform tail keeps only the csch terms of the printed forms
        assert 0.9 <= density_uniform(scaled, x) / density_csch <= 1.1
        assert 0.9 <= ked_uniform(scaled, x) / ked_csch <= 1.1
