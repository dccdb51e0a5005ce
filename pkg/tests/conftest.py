import pytest

from scdensity.reference.eigensolver import solve_system
from scdensity.semiclassical.potentials import Harmonic, Morse, PoschlTeller, Quartic
from scdensity.semiclassical.quantize import build_system


@pytest.fixture(scope="session")
def harmonic():
    return Harmonic()


@pytest.fixture(scope="session")
def morse():
    return Morse(depth=12.5, width=0.25)


@pytest.fixture(scope="session")
def sho1(harmonic):
    return build_system(harmonic, hbar=1.0, mass=1.0, n_particles=1)


@pytest.fixture(scope="session")
def sho4(harmonic):
    return build_system(harmonic, hbar=1.0, mass=1.0, n_particles=4)


@pytest.fixture(scope="session")
def morse10(morse):
    return build_system(morse, hbar=1.0, mass=1.0, n_particles=10)


@pytest.fixture(scope="session")
def quartic4():
    return build_system(Quartic(), hbar=1.0, mass=1.0, n_particles=4)


@pytest.fixture(scope="session")
def poschl_teller4():
    return build_system(PoschlTeller(), hbar=1.0, mass=1.0, n_particles=4)


@pytest.fixture(scope="session")
def builtin_systems(sho4, morse10, quartic4, poschl_teller4):
    return {"harmonic": sho4, "morse": morse10, "quartic": quartic4, "poschl_teller": poschl_teller4}


@pytest.fixture(scope="session")
def sho4_solution(sho4):
    return solve_system(sho4)


@pytest.fixture(scope="session")
def morse10_solution(morse10):
    return solve_system(morse10)
