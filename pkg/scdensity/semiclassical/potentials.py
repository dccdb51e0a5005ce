import abc
import dataclasses
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from scdensity.errors import DegenerateTurningPoint, NoBoundOrbit, QuadratureFailure

logger = logging.getLogger(__name__)

SCAN_START = 1e-3
MAX_SCAN_STEPS = 200
ROOT_XTOL = 1e-14
DEGENERATE_SLOPE = 1e-10
TURNING_TOL = 1e-12
QUAD_EPSABS = 1e-14
QUAD_EPSREL = 1e-12
QUAD_ACCEPT = 1e-8
QUAD_LIMIT = 200
NEAR_ANCHOR_FRACTION = 1e-2
_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(12)
_GAUSS_NODES = 0.5 * (_GAUSS_NODES + 1.0)
_GAUSS_WEIGHTS = 0.5 * _GAUSS_WEIGHTS


class Region(str, Enum):
    ALLOWED = "allowed"
    FORBIDDEN = "forbidden"
    TURNING = "turning"


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


class PotentialModel(abc.ABC):
    """Smooth single-well potential v(x) with analytic first and second derivatives.

    Subclasses are frozen dataclasses whose fields are the named parameters, so
    models are hashable, picklable and can be built from config with
    ``init_obj(path, params)``.
    """

    name = "potential"
    domain: Tuple[float, float] = (-math.inf, math.inf)

    @abc.abstractmethod
    def __call__(self, x):
        pass

    @abc.abstractmethod
    def gradient(self, x):
        pass

    @abc.abstractmethod
    def curvature(self, x):
        pass

    @property
    @abc.abstractmethod
    def vmin_location(self) -> float:
        pass

    @property
    def vmin_value(self) -> float:
        return float(self(self.vmin_location))

    @property
    def sup_value(self) -> float:
        return math.inf

    @property
    def params(self) -> Dict[str, float]:
        return dataclasses.asdict(self)

    def describe(self) -> str:
        params = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.name}({params})"


@dataclass(frozen=True)
class Harmonic(PotentialModel):
    """v = omega^2 x^2 / 2 (unit-mass spring constant)."""

    omega: float = 1.0
    name = "harmonic"

    def __post_init__(self):
        assert self.omega > 0, "harmonic frequency must be positive"

    def __call__(self, x):
        return 0.5 * self.omega ** 2 * np.square(x)

    def gradient(self, x):
        return self.omega ** 2 * np.asarray(x, dtype=float)

    def curvature(self, x):
        return self.omega ** 2 * np.ones_like(np.asarray(x, dtype=float))

    @property
    def vmin_location(self):
        return 0.0


@dataclass(frozen=True)
class Morse(PotentialModel):
    """v = D (1 - exp(-a (x - center)))^2, dissociating to D as x -> inf."""

    depth: float = 12.5
    width: float = 0.5
    center: float = 0.0
    name = "morse"

    def __post_init__(self):
        assert self.depth > 0 and self.width > 0, "morse depth and width must be positive"

    def _decay(self, x):
        return np.exp(-self.width * (np.asarray(x, dtype=float) - self.center))

    def __call__(self, x):
        with np.errstate(over="ignore"):
            return self.depth * np.square(1.0 - self._decay(x))

    def gradient(self, x):
        with np.errstate(over="ignore", invalid="ignore"):
            e = self._decay(x)
            return 2.0 * self.depth * self.width * e * (1.0 - e)

    def curvature(self, x):
        with np.errstate(over="ignore", invalid="ignore"):
            e = self._decay(x)
            return 2.0 * self.depth * self.width ** 2 * e * (2.0 * e - 1.0)

    @property
    def vmin_location(self):
        return float(self.center)

    @property
    def sup_value(self):
        return float(self.depth)


@dataclass(frozen=True)
class Quartic(PotentialModel):
    """v = a4 x^4 + a2 x^2."""

    a4: float = 0.25
    a2: float = 0.5
    name = "quartic"

    def __post_init__(self):
        assert self.a4 > 0 and self.a2 >= 0, "quartic needs a4 > 0 and a2 >= 0 for a single well"

    def __call__(self, x):
        x2 = np.square(x)
        return self.a4 * x2 * x2 + self.a2 * x2

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        return 4.0 * self.a4 * x ** 3 + 2.0 * self.a2 * x

    def curvature(self, x):
        x = np.asarray(x, dtype=float)
        return 12.0 * self.a4 * x ** 2 + 2.0 * self.a2

    @property
    def vmin_location(self):
        return 0.0


@dataclass(frozen=True)
class PoschlTeller(PotentialModel):
    """v = D tanh^2(a x), i.e. -D sech^2(a x) shifted up by D."""

    depth: float = 12.5
    width: float = 0.5
    name = "poschl_teller"

    def __post_init__(self):
        assert self.depth > 0 and self.width > 0, "poschl-teller depth and width must be positive"

    def __call__(self, x):
        return self.depth * np.square(np.tanh(self.width * np.asarray(x, dtype=float)))

    def gradient(self, x):
        ax = self.width * np.asarray(x, dtype=float)
        sech2 = 1.0 / np.square(np.cosh(ax))
        return 2.0 * self.depth * self.width * np.tanh(ax) * sech2

    def curvature(self, x):
        ax = self.width * np.asarray(x, dtype=float)
        sech2 = 1.0 / np.square(np.cosh(ax))
        return 2.0 * self.depth * self.width ** 2 * sech2 * (1.0 - 3.0 * np.square(np.tanh(ax)))

    @property
    def vmin_location(self):
        return 0.0

    @property
    def sup_value(self):
        return float(self.depth)


BUILTIN_POTENTIALS = {
    "harmonic": "scdensity.semiclassical.potentials.Harmonic",
    "morse": "scdensity.semiclassical.potentials.Morse",
    "quartic": "scdensity.semiclassical.potentials.Quartic",
    "poschl_teller": "scdensity.semiclassical.potentials.PoschlTeller",
}


@dataclass(frozen=True)
class TurningGeometry:
    energy: float
    x_minus: float
    x_plus: float
    x_match: Optional[float] = None

    @property
    def width(self) -> float:
        return self.x_plus - self.x_minus

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.x_minus + self.x_plus)

    def side(self, x) -> Side:
        split = self.midpoint if self.x_match is None else self.x_match
        return Side.LEFT if x <= split else Side.RIGHT

    def nearest_turning_point(self, x) -> float:
        if abs(x - self.x_minus) <= abs(x - self.x_plus):
            return self.x_minus
        return self.x_plus

    def with_match(self, x_match) -> "TurningGeometry":
        return dataclasses.replace(self, x_match=float(x_match))


@dataclass(frozen=True)
class MomentumPoint:
    magnitude: float
    region: Region


@dataclass(frozen=True)
class OrbitPoint:
    """Magnitude of an anchored orbit integral (action or time) at one position."""

    magnitude: float
    region: Region
    side: Side


def _check_bound(pot, energy, operation):
    if not np.isfinite(energy) or energy <= pot.vmin_value:
        raise NoBoundOrbit(
            f"E={energy:g} is not above the minimum {pot.vmin_value:g} of {pot.describe()}",
            operation)
    if energy >= pot.sup_value:
        raise NoBoundOrbit(
            f"E={energy:g} reaches the dissociation value {pot.sup_value:g} of {pot.describe()}",
            operation)


def _scan_root(pot, energy, direction):
    x0 = pot.vmin_location
    lo_edge, hi_edge = pot.domain
    prev = x0
    for k in range(MAX_SCAN_STEPS):
        x = x0 + direction * SCAN_START * 2.0 ** k
        if x <= lo_edge or x >= hi_edge:
            break
        value = pot(x)
        while not np.isfinite(value):
            x = 0.5 * (x + prev)
            value = pot(x)
        if value >= energy:
            lo, hi = sorted((prev, x))
            root = brentq(lambda s: pot(s) - energy, lo, hi,
                          xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps, maxiter=500)
            logger.debug(f"Turning point bracket [{lo:.6g}, {hi:.6g}] after {k + 1} steps")
            return _polish_root(pot, energy, root, direction)
        prev = x
    raise NoBoundOrbit(
        f"no turning point of {pot.describe()} at E={energy:g} inside {pot.domain}",
        "turning_points")


def _polish_root(pot, energy, root, direction):
    for _ in range(2):
        slope = pot.gradient(root)
        if slope == 0:
            break
        candidate = root - (pot(root) - energy) / slope
        if abs(pot(candidate) - energy) < abs(pot(root) - energy):
            root = candidate
        else:
            break
    slope = float(pot.gradient(root))
    if abs(slope) < DEGENERATE_SLOPE or slope * direction <= 0:
        raise DegenerateTurningPoint(
            f"v'={slope:.3e} at the turning point x={root:.12g} of {pot.describe()}",
            "turning_points")
    return float(root)


def turning_points(pot: PotentialModel, energy: float) -> TurningGeometry:
    _check_bound(pot, energy, "turning_points")
    x_minus = _scan_root(pot, energy, -1.0)
    x_plus = _scan_root(pot, energy, 1.0)
    return TurningGeometry(energy=float(energy), x_minus=x_minus, x_plus=x_plus)


def momentum(pot: PotentialModel, x: float, energy: float, mass: float = 1.0) -> MomentumPoint:
    kinetic = energy - float(pot(x))
    if abs(kinetic) <= TURNING_TOL * max(1.0, abs(energy)):
        return MomentumPoint(0.0, Region.TURNING)
    if kinetic > 0:
        return MomentumPoint(math.sqrt(2.0 * mass * kinetic), Region.ALLOWED)
    return MomentumPoint(math.sqrt(-2.0 * mass * kinetic), Region.FORBIDDEN)


def _integrate(func: Callable[[float], float], upper: float, operation: str) -> float:
    if upper <= 0:
        return 0.0
    result = quad(func, 0.0, upper, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL,
                  limit=QUAD_LIMIT, full_output=1)
    value, abserr = result[0], result[1]
    if len(result) > 3 and abserr > QUAD_ACCEPT * max(abs(value), 1e-300):
        raise QuadratureFailure(
            f"estimated error {abserr:.3e} for integral {value:.6e}: {result[3]}", operation)
    return float(value)


def _kinetic_slope(pot, energy, anchor, direction, sign, s, near):
    """|E - v(anchor + direction s)| / s, free of cancellation for s <= near."""
    if s <= near:
        xs = anchor + direction * s * _GAUSS_NODES
        return -sign * direction * float(np.dot(_GAUSS_WEIGHTS, pot.gradient(xs)))
    return sign * (energy - float(pot(anchor + direction * s))) / s


def _orbit_integral(pot, energy, mass, anchor, direction, distance, forbidden, kind, operation,
                    scale=1.0):
    """Integrate p (kind="action") or m/p (kind="time") over x = anchor + direction u^2.

    With K(s) = |E - v| / s the integrands become 2 u^2 sqrt(2 m K) and
    2 m / sqrt(2 m K), both smooth in u through the turning point.
    ``direction`` points into the allowed region (forbidden integrals use
    |E - v| and point away from it).
    """
    if distance <= 0:
        return 0.0
    sign = -1.0 if forbidden else 1.0
    near = NEAR_ANCHOR_FRACTION * scale
    floor = DEGENERATE_SLOPE

    def slope_at(u):
        return max(_kinetic_slope(pot, energy, anchor, direction, sign, u * u, near), floor)

    if kind == "action":
        def integrand(u):
            return 2.0 * u * u * math.sqrt(2.0 * mass * slope_at(u))
    else:
        def integrand(u):
            return 2.0 * mass / math.sqrt(2.0 * mass * slope_at(u))

    return _integrate(integrand, math.sqrt(distance), operation)


def _resolve_geometry(pot, energy, mass, geometry):
    if geometry is None:
        geometry = turning_points(pot, energy)
    if geometry.x_match is None:
        from scdensity.semiclassical.langer import matching_point

        geometry = geometry.with_match(matching_point(pot, energy, mass=mass, geometry=geometry))
    return geometry


def anchored_integral(pot: PotentialModel, x: float, energy: float, side: Side,
                      geometry: TurningGeometry, mass: float = 1.0,
                      kind: str = "action") -> OrbitPoint:
    """Orbit integral measured from the turning point anchoring ``side`` toward x."""
    operation = "action" if kind == "action" else "traversal_time"
    if side is Side.LEFT:
        anchor = geometry.x_minus
        region = Region.FORBIDDEN if x < anchor else Region.ALLOWED
        direction = -1.0 if x < anchor else 1.0
    else:
        anchor = geometry.x_plus
        region = Region.FORBIDDEN if x > anchor else Region.ALLOWED
        direction = 1.0 if x > anchor else -1.0
    distance = abs(x - anchor)
    if distance <= TURNING_TOL * geometry.width:
        return OrbitPoint(0.0, Region.TURNING, side)
    value = _orbit_integral(pot, energy, mass, anchor, direction, distance,
                            region is Region.FORBIDDEN, kind, operation, geometry.width)
    return OrbitPoint(value, region, side)


def action(pot: PotentialModel, x: float, energy: float, mass: float = 1.0,
           geometry: Optional[TurningGeometry] = None) -> OrbitPoint:
    geometry = _resolve_geometry(pot, energy, mass, geometry)
    return anchored_integral(pot, x, energy, geometry.side(x), geometry, mass, "action")


def traversal_time(pot: PotentialModel, x: float, energy: float, mass: float = 1.0,
                   geometry: Optional[TurningGeometry] = None) -> OrbitPoint:
    geometry = _resolve_geometry(pot, energy, mass, geometry)
    return anchored_integral(pot, x, energy, geometry.side(x), geometry, mass, "time")


def _half_orbit(pot, energy, mass, geometry, kind):
    mid = geometry.midpoint
    left = anchored_integral(pot, mid, energy, Side.LEFT, geometry, mass, kind)
    right = anchored_integral(pot, mid, energy, Side.RIGHT, geometry, mass, kind)
    return left.magnitude + right.magnitude


def full_action(pot: PotentialModel, energy: float, mass: float = 1.0,
                geometry: Optional[TurningGeometry] = None) -> float:
    if geometry is None:
        geometry = turning_points(pot, energy)
    return 2.0 * _half_orbit(pot, energy, mass, geometry, "action")


def period(pot: PotentialModel, energy: float, mass: float = 1.0,
           geometry: Optional[TurningGeometry] = None) -> float:
    if geometry is None:
        geometry = turning_points(pot, energy)
    return 2.0 * _half_orbit(pot, energy, mass, geometry, "time")


def frequency(pot: PotentialModel, energy: float, mass: float = 1.0) -> float:
    _check_bound(pot, energy, "frequency")
    step = 1e-5 * max(1.0, abs(energy))
    while energy - step <= pot.vmin_value or energy + step >= pot.sup_value:
        step *= 0.5
    d_action = (full_action(pot, energy + step, mass)
                - full_action(pot, energy - step, mass)) / (2.0 * step)
    return 2.0 * math.pi / d_action
