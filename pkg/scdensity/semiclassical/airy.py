"""Airy functions, Bernoulli numbers and the xi series entering the density corrections."""
import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np
import sympy
from scipy import special

from scdensity.errors import PoleAtResonance

logger = logging.getLogger(__name__)

XI0_SERIES_RADIUS = 0.25
XI0_SERIES_TERMS = 12
RESONANCE_TOL = 1e-8
MAX_BERNOULLI_INDEX = 30

# Printed truncations of xi_1 and xi_2 as (power, coefficient).
XI_SERIES_COEFFICIENTS = {
    1: (
        (3, Fraction(7, 1440)),
        (5, Fraction(31, 17280)),
        (7, Fraction(127, 302400)),
        (9, Fraction(21127, 27371520)),
        (11, Fraction(32532971, 2615348736000)),
        (13, Fraction(548797, 298896998400)),
    ),
    2: (
        (5, Fraction(31, 24192)),
        (7, Fraction(127, 345600)),
        (9, Fraction(73, 1013760)),
        (11, Fraction(1414477, 11887948800)),
        (13, Fraction(8191, 4598415360)),
        (15, Fraction(16931177, 67749986304000)),
    ),
}


class AiryPair(NamedTuple):
    ai: float
    ai_prime: float
    argument: float


def airy_pair(z) -> AiryPair:
    ai, ai_prime, _, _ = special.airy(z)
    return AiryPair(ai, ai_prime, z)


def airy_ai(z):
    return special.airy(z)[0]


def airy_ai_prime(z):
    return special.airy(z)[1]


def airy_wronskian(z):
    """Ai Bi' - Ai' Bi, equal to 1/pi for every real z."""
    ai, ai_prime, bi, bi_prime = special.airy(z)
    return ai * bi_prime - ai_prime * bi


def airy_origin_product() -> float:
    """Ai(0) Ai'(0) = -1 / (3 Gamma(1/3) Gamma(2/3))."""
    return -1.0 / (3.0 * special.gamma(1.0 / 3.0) * special.gamma(2.0 / 3.0))


def bernoulli_even(k: int) -> sympy.Rational:
    if not 1 <= k <= MAX_BERNOULLI_INDEX:
        raise ValueError(f"Bernoulli index k must lie in [1, {MAX_BERNOULLI_INDEX}], got {k}")
    return sympy.bernoulli(2 * k)


@lru_cache(maxsize=None)
def csc_series_coefficients(n_terms: int) -> Sequence[float]:
    """c_k with csc(a) - 1/a = sum_k c_k a^(2k-1), all c_k > 0."""
    coefficients = []
    for k in range(1, n_terms + 1):
        value = ((-1) ** (k - 1) * 2 * (2 ** (2 * k - 1) - 1) * bernoulli_even(k)
                 / sympy.factorial(2 * k))
        coefficients.append(float(value))
    return tuple(coefficients)


def _odd_series(alpha, coefficients, alternate=False):
    alpha = np.asarray(alpha, dtype=float)
    square = -alpha * alpha if alternate else alpha * alpha
    total = np.zeros_like(alpha)
    for c in reversed(coefficients):
        total = total * square + c
    return total * (-alpha if alternate else alpha)


def xi0_series_partial(alpha, n_terms: int):
    if n_terms < 1:
        raise ValueError(f"need at least one series term, got {n_terms}")
    if np.any(np.abs(alpha) >= math.pi):
        raise ValueError("the Bernoulli series for csc converges only for |alpha| < pi")
    result = _odd_series(alpha, csc_series_coefficients(n_terms))
    return result if result.ndim else float(result)


def _check_resonance(alpha):
    n = np.rint(alpha / math.pi)
    hit = (n != 0) & (np.abs(alpha - n * math.pi) < RESONANCE_TOL)
    if np.any(hit):
        where = np.asarray(alpha)[hit].flat[0]
        raise PoleAtResonance(f"alpha={where:.12g} is within {RESONANCE_TOL:g} of a pole of csc", "xi0")


def xi0(alpha):
    """csc(alpha) - 1/alpha, odd and regular at the origin."""
    alpha = np.asarray(alpha, dtype=float)
    _check_resonance(alpha)
    magnitude = np.abs(alpha)
    small = magnitude < XI0_SERIES_RADIUS
    safe = np.where(small, 1.0, magnitude)
    closed = 1.0 / np.sin(safe) - 1.0 / safe
    series = _odd_series(magnitude, csc_series_coefficients(XI0_SERIES_TERMS))
    result = np.sign(alpha) * np.where(small, series, closed)
    return result if result.ndim else float(result)


def csch(a):
    """Overflow-free hyperbolic cosecant for a > 0."""
    a = np.asarray(a, dtype=float)
    with np.errstate(over="ignore"):
        result = 2.0 * np.exp(-a) / -np.expm1(-2.0 * a)
    return result if result.ndim else float(result)


def xi0_hyperbolic(a):
    """csch(a) - 1/a: xi0 continued to imaginary angles, xi0(i a) = -i xi0_hyperbolic(a)."""
    a = np.asarray(a, dtype=float)
    small = np.abs(a) < XI0_SERIES_RADIUS
    safe = np.where(small, 1.0, a)
    closed = np.sign(safe) * csch(np.abs(safe)) - 1.0 / safe
    series = _odd_series(a, csc_series_coefficients(XI0_SERIES_TERMS), alternate=True)
    result = np.where(small, series, closed)
    return result if result.ndim else float(result)


def xi_series(j: int, alpha):
    """Printed truncations of xi_1 and xi_2, valid for |alpha| < 1."""
    if j not in XI_SERIES_COEFFICIENTS:
        raise ValueError(f"xi series available for j in {sorted(XI_SERIES_COEFFICIENTS)}, got {j}")
    alpha = np.asarray(alpha, dtype=float)
    if np.any(np.abs(alpha) >= 1.0):
        raise ValueError("the truncated xi series needs |alpha| < 1")
    total = np.zeros_like(alpha)
    for power, coefficient in XI_SERIES_COEFFICIENTS[j]:
        total = total + float(coefficient) * alpha ** power
    return total if total.ndim else float(total)
