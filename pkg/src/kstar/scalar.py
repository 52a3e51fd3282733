"""Scalar special functions used componentwise by the diagonal calculus."""
from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError, PoleError, RangeError


@dataclass(frozen=True)
class ScalarFnConfig:
    gamma_terms: int = 9
    zeta_terms: int = 40
    target_abs_err: float = 1e-12

    def __post_init__(self):
        if self.target_abs_err < 1e-13:
            raise ValueError("target_abs_err below the documented floor 1e-13")


# Lanczos coefficients, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_POLE_TOL = 1e-14


def sinpi(z: complex) -> complex:
    """``sin(pi z)`` with the argument reduced modulo 2 before scaling."""
    z = complex(z)
    r = z.real - 2.0 * round(z.real / 2.0)
    return cmath.sin(math.pi * complex(r, z.imag))


def _near_nonpositive_integer(z: complex) -> bool:
    return z.real <= 0.5 and abs(z.imag) < _POLE_TOL and abs(z.real - round(z.real)) < _POLE_TOL


def _lanczos_log(z: complex) -> complex:
    """``log Gamma(z)`` on the principal sheet of the Lanczos form, ``Re z >= 1/2``."""
    z = z - 1
    x = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        x += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return 0.5 * math.log(2 * math.pi) + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def gamma_c(z: complex) -> complex:
    """Complex gamma function; raises ``PoleError`` at non-positive integers."""
    z = complex(z)
    if _near_nonpositive_integer(z):
        raise PoleError(f"gamma has a pole at {z}")
    if z.real < 0.5:
        return math.pi / (sinpi(z) * cmath.exp(_lanczos_log(1 - z)))
    return cmath.exp(_lanczos_log(z))


def rgamma_c(z: complex) -> complex:
    """``1/Gamma(z)``, entire; exactly zero at the poles of gamma."""
    z = complex(z)
    if _near_nonpositive_integer(z):
        return 0j
    if z.real < 0.5:
        return sinpi(z) * cmath.exp(_lanczos_log(1 - z)) / math.pi
    return cmath.exp(-_lanczos_log(z))


def _eta_borwein(s: complex) -> complex:
    """Dirichlet eta by the Borwein alternating-series acceleration."""
    n = 30 + int(math.ceil(0.9 * abs(s.imag)))
    # d_k = n sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!), accumulated as ratios
    terms = [1.0]
    acc = 1.0
    for i in range(1, n + 1):
        acc *= 4.0 * (n + i - 1) * (n - i + 1) / ((2 * i - 1) * (2 * i))
        terms.append(acc)
    d = np.cumsum(terms)
    dn = d[-1]
    k = np.arange(n)
    signs = np.where(k % 2 == 0, 1.0, -1.0)
    powers = np.exp(-s * np.log(k + 1.0))
    return complex(np.sum(signs * (dn - d[:-1]) * powers) / dn)


def zeta_c(s: complex) -> complex:
    """Riemann zeta; eta acceleration for ``Re s >= -1/2``, functional equation otherwise."""
    s = complex(s)
    if abs(s - 1) < _POLE_TOL:
        raise PoleError("zeta has a pole at s = 1")
    # the cut stays away from 0 so that 1 - s never rounds onto the pole
    if s.real >= -0.5:
        return _eta_borwein(s) / (1 - 2 ** (1 - s))
    # zeta(s) = 2^s pi^{s-1} sin(pi s / 2) Gamma(1 - s) zeta(1 - s)
    return (2 ** s) * (math.pi ** (s - 1)) * sinpi(s / 2) * gamma_c(1 - s) * zeta_c(1 - s)


def xi_c(s: complex) -> complex:
    """``pi^{-s/2} Gamma(s/2) zeta(s)``; poles at 0 and 1 only."""
    s = complex(s)
    if s.real < 0:
        # Gamma(s/2) sin(pi s/2) = pi / Gamma(1 - s/2) removes the trivial zeros
        return (math.pi ** (s / 2)) * (2 ** s) * gamma_c(1 - s) * zeta_c(1 - s) * rgamma_c(1 - s / 2)
    return math.pi ** (-s / 2) * gamma_c(s / 2) * zeta_c(s)


@lru_cache(maxsize=1)
def _bernoulli_table() -> tuple:
    B = [Fraction(1)]
    for m in range(1, 61):
        acc = Fraction(0)
        for k in range(m):
            acc += math.comb(m + 1, k) * B[k]
        B.append(-acc / (m + 1))
    return tuple(B)


def bernoulli_exact(n: int) -> Fraction:
    if n < 0 or n > 60:
        raise RangeError("Bernoulli numbers are tabulated for 0 <= n <= 60")
    if n % 2 == 1:
        return Fraction(0)
    return _bernoulli_table()[n]


def bernoulli(n: int) -> float:
    """Signed ``B_n`` (``B_4 = -1/30``); odd indices give 0."""
    return float(bernoulli_exact(n))


def theta3(t: float) -> float:
    """``sum_n exp(-n^2 t)``; the modular transform handles ``t < pi``."""
    t = float(t)
    if not t > 0:
        raise DomainError("theta3 needs t > 0")
    if t < math.pi:
        return math.sqrt(math.pi / t) * theta3(math.pi ** 2 / t)
    total = 1.0
    n = 1
    while True:
        term = math.exp(-n * n * t)
        if term < 1e-17:
            break
        total += 2 * term
        n += 1
    return total


def primes_upto(n: int) -> list[int]:
    if n < 0 or n > 10 ** 6:
        raise RangeError("primes_upto supports 0 <= n <= 10^6")
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return [int(p) for p in np.flatnonzero(sieve)]


_PARTITIONS = [1]
_PARTITIONS_LOCK = threading.Lock()


def partitions(n: int) -> int:
    """Number of partitions of ``n`` by the pentagonal-number recurrence."""
    if n < 0 or n > 10 ** 4:
        raise RangeError("partitions supports 0 <= n <= 10^4")
    with _PARTITIONS_LOCK:
        p = _PARTITIONS
        for m in range(len(p), n + 1):
            total = 0
            k = 1
            while True:
                g1 = k * (3 * k - 1) // 2
                if g1 > m:
                    break
                sgn = 1 if k % 2 else -1
                total += sgn * p[m - g1]
                g2 = k * (3 * k + 1) // 2
                if g2 <= m:
                    total += sgn * p[m - g2]
                k += 1
            p.append(total)
        return p[n]
