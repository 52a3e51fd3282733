"""Scalar gamma, zeta, xi, Bernoulli, theta3, primes and partitions against mpmath / sympy."""
import math
from fractions import Fraction

import mpmath as mp
import pytest
import sympy as spy
from hypothesis import given, strategies as st

from kstar.errors import DomainError, PoleError, RangeError
from kstar.scalar import (ScalarFnConfig, bernoulli, bernoulli_exact, gamma_c, partitions, primes_upto,
                          rgamma_c, sinpi, theta3, xi_c, zeta_c)

# mpmath at 30 digits, frozen
GAMMA_1_5 = 0.886226925452758
ZETA_2_5 = 1.341487257250917
THETA3_PI = 1.086434811213308

mp.mp.dps = 30


def relerr(a, b):
    return abs(complex(a) - complex(b)) / max(abs(complex(b)), 1e-300)


def test_frozen_values():
    assert float(mp.gamma(1.5)) == pytest.approx(GAMMA_1_5, abs=1e-15)
    assert float(mp.zeta(2.5)) == pytest.approx(ZETA_2_5, abs=1e-15)
    assert float(mp.jtheta(3, 0, mp.exp(-mp.pi))) == pytest.approx(THETA3_PI, abs=1e-15)
    assert gamma_c(1.5) == pytest.approx(GAMMA_1_5, abs=1e-14)
    assert zeta_c(2.5) == pytest.approx(ZETA_2_5, abs=1e-13)
    assert theta3(math.pi) == pytest.approx(THETA3_PI, abs=1e-14)


@pytest.mark.parametrize("n", range(1, 12))
def test_gamma_factorials(n):
    assert gamma_c(n) == pytest.approx(math.factorial(n - 1), rel=1e-13)


strip = st.builds(complex, st.floats(-6, 8), st.floats(-10, 10))


@given(strip)
def test_gamma_matches_mpmath(z):
    if abs(z.imag) < 1e-3 and z.real <= 0.5 and abs(z.real - round(z.real)) < 1e-3:
        return
    assert relerr(gamma_c(z), mp.gamma(z)) < 1e-12
    assert abs(rgamma_c(z) - complex(mp.rgamma(z))) <= 1e-12 * max(1.0, abs(complex(mp.rgamma(z))))


@given(st.builds(complex, st.floats(-8, 8), st.floats(-25, 25)))
def test_zeta_matches_mpmath(s):
    if abs(s - 1) < 1e-3:
        return
    assert relerr(zeta_c(s), mp.zeta(s)) < 1e-11


@given(st.builds(complex, st.floats(-4, 5), st.floats(-8, 8)))
def test_xi_matches_mpmath(s):
    if abs(s) < 1e-2 or abs(s - 1) < 1e-2:
        return
    # Gamma(s/2) zeta(s) has removable singularities at negative even s
    if abs(s.imag) < 1e-3 and s.real < 0 and abs(s.real / 2 - round(s.real / 2)) < 1e-3:
        return
    assert relerr(xi_c(s), mp.pi ** (-s / 2) * mp.gamma(s / 2) * mp.zeta(s)) < 1e-10


def test_xi_functional_equation():
    for s in (0.3 + 2j, -1.7 + 0.4j, 2.5):
        assert relerr(xi_c(s), xi_c(1 - s)) < 1e-11


@given(st.builds(complex, st.floats(-3, 3), st.floats(-3, 3)))
def test_sinpi(z):
    assert abs(sinpi(z) - complex(mp.sinpi(z))) < 1e-12 * max(1.0, abs(complex(mp.sinpi(z))))


def test_poles():
    for z in (0, -1, -7):
        with pytest.raises(PoleError):
            gamma_c(z)
        assert rgamma_c(z) == 0
    with pytest.raises(PoleError):
        zeta_c(1.0)


def test_trivial_zeros_and_special_values():
    for n in range(1, 6):
        assert abs(zeta_c(-2 * n)) < 1e-12
    assert zeta_c(2) == pytest.approx(math.pi ** 2 / 6, rel=1e-14)
    assert zeta_c(0) == pytest.approx(-0.5, abs=1e-14)
    assert zeta_c(-1) == pytest.approx(-1 / 12, abs=1e-13)


@given(st.floats(0.05, 20))
def test_theta3(t):
    want = float(mp.jtheta(3, 0, mp.exp(-t)))
    assert theta3(t) == pytest.approx(want, rel=1e-13)


def test_theta3_domain():
    with pytest.raises(DomainError):
        theta3(0.0)


@pytest.mark.parametrize("n", range(0, 61))
def test_bernoulli_matches_sympy(n):
    # sympy >= 1.12 uses B_1 = +1/2; odd indices are 0 by our convention
    want = Fraction(0) if n % 2 else Fraction(str(spy.bernoulli(n)))
    assert bernoulli_exact(n) == want
    assert bernoulli(4) == pytest.approx(-1 / 30, abs=1e-16)


def test_bernoulli_range():
    with pytest.raises(RangeError):
        bernoulli_exact(61)


def test_primes():
    assert primes_upto(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert primes_upto(1) == []
    assert len(primes_upto(10 ** 4)) == 1229
    assert primes_upto(1000) == list(spy.primerange(2, 1001))


@given(st.integers(0, 300))
def test_partitions_match_sympy(n):
    assert partitions(n) == int(spy.npartitions(n))


def test_partition_examples():
    assert [partitions(n) for n in range(8)] == [1, 1, 2, 3, 5, 7, 11, 15]
    assert partitions(100) == 190569292
    with pytest.raises(RangeError):
        partitions(-1)


def test_scalar_config_floor():
    with pytest.raises(ValueError):
        ScalarFnConfig(target_abs_err=1e-14)
