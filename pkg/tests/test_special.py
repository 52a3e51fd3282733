"""Star-beta, star-gamma, star-zeta, L, partitions and the reflection."""
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from kstar import special as sp
from kstar.diag import diag_arith, diag_embed
from kstar.errors import OutOfRegion, PoleError, WrongClass
from kstar.scalar import gamma_c, partitions
from kstar.weyl import WeylPoly, H_poly, to_ordered
from kstar.words import contour_residue, matrix_element

from conftest import K_DEEP, K_PLUS, mx


@pytest.fixture(scope="module")
def Hord():
    return to_ordered(H_poly(K_PLUS), K_PLUS)


# --- beta -----------------------------------------------------------------

@pytest.mark.parametrize("n", [0, 1, 2])
def test_beta_integer_y_is_product(n, grid):
    a = sp.star_beta(0.3, "+", n + 1, K_PLUS).evaluate(grid)
    b = sp.beta_product(0.3, "+", n, K_PLUS).evaluate(grid)
    assert mx(a - b) < 1e-6


def test_beta_scalar_component(grid):
    # in the vacuum component H -> 1/2: B(alpha + 1/2, y)
    from kstar.words import vacuum
    vac = vacuum("vac", K_PLUS)
    x = sp.star_beta(0.2, "+", 1.5, K_PLUS).star(vac).evaluate(grid)
    assert mx(x - complex(mp.beta(0.7, 1.5)) * vac.evaluate(grid)) < 1e-6


def test_beta_region():
    with pytest.raises(OutOfRegion):
        sp.star_beta(-0.6, "+", 1.0, K_PLUS)
    with pytest.raises(OutOfRegion):
        sp.star_beta(0.3, "+", -0.1, K_PLUS)


# --- gamma ----------------------------------------------------------------

@pytest.mark.parametrize("sign", "+-")
def test_gamma_functional_equation(sign, Hord, grid):
    t = 1 if sign == "+" else -1
    g1 = sp.star_gamma(1.0, sign, K_PLUS).integral
    g2 = sp.star_gamma(2.0, sign, K_PLUS).integral
    X = Hord.scale(t) + WeylPoly.const(1.0)
    assert mx(g2.evaluate(grid) - g1.left_mul(X).evaluate(grid)) < 1e-5


def test_gamma_diag_integral_coherence(grid):
    # deep Kplus parameter: the E-series converges fast enough for N = 40
    integral = sp.star_gamma(1.0, "+", K_DEEP).integral.evaluate(grid)
    emb = diag_embed(sp.gamma_diag(1.0, "+", "Emat", 40), K_DEEP, grid).values
    assert mx(emb - integral) < 1e-3


@pytest.mark.parametrize("z", [0.3, 0.1 + 0.2j])
def test_gamma_continuation_overlap(z, grid):
    a = sp.star_gamma(z, "+", K_PLUS).integral.evaluate(grid)
    for n in (1, 2):
        assert mx(a - sp.star_gamma_continued(z, "+", n, K_PLUS).evaluate(grid)) < 1e-5


@pytest.mark.parametrize("m", [0, 1])
def test_gamma_residues(m, grid):
    E = [matrix_element("E", k, k, K_PLUS).evaluate(grid) for k in range(m + 1)]
    r = contour_residue(lambda w: sp.star_gamma_continued(w, "+", m + 2, K_PLUS), -(m + 0.5), 0.25, grid=grid)
    want = sum(c * E[k] for k, c in sp.gamma_residue_combination(m).items())
    assert mx(r.values - want) < 1e-4


def test_gamma_residue_combination():
    assert sp.gamma_residue_combination(2) == {0: 0.5, 1: -1.0, 2: 1.0}


def test_gamma_poles_and_regions():
    with pytest.raises(PoleError):
        sp.star_gamma(-1.5, "+", K_PLUS)
    with pytest.raises(OutOfRegion):
        sp.star_gamma_continued(-1.2, "+", 1, K_PLUS)
    with pytest.raises(ValueError):
        sp.star_gamma(1.0, "x", K_PLUS)


def test_gamma_diag_components():
    d = sp.gamma_diag(0.5, "+", "Emat", 4)
    np.testing.assert_allclose(d.coeffs, [math.factorial(n) for n in range(5)], rtol=1e-13)
    d = sp.gamma_diag(3.0, "-", "Emat", 2)
    np.testing.assert_allclose(d.coeffs, [gamma_c(2.5), gamma_c(1.5), gamma_c(0.5)], rtol=1e-13)


def test_gamma_inverse_and_hybrid():
    z = 0.7 + 0.3j
    prod = diag_arith("mul", sp.gamma_diag(z, "+"), sp.star_gamma_inverse_diag(z, "+"))
    assert np.max(np.abs(prod.coeffs - 1)) < 1e-12
    g, ginv = sp.gamma_hybrid(z, 20)
    hyb = g.mul(ginv)
    assert np.max(np.abs(hyb.epart.coeffs - 1)) < 1e-12
    assert np.max(np.abs(hyb.ebarpart.coeffs - 1)) < 1e-12
    with pytest.raises(WrongClass):
        sp.star_gamma_inverse_diag(z, "+", "EbarMat")


def test_gamma_product_approximants(grid):
    ref = sp.star_gamma(1.0, "+", K_PLUS).integral.evaluate(grid)
    errs = [mx(sp.star_gamma_product(1.0, "+", n, K_PLUS).evaluate(grid) - ref) for n in (8, 32, 128)]
    assert errs[0] > errs[1] > errs[2]
    # the error falls like 1/n
    assert errs[0] / errs[2] > 8


def test_euler_gap():
    assert abs(sp.euler_gamma_gap(128)) < 1e-2
    assert abs(sp.euler_gamma_gap(1024)) < abs(sp.euler_gamma_gap(128))


# --- zeta -----------------------------------------------------------------

@pytest.mark.parametrize("sign", "+-")
def test_dirichlet_vs_euler(sign, grid):
    a = sp.star_zeta(2.0, sign, 200, K_PLUS).integral.evaluate(grid)
    b = sp.star_zeta_euler(2.0, sign, 100, 12, K_PLUS).evaluate(grid)
    assert mx(a - b) < 1e-2


def test_euler_scalar_oracle():
    assert abs(sp.euler_scalar(2.5, 100) - complex(mp.zeta(2.5))) < 1e-3
    assert abs(sp.euler_scalar(2.5, 1000) - complex(mp.zeta(2.5))) < abs(sp.euler_scalar(2.5, 100) - complex(mp.zeta(2.5)))


def test_euler_terms():
    assert sp.euler_terms(5, 2, 30) == [1, 2, 3, 4, 5, 6, 9, 10, 12, 15, 18, 20, 25, 30]


def test_zeta_diag_components():
    d = sp.zeta_diag(1.5, 3)
    np.testing.assert_allclose(d.coeffs, [complex(mp.zeta(2 + k)) for k in range(4)], rtol=1e-12)
    inv = sp.star_zeta_inverse_diag(1.5, 3)
    np.testing.assert_allclose(inv.coeffs * d.coeffs, 1, rtol=1e-14)
    with pytest.raises(PoleError):
        sp.zeta_diag(0.5)
    with pytest.raises(OutOfRegion):
        sp.star_zeta(0.4, "+", 10, K_PLUS)


@pytest.mark.parametrize("name", ["L", "zeta"])
def test_diag_integral_coherence_deep(name, grid):
    res = sp.L_star(2.0, "+", K_DEEP) if name == "L" else sp.star_zeta(2.0, "+", 200, K_DEEP)
    emb = diag_embed(res.diag, K_DEEP, grid).values
    assert mx(emb - res.integral.evaluate(grid)) < 1e-3


# --- L --------------------------------------------------------------------

@pytest.mark.parametrize("z", [0.8, 1.5])
def test_L_bernoulli_vs_quadrature(z, grid):
    a = sp.L_star(z, "+", K_PLUS, method="integral").integral.evaluate(grid)
    b = sp.L_star(z, "+", K_PLUS, method="bernoulli").integral.evaluate(grid)
    assert mx(a - b) < 1e-5


def test_L_components():
    d = sp.L_diag(2.0, 3)
    for k in range(4):
        s = 2.5 + k
        assert d.coeff(k) == pytest.approx(complex(mp.gamma(s) * mp.zeta(s)), rel=1e-12)
    with pytest.raises(PoleError):
        sp.L_star(0.5, "+", K_PLUS)
    with pytest.raises(OutOfRegion):
        sp.L_star(0.3, "+", K_PLUS, method="integral")


@pytest.mark.parametrize("t", [-3.0, -1.0, 0.0, 1.0, 2.0])
def test_bose_split_decay(t):
    # both pieces decay like e^{-e^t} on the right and e^{3t} on the left
    v = sp.bose_split_decay(t)
    bound = math.exp(-math.exp(t)) * 1.6 if t >= 0 else math.exp(3 * t)
    assert v < bound


# --- partitions -----------------------------------------------------------

def test_partition_product_coefficients():
    c = sp.partition_product_coeffs(20, 20)
    assert c == [partitions(n) for n in range(21)]


def test_partition_series_vs_product(grid):
    a = sp.partition_gen(1.0, "+", 30, K_PLUS).evaluate(grid)
    b = sp.partition_product(1.0, "+", 30, K_PLUS, degree=30).evaluate(grid)
    assert mx(a - b) < 1e-12
    with pytest.raises(OutOfRegion):
        sp.partition_gen(0.0, "+", 5, K_PLUS)


# --- reflection -----------------------------------------------------------

@settings(max_examples=20)
@given(st.floats(0.02, 0.98), st.floats(-5, 5), st.integers(0, 5))
def test_reflection_residual(x, y, k):
    # sigma = s + k + 1/2 = 1 is the pole of xi
    assume(abs(complex(x, y) + k - 0.5) > 1e-3)
    assert sp.reflection_residual(complex(x, y), k) < 1e-10


@settings(max_examples=20)
@given(st.floats(0.02, 0.98), st.floats(-5, 5))
def test_G_symmetry_pairing(x, y):
    s = complex(x, y)
    assume(abs(s - 0.5) > 1e-3)
    _, G = sp.FG_hybrid(s, 5)
    _, Gr = sp.FG_hybrid(1 - s, 5, pairing="minus")
    assert np.max(np.abs(G.epart.coeffs - Gr.epart.coeffs)) < 1e-10
    assert np.max(np.abs(G.ebarpart.coeffs - Gr.ebarpart.coeffs)) < 1e-10


def test_phi_split_identity(grid):
    a = sp.phi_star(2.0, "+", K_PLUS).evaluate(grid)
    b = sp.phi_star(2.0, "+", K_PLUS, method="split").evaluate(grid)
    assert mx(a - b) < 1e-4
    with pytest.raises(OutOfRegion):
        sp.phi_star(0.3, "+", K_PLUS, method="integral")


def test_theta_tail_branches():
    x = np.array([-0.5, -1e-9, 0.0, 0.7])
    want = [(float(mp.jtheta(3, 0, mp.exp(-mp.pi * mp.e ** v))) - 1) / 2 for v in x]
    np.testing.assert_allclose(sp.theta_tail(x), want, rtol=1e-12)
