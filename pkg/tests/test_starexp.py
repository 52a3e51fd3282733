"""Closed-form star-exponential, singular set, classes and the Riccati oracle."""
import json
import math

import mpmath as mp
import numpy as np
import pytest
import sympy as spy
from hypothesis import given, strategies as st

from kstar.errors import PathTooCloseToSingularity, SingularPoint
from kstar.starexp import (GaussPoly, QuadForm, classify, denominator, exchanging_interval, exp_2H,
                           exp_2H_path, polar_element, q_scalar_sign, riccati_flow, singular_points)
from kstar.verify import K_TABLE, scan_interval
from kstar.weyl import WEYL, ExprParam, HbarConfig
from kstar.words import default_grid

from conftest import K_GENERIC, K_MINUS, K_PLUS, K_ZERO
from oracles import gauss_sym, star_sym

# mpmath: 0.5 log 3, 0.5 log(7/3), 0.5 log 5
HALF_LN3 = 0.5493061443340549
HALF_LN7_3 = 0.42364893019360184
HALF_LN5 = 0.8047189562170501


def test_frozen_logs_match_mpmath():
    assert float(mp.log(3) / 2) == pytest.approx(HALF_LN3, abs=1e-16)
    assert float(mp.log(mp.mpf(7) / 3) / 2) == pytest.approx(HALF_LN7_3, abs=1e-16)
    assert float(mp.log(5) / 2) == pytest.approx(HALF_LN5, abs=1e-16)


def gauss_data(g: GaussPoly):
    return np.array(g.quad.as_tuple() + (g.amp,))


# --- closed form ----------------------------------------------------------

def test_t_zero_is_one():
    g = exp_2H(0.0, K_GENERIC)
    assert g.amp == 1 and g.quad.as_tuple() == (0, 0, 0)


@pytest.mark.parametrize("t", [0.3, -0.8, 0.4j, 0.2 + 0.7j, 1.3 - 0.2j])
def test_weyl_ordering_sech_tanh(t):
    # delta = c = delta' = 0: sech(t) exp((2 / i hbar) tanh(t) uv)
    g = exp_2H(t, WEYL)
    assert g.amp == pytest.approx(complex(mp.sech(t)), abs=1e-14)
    assert g.quad.quv == pytest.approx(complex(mp.tanh(t)), abs=1e-14)
    assert abs(g.quad.quu) < 1e-15 and abs(g.quad.qvv) < 1e-15


@pytest.mark.parametrize("t", [-0.9, -0.3, 0.2, 0.7, 1.0])
def test_closed_form_solves_the_flow(t):
    # d/dt exp_2H(t) = (2 / i hbar) :u o v:_K * exp_2H(t), checked pointwise on the grid
    K, h = K_GENERIC, HbarConfig(0.7)
    grid = default_grid()
    eps = 1e-5
    lhs = (exp_2H(t + eps, K, h)(grid.u, grid.v, h) - exp_2H(t - eps, K, h)(grid.u, grid.v, h)) / (2 * eps)
    g = exp_2H(t, K, h)
    iha = spy.I * h.hbar

    def P(a, b):
        return 2 / iha * (a * b + iha * complex(K.c) / 2)

    rhs = star_sym(P, lambda a, b: gauss_sym(g, h.hbar, a, b), K, h.hbar, 2)(grid.u, grid.v)
    assert np.max(np.abs(lhs - rhs)) < 1e-8


def test_polar_element_by_substitution():
    # amplitudes differ by a factor +-i, exponents agree (see the ledger)
    for K in (K_PLUS, K_ZERO, K_GENERIC):
        g = exp_2H(1j * math.pi / 2 * (1 - 1e-13), K)
        p = polar_element(K)
        np.testing.assert_allclose(g.quad.as_tuple(), p.quad.as_tuple(), atol=1e-9)
        ratio = g.amp / p.amp
        assert min(abs(ratio - 1j), abs(ratio + 1j)) < 1e-9


def test_polar_element_worked_values():
    # delta = delta' = 1/2, c = 2: 2/sqrt(15) exp((2u^2 + 2v^2 - 16uv) / (15 i hbar))
    p = polar_element(ExprParam(0.5, 2.0, 0.5))
    assert p.amp == pytest.approx(2 / math.sqrt(15), abs=1e-15)
    np.testing.assert_allclose(p.quad.as_tuple(), (2 / 15, -8 / 15, 2 / 15), atol=1e-15)
    q = polar_element(ExprParam(0.0, 1.0, 0.7))
    assert q.amp == pytest.approx(1.0) and q.quad.quv == pytest.approx(-1.0)


# --- paths and branches ---------------------------------------------------

def test_real_path_has_sign_plus():
    for K in (K_PLUS, K_ZERO, K_GENERIC):
        g, sign = exp_2H_path([0, 1.0], K)
        assert sign == 1
        assert np.max(np.abs(gauss_data(g) - gauss_data(exp_2H(1.0, K)))) < 1e-14


@pytest.mark.parametrize("c, value", [(0.0, 1), (2.0, -1), (-2.0, -1)])
def test_full_period_values(c, value):
    K = ExprParam(0.5, c, 0.5)
    g, _ = exp_2H_path([0, 1j * math.pi], K)
    assert g.amp == pytest.approx(value, abs=1e-10)
    assert max(abs(x) for x in g.quad.as_tuple()) < 1e-10
    assert q_scalar_sign(K) == value


@pytest.mark.parametrize("t", [0.3, -0.6 + 0.2j, 0.1 + 0.4j])
def test_ipi_periodicity_up_to_sign(t):
    K = K_GENERIC
    a = exp_2H(t, K)
    b, _ = exp_2H_path([0, t, t + 1j * math.pi], K)
    np.testing.assert_allclose(a.quad.as_tuple(), b.quad.as_tuple(), atol=1e-10)
    assert min(abs(a.amp - b.amp), abs(a.amp + b.amp)) < 1e-10


def _loop(center, r, n=12):
    return [center + r * np.exp(1j * (np.pi + 2 * np.pi * k / n)) for k in range(n + 1)]


def test_branch_coherence():
    K = K_GENERIC
    p = singular_points(K, -3, 3)
    p0 = p[np.argmin(np.abs(p))]
    r = 0.05
    start = p0 - r
    path = [0, start] + _loop(p0, r)[1:] + [0]
    g, sign = exp_2H_path(path, K)
    assert sign == -1 and g.amp == pytest.approx(-1, abs=1e-9)
    # loop around no singular point
    path = [0, 0.1, 0.1 + 0.1j, 0.1j, 0]
    g, sign = exp_2H_path(path, K)
    assert sign == 1 and g.amp == pytest.approx(1, abs=1e-12)


def test_singular_point_is_rejected():
    K = K_GENERIC
    p = singular_points(K, -3, 3)[0]
    with pytest.raises(SingularPoint):
        exp_2H(p, K)
    with pytest.raises(PathTooCloseToSingularity):
        exp_2H_path([0, p + 1e-5], K)


@pytest.mark.parametrize("K", [K_GENERIC, K_PLUS, K_MINUS])
@pytest.mark.parametrize("s", [30.0, -30.0, 35.0, -40.0])
def test_rapid_decrease(K, s):
    # t0 chosen off every singular line
    assert abs(exp_2H(s + 0.05j, K).amp) < 1e-10


# --- interval and classes -------------------------------------------------

@pytest.mark.parametrize("c, interval, tag", [
    (0.0, (-HALF_LN3, HALF_LN3), "Kzero"),
    (2.0, (HALF_LN7_3, HALF_LN5), "Kplus"),
    (-2.0, (-HALF_LN5, -HALF_LN7_3), "Kminus"),
])
def test_interval_table(c, interval, tag):
    K = ExprParam(0.5, c, 0.5)
    a, b = exchanging_interval(K)
    assert (a, b) == pytest.approx(interval, abs=1e-10)
    assert classify(K).tag == tag
    assert scan_interval(K) == pytest.approx(interval, abs=1e-10)


def test_table_in_verify_matches_frozen_values():
    for c, (K, iv, tag, sign) in K_TABLE.items():
        assert exchanging_interval(K) == pytest.approx(iv, abs=1e-12)


cplx = st.builds(complex, st.floats(-1, 1), st.floats(-1, 1))


@given(cplx, cplx, cplx)
def test_singular_points_lie_on_interval_lines(d, c, dp):
    K = ExprParam(d, c, dp)
    try:
        a, b = exchanging_interval(K)
    except Exception:
        return
    pts = singular_points(K, -4, 4)
    for p in pts:
        assert min(abs(p.real - a), abs(p.real - b)) < 1e-10
        assert abs(denominator(p, K)) < 1e-8 * max(1.0, math.exp(2 * abs(p.real)))


@given(cplx, cplx, cplx)
def test_class_invariants(d, c, dp):
    try:
        cls = classify(ExprParam(d, c, dp))
    except Exception:
        return
    a, b = cls.interval
    assert a <= b
    if cls.tag == "Kplus":
        assert a > 0
    elif cls.tag == "Kminus":
        assert b < 0
    elif cls.tag == "Kzero":
        assert a < 0 < b


# --- Riccati oracle -------------------------------------------------------

def test_riccati_matches_sech_tanh():
    g = riccati_flow(GaussPoly(1.0 + 0j), 0.3, 200, WEYL)
    assert g.amp == pytest.approx(complex(mp.sech(0.3)), abs=1e-8)
    assert g.quad.quv == pytest.approx(complex(mp.tanh(0.3)), abs=1e-8)


def test_riccati_zero_time_is_identity():
    init = exp_2H(0.2, K_GENERIC)
    assert riccati_flow(init, 0, 10, K_GENERIC) is init


@pytest.mark.parametrize("z1, z2", [(0.3, 0.4), (0.2j, -0.5), (0.3 + 0.1j, 0.2 - 0.3j)])
def test_exponential_law_via_flow(z1, z2):
    K = K_GENERIC
    g = riccati_flow(exp_2H(z2, K), z1, 400, K)
    assert np.max(np.abs(gauss_data(g) - gauss_data(exp_2H(z1 + z2, K)))) < 1e-8


@pytest.mark.parametrize("t", list(np.linspace(-1, 1, 5)) + list(1j * np.linspace(-1, 1, 5)))
def test_closed_form_vs_riccati(t):
    K = K_GENERIC
    g = riccati_flow(GaussPoly(1.0 + 0j), t, 400, K)
    assert np.max(np.abs(gauss_data(g) - gauss_data(exp_2H(t, K)))) < 1e-8


# --- serialization --------------------------------------------------------

def test_gauss_json_round_trip():
    g = exp_2H(0.4 + 0.1j, K_GENERIC)
    d = json.loads(json.dumps(g.to_json()))
    assert set(d) == {"amp", "Q", "poly", "sign"} and set(d["Q"]) == {"uu", "uv", "vv"}
    assert GaussPoly.from_json(d).close_to(g, 0)


def test_quadform_evaluation():
    q = QuadForm(1.0, 2.0, 3.0)
    assert q(1.0, 1.0) == pytest.approx(1 + 4 + 3)
