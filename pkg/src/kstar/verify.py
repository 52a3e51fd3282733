"""Property suites behind ``kstar verify``.

Each suite returns a list of ``Check`` rows.  A row passes when its
residual is at most its tolerance.  Rows marked ``expected_fail`` document
a target that the method cannot reach (the residual is still reported).
"""
from __future__ import annotations

import inspect
import math
from dataclasses import dataclass

import numpy as np

from . import diag as dg
from . import scalar as sc
from . import special as sp
from .starexp import (classify, denominator, exchanging_interval, exp_2H, exp_2H_path,
                      polar_element, q_scalar_sign, riccati_flow)
from .weyl import ExprParam, HbarConfig, WeylPoly, H_poly, intertwine, star_product, to_ordered
from .words import (contour_residue, default_grid, inverse_pm, matrix_element,
                    star_delta, star_delta_continued, vacuum)

# expression parameters used by the suites; none has singular points on the real axis
K_PLUS = ExprParam(0.5, 2 + 0.5j, 0.5)
K_ZERO = ExprParam(0.5, 0.3j, 0.5)
K_MINUS = ExprParam(0.5, -2 - 0.5j, 0.5)
K_GENERIC = ExprParam(0.4 + 0.2j, 0.3 + 0.1j, 0.6 - 0.1j)
# interval far to the right: truncated Gamma-type diagonal sums track the integral
K_DEEP = ExprParam(0.01j, 1 + 0.02j, 0.01j)
# the three worked parameters delta = delta' = 1/2, c in {0, 2, -2}
K_TABLE = {
    0.0: (ExprParam(0.5, 0.0, 0.5), (-0.5 * math.log(3), 0.5 * math.log(3)), "Kzero", 1),
    2.0: (ExprParam(0.5, 2.0, 0.5), (0.5 * math.log(7 / 3), 0.5 * math.log(5)), "Kplus", -1),
    -2.0: (ExprParam(0.5, -2.0, 0.5), (-0.5 * math.log(5), -0.5 * math.log(7 / 3)), "Kminus", -1),
}


@dataclass
class Check:
    name: str
    residual: float
    tol: float
    expected_fail: bool = False
    note: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tol)

    @property
    def status(self) -> str:
        if self.passed:
            return "pass"
        return "xfail" if self.expected_fail else "FAIL"


def _mx(a) -> float:
    return float(np.max(np.abs(a)))


def _rand_poly(rng, deg: int) -> WeylPoly:
    return WeylPoly({(i, j): complex(*rng.uniform(-1, 1, 2))
                     for i in range(deg + 1) for j in range(deg + 1 - i)})


def _rand_K(rng) -> ExprParam:
    return ExprParam(*(complex(*rng.uniform(-1, 1, 2)) for _ in range(3)))


def _rel(a: WeylPoly, b: WeylPoly) -> float:
    scale = max(a.max_abs(), b.max_abs(), 1.0)
    return (a - b).max_abs() / scale


# ---------------------------------------------------------------------------


def suite_core(h: HbarConfig = HbarConfig(), n_triples: int = 100, n_K: int = 5, seed: int = 7) -> list[Check]:
    rng = np.random.default_rng(seed)
    Ks = [_rand_K(rng) for _ in range(n_K)]
    assoc = hom = 0.0
    for idx in range(n_triples):
        K = Ks[idx % n_K]
        K2 = Ks[(idx + 1) % n_K]
        f, g, k = (_rand_poly(rng, int(rng.integers(0, 7))) for _ in range(3))
        fg = star_product(f, g, K, h)
        assoc = max(assoc, _rel(star_product(fg, k, K, h), star_product(f, star_product(g, k, K, h), K, h)))
        hom = max(hom, _rel(intertwine(fg, K, K2, h),
                            star_product(intertwine(f, K, K2, h), intertwine(g, K, K2, h), K2, h)))
    u, v = WeylPoly.u(), WeylPoly.v()
    comm = max((star_product(u, v, K, h) - star_product(v, u, K, h) - WeylPoly.const(-h.ih)).max_abs() for K in Ks)
    return [
        Check("associativity (relative)", assoc, 1e-12),
        Check("intertwiner homomorphism (relative)", hom, 1e-12),
        Check("[u, v] = -i hbar", comm, 1e-14),
    ]


def scan_interval(K: ExprParam, heights: int = 48, xmax: float = 4.0, npts: int = 4001) -> tuple[float, float]:
    """Dense-scan oracle for the exchanging interval.

    Samples ``|D(t)|`` on horizontal lines, seeds Newton's method from
    the local minima and keeps the real parts of the distinct zeros.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        return _scan(K, heights, xmax, npts)


def _scan(K: ExprParam, heights: int, xmax: float, npts: int) -> tuple[float, float]:
    xs = np.linspace(-xmax, xmax, npts)
    roots: list[complex] = []
    for y in np.linspace(0.0, np.pi, heights, endpoint=False):
        vals = np.abs(denominator(xs + 1j * y, K))
        mins = np.flatnonzero((vals[1:-1] < vals[:-2]) & (vals[1:-1] < vals[2:])) + 1
        for i in mins:
            t = complex(xs[i], y)
            for _ in range(60):
                step = 1e-6
                d = (denominator(t + step, K) - denominator(t - step, K)) / (2 * step)
                if d == 0:
                    break
                dt = denominator(t, K) / d
                t = t - dt
                if abs(dt) < 1e-15:
                    break
            if abs(denominator(t, K)) < 1e-10 and all(abs(t.real - r.real) > 1e-8 for r in roots):
                roots.append(t)
    re = sorted(r.real for r in roots)
    if len(re) != 2:
        raise RuntimeError(f"scan found {len(re)} singular lines")
    return re[0], re[1]


def suite_exp(h: HbarConfig = HbarConfig()) -> list[Check]:
    out = []
    pts = list(np.linspace(-1, 1, 10)) + list(1j * np.linspace(-1, 1, 10))
    worst = 0.0
    for K in (K_ZERO, K_GENERIC):
        for t in pts:
            if t == 0:
                continue
            g = exp_2H(t, K, h)
            steps = max(40, int(80 * abs(t)))
            r = riccati_flow(exp_2H(0, K, h), t, steps, K, h)
            worst = max(worst, abs(g.amp - r.amp), *(abs(x - y) for x, y in zip(g.quad.as_tuple(), r.quad.as_tuple())))
    out.append(Check("closed form vs Riccati flow (20 points)", worst, 1e-8))
    worst = 0.0
    for K in (K_ZERO, K_GENERIC):
        for t1, t2 in ((0.3, 0.4), (0.2j, 0.5j), (-0.4, 0.3j)):
            r = riccati_flow(exp_2H(t1, K, h), t2, 60, K, h)
            g, _ = exp_2H_path([0, t1, t1 + t2], K, h)
            worst = max(worst, abs(g.amp - r.amp), *(abs(x - y) for x, y in zip(g.quad.as_tuple(), r.quad.as_tuple())))
    out.append(Check("exponential law via flow", worst, 1e-8))
    iv = cl = sg = 0.0
    for c, (K, expected, tag, sign) in K_TABLE.items():
        a, b = exchanging_interval(K)
        sa, sb = scan_interval(K)
        iv = max(iv, abs(a - expected[0]), abs(b - expected[1]), abs(a - sa), abs(b - sb))
        cl = max(cl, 0.0 if classify(K).tag == tag else 1.0)
        sg = max(sg, 0.0 if q_scalar_sign(K, h) == sign else 1.0)
    out.append(Check("interval table vs formula and scan", iv, 1e-10))
    out.append(Check("classes Kzero/Kplus/Kminus", cl, 0.0))
    out.append(Check("q-scalar signs +1/-1/-1", sg, 0.0))
    K = K_TABLE[2.0][0]
    pol = polar_element(K, h)
    out.append(Check("polar amplitude 2/sqrt(15)", abs(pol.amp - 2 / math.sqrt(15)), 1e-12))
    return out


def suite_words(h: HbarConfig = HbarConfig(), max_index: int = 2) -> list[Check]:
    grid = default_grid()
    out = []
    K = K_GENERIC
    r = range(max_index + 1)
    E = {(p, q): matrix_element("E", p, q, K, h) for p in r for q in r}
    Eb = {(p, q): matrix_element("Ebar", p, q, K, h) for p in r for q in r}
    Ev = {k: x.evaluate(grid) for k, x in E.items()}
    Ebv = {k: x.evaluate(grid) for k, x in Eb.items()}
    zero = np.zeros(len(grid.points))
    w_e = w_b = w_x = 0.0
    for (p, q) in E:
        for (rr, s) in E:
            want = Ev[(p, s)] if q == rr else zero
            w_e = max(w_e, _mx(E[(p, q)].star(E[(rr, s)]).evaluate(grid) - want))
            wantb = Ebv[(p, s)] if q == rr else zero
            w_b = max(w_b, _mx(Eb[(p, q)].star(Eb[(rr, s)]).evaluate(grid) - wantb))
            w_x = max(w_x, _mx(E[(p, q)].star(Eb[(rr, s)]).evaluate(grid)))
    out.append(Check("E matrix units", w_e, 1e-6))
    out.append(Check("Ebar matrix units", w_b, 1e-6))
    out.append(Check("E * Ebar = 0", w_x, 1e-6))
    idem = 0.0
    for kind, KK in (("vac", K_PLUS), ("barvac", K_MINUS), ("pseudovac", K_ZERO)):
        x = vacuum(kind, KK, h)
        idem = max(idem, _mx(x.star(x).evaluate(grid) - x.evaluate(grid)))
    out.append(Check("vacuum idempotency", idem, 1e-6))
    # star-delta
    Hp = to_ordered(H_poly(K_PLUS, h), K_PLUS, h)
    d = star_delta(0.0, 0.0, K_PLUS, h)
    out.append(Check("H * delta = 0", _mx(d.left_mul(Hp).evaluate(grid)), 1e-6))
    res = 0.0
    for k in range(2):
        Ek = matrix_element("E", k, k, K_PLUS, h).evaluate(grid)
        Ebk = matrix_element("Ebar", k, k, K_PLUS, h).evaluate(grid)
        rm = contour_residue(lambda w: star_delta_continued(w, K_PLUS, h), -(k + 0.5), 0.25, grid=grid)
        rp = contour_residue(lambda w: star_delta_continued(w, K_PLUS, h), k + 0.5, 0.25, grid=grid)
        res = max(res, _mx(rm.values - Ek), _mx(rp.values + Ebk))
    out.append(Check("delta residues -> E_kk / -Ebar_kk (k <= 1)", res, 1e-4))
    return out


def suite_diag(h: HbarConfig = HbarConfig()) -> list[Check]:
    grid = default_grid()
    out = []
    a, b = dg.diag_exp("Emat", 0.3, 0.7), dg.diag_exp("Emat", 0.3, -0.2 + 0.4j)
    ref = dg.diag_exp("Emat", 0.3, 0.5 + 0.4j).coeffs
    # coefficients grow like e^{n/2}, so compare componentwise in relative terms
    law = _mx((dg.diag_arith("mul", a, b).coeffs - ref) / np.abs(ref))
    out.append(Check("componentwise exponential law", law, 1e-14))
    ones = _mx(dg.diag_embed(dg.DiagSeries.ones("Emat", 40), K_PLUS, grid, h).values - 1)
    out.append(Check("sum E_kk = 1 (N = 40)", ones, 1e-10))
    res = dg.DiagSeries.from_function("Emat", 40, lambda n: 1 / (1 + n + 0.5))
    inv = inverse_pm(1.0, "+", K_PLUS, h).evaluate(grid)
    out.append(Check("resolvent embedding vs inverse_+", _mx(dg.diag_embed(res, K_PLUS, grid, h).values - inv), 1e-5))
    # hybrid orthogonality; residual scaled by sup|E_nn| sup|Ebar_mm|, which reach 1e6 on a generic K
    w = 0.0
    for n in range(4):
        for m in range(4):
            en = matrix_element("E", n, n, K_GENERIC, h)
            ebm = matrix_element("Ebar", m, m, K_GENERIC, h)
            scale = _mx(en.evaluate(grid)) * _mx(ebm.evaluate(grid))
            w = max(w, _mx(en.star(ebm).evaluate(grid)) / scale)
    out.append(Check("hybrid orthogonality E_nn * Ebar_mm (N <= 3)", w, 1e-6))
    z = 0.3 + 0.2j
    sine = max(abs(sc.sinpi(z + k + 0.5) / math.pi
                   - sc.rgamma_c(z + k + 0.5) * sc.rgamma_c(1 - z - k - 0.5)) for k in range(20))
    out.append(Check("sine expansion components", sine, 1e-12))
    partial = np.cumsum([abs(sc.gamma_c(0.3 + n)) for n in range(31)])
    out.append(Check("Dmat Gamma partial sums grow", 0.0 if partial[-1] > 1e30 else 1.0, 0.0))
    return out


def suite_gamma(h: HbarConfig = HbarConfig()) -> list[Check]:
    grid = default_grid()
    out = []
    K = K_PLUS
    Hp = to_ordered(H_poly(K, h), K, h)
    fe = 0.0
    for sign in "+-":
        t = 1 if sign == "+" else -1
        g1 = sp.star_gamma(1.0, sign, K, h).integral
        g2 = sp.star_gamma(2.0, sign, K, h).integral
        X = Hp.scale(t) + WeylPoly.const(1.0)
        fe = max(fe, _mx(g2.evaluate(grid) - g1.left_mul(X).evaluate(grid)))
    out.append(Check("functional equation", fe, 1e-5))
    integral = sp.star_gamma(1.0, "+", K_DEEP, h).integral.evaluate(grid)
    emb = dg.diag_embed(sp.gamma_diag(1.0, "+", "Emat", 40), K_DEEP, grid, h).values
    out.append(Check("diag/integral coherence z = 1, N = 40", _mx(emb - integral), 1e-3))
    cont = _mx(sp.star_gamma(0.3, "+", K, h).integral.evaluate(grid)
               - sp.star_gamma_continued(0.3, "+", 2, K, h).evaluate(grid))
    out.append(Check("continuation agrees in overlap", cont, 1e-5))
    E = [matrix_element("E", k, k, K, h).evaluate(grid) for k in range(2)]
    for m in range(2):
        r = contour_residue(lambda w: sp.star_gamma_continued(w, "+", m + 2, K, h), -(m + 0.5), 0.25, grid=grid)
        want = sum(c * E[k] for k, c in sp.gamma_residue_combination(m).items())
        out.append(Check(f"residue at -{m}-1/2", _mx(r.values - want), 1e-4))
    z = 0.7 + 0.3j
    prod = dg.diag_arith("mul", sp.gamma_diag(z, "+"), sp.star_gamma_inverse_diag(z, "+"))
    out.append(Check("inverse diag componentwise", _mx(prod.coeffs - 1), 1e-12))
    g, ginv = sp.gamma_hybrid(z, 20)
    hyb = g.mul(ginv)
    out.append(Check("hybrid self-product", max(_mx(hyb.epart.coeffs - 1), _mx(hyb.ebarpart.coeffs - 1)), 1e-12))
    ref = sp.star_gamma(1.0, "+", K, h).integral.evaluate(grid)
    errs = [_mx(sp.star_gamma_product(1.0, "+", n, K, h).evaluate(grid) - ref) for n in (8, 32, 128)]
    out.append(Check("product approximants decrease (n = 8, 32, 128)",
                     0.0 if errs[0] > errs[1] > errs[2] else 1.0, 0.0))
    out.append(Check("product approximant error at n = 128", errs[2], 1e-3, expected_fail=True,
                     note="error is O(1/n); the scalar component alone is 1.3e-2 at n = 128"))
    out.append(Check("Euler constant gap at n = 128", abs(sp.euler_gamma_gap(128)), 1e-2))
    return out


def _L_scalar(s: complex) -> complex:
    """``int_0^inf x^{s-1}/(e^x - 1) dx`` through ``x = e^t``, Gauss panels."""
    from .quadrature import gauss_panels
    lo = -40.0 / max(s.real - 1, 0.05)
    t, w = gauss_panels(lo, math.log(60.0), width=0.25, order=20)
    return complex(np.sum(w * np.exp(s * t) / np.expm1(np.exp(t))))


def suite_zeta(h: HbarConfig = HbarConfig()) -> list[Check]:
    grid = default_grid()
    out = []
    K = K_PLUS
    dirichlet = sp.star_zeta(2.0, "+", 200, K, h).integral.evaluate(grid)
    euler = sp.star_zeta_euler(2.0, "+", 100, 12, K, h).evaluate(grid)
    out.append(Check("Dirichlet vs Euler product (grid)", _mx(dirichlet - euler), 1e-2))
    out.append(Check("Euler product scalar oracle", abs(sp.euler_scalar(2.5, 100) - sc.zeta_c(2.5)), 1e-3))
    s = 2.5
    out.append(Check("Gamma zeta = L componentwise", abs(sc.gamma_c(s) * sc.zeta_c(s) - _L_scalar(s)), 1e-8))
    w = 0.0
    for z in (0.8, 1.5):
        a = sp.L_star(z, "+", K, h, method="integral").integral.evaluate(grid)
        b = sp.L_star(z, "+", K, h, method="bernoulli").integral.evaluate(grid)
        w = max(w, _mx(a - b))
    out.append(Check("Bernoulli continuation vs quadrature", w, 1e-5))
    exact = sum(0 if sc.partitions(n) == sp.partition_product_coeffs(20, 20)[n] else 1 for n in range(21))
    out.append(Check("partition coefficients equal p(n), n <= 20", float(exact), 0.0))
    for name, res in (("L", sp.L_star(2.0, "+", K_DEEP, h)), ("zeta", sp.star_zeta(2.0, "+", 200, K_DEEP, h))):
        emb = dg.diag_embed(res.diag, K_DEEP, grid, h).values
        out.append(Check(f"{name} diag/integral coherence", _mx(emb - res.integral.evaluate(grid)), 1e-3))
    out.append(Check("trivial zeros zeta(-2n)", max(abs(sc.zeta_c(-2 * n)) for n in range(1, 6)), 1e-10))
    return out


def suite_reflect(h: HbarConfig = HbarConfig(), seed: int = 11) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    worst = 0.0
    gsym = 0.0
    for _ in range(20):
        s = complex(rng.uniform(0.02, 0.98), rng.uniform(-5, 5))
        for k in range(6):
            worst = max(worst, sp.reflection_residual(s, k))
        _, G = sp.FG_hybrid(s, 5)
        _, Gr = sp.FG_hybrid(1 - s, 5, pairing="minus")
        gsym = max(gsym, _mx(G.epart.coeffs - Gr.epart.coeffs), _mx(G.ebarpart.coeffs - Gr.ebarpart.coeffs))
    out.append(Check("reflection residual (20 s, k <= 5)", worst, 1e-10))
    out.append(Check("G hybrid symmetry s -> 1 - s", gsym, 1e-10))
    grid = default_grid()
    a = sp.phi_star(2.0, "+", K_PLUS, h).evaluate(grid)
    b = sp.phi_star(2.0, "+", K_PLUS, h, method="split").evaluate(grid)
    out.append(Check("phi_star split identity at s = 2", _mx(a - b), 1e-4))
    return out


SUITES = {
    "core": suite_core,
    "exp": suite_exp,
    "words": suite_words,
    "diag": suite_diag,
    "gamma": suite_gamma,
    "zeta": suite_zeta,
    "reflect": suite_reflect,
}


def _call(fn, h: HbarConfig) -> list[Check]:
    if "h" in inspect.signature(fn).parameters:
        return fn(h=h)
    return fn()


def run_suite(name: str, h: HbarConfig = HbarConfig()) -> list[Check]:
    if name == "all":
        rows = []
        for key, fn in SUITES.items():
            rows += [Check(f"{key}: {c.name}", c.residual, c.tol, c.expected_fail, c.note) for c in _call(fn, h)]
        return rows
    if name not in SUITES:
        raise KeyError(name)
    return _call(SUITES[name], h)
