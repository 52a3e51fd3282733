"""Words ``P_L * exp_*(zeta (H + lambda)) * P_R`` and their quadrature sums.

``H = (1 / i hbar) u o v``.  Polynomials inside words are stored by their
ordered coefficients (monomials ``u_*^i * v_*^j``), which makes the words
independent of the expression parameter until they are realized.  The
bumping rule reads ``u_*^i v_*^j * e^{zeta H} = e^{zeta (j - i)} e^{zeta H} * u_*^i v_*^j``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (ContourHitsPole, OutOfHalfPlane, OutOfStrip, WrongClass,
                     WrongRegion, IndexOutOfRange)
from .quadrature import graded_panels, periodic_trapezoid, segment_nodes, TRAPEZOID_NODES
from .starexp import (GaussFamily, GaussPoly, classify, exchanging_interval, exp_H_family,
                      _closed_parts, singular_roots)
from .weyl import NORMAL, ONE, ExprParam, HbarConfig, WeylPoly, pochhammer, star_product, to_ordered

# ---------------------------------------------------------------------------
# evaluation grid


@dataclass
class EvalGrid:
    points: np.ndarray                      # shape (m, 2), complex (u, v)
    values: np.ndarray | None = None        # shape (m,), complex

    @property
    def u(self):
        return self.points[:, 0]

    @property
    def v(self):
        return self.points[:, 1]

    def with_values(self, values) -> "EvalGrid":
        return EvalGrid(self.points, np.asarray(values, dtype=complex))

    def to_json(self) -> dict:
        out = {"points": [[p[0].real, p[0].imag, p[1].real, p[1].imag] for p in self.points]}
        if self.values is not None:
            out["values"] = [[z.real, z.imag] for z in self.values]
        return out

    @classmethod
    def from_json(cls, d: dict) -> "EvalGrid":
        pts = np.array([[complex(p[0], p[1]), complex(p[2], p[3])] for p in d["points"]], dtype=complex)
        vals = d.get("values")
        vals = None if vals is None else np.array([complex(a, b) for a, b in vals])
        return cls(pts, vals)

    def to_csv(self) -> str:
        lines = ["u_re,u_im,v_re,v_im,val_re,val_im"]
        vals = self.values if self.values is not None else np.full(len(self.points), np.nan)
        for (u, v), z in zip(self.points, vals):
            lines.append(",".join(repr(float(x)) for x in (u.real, u.imag, v.real, v.imag, z.real, z.imag)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "EvalGrid":
        rows = [r for r in text.strip().splitlines()[1:] if r.strip()]
        pts, vals = [], []
        for r in rows:
            x = [float(s) for s in r.split(",")]
            pts.append([complex(x[0], x[1]), complex(x[2], x[3])])
            if len(x) >= 6:
                vals.append(complex(x[4], x[5]))
        have = vals and not any(np.isnan(z.real) for z in vals)
        return cls(np.array(pts, dtype=complex), np.array(vals) if have else None)


def default_grid(radius: float = 0.5) -> EvalGrid:
    """5 x 5 points: u and v each range over ``{0, +-r, +-i r}``."""
    axis = np.array([0, radius, -radius, 1j * radius, -1j * radius], dtype=complex)
    pts = np.array([[a, b] for a in axis for b in axis], dtype=complex)
    return EvalGrid(pts)


# ---------------------------------------------------------------------------
# words


def _is_const(P: WeylPoly) -> bool:
    return all(k == (0, 0) for k in P.terms)


@dataclass(frozen=True)
class Word:
    """``scalar * sign * left * exp_*(zeta (H + shift)) * right``.

    ``left`` and ``right`` hold ordered coefficients.
    """

    scalar: complex = 1.0
    sign: int = 1
    left: WeylPoly = field(default_factory=lambda: ONE)
    zeta: complex = 0.0
    shift: complex = 0.0
    right: WeylPoly = field(default_factory=lambda: ONE)

    def normal_form(self) -> list["Word"]:
        """Slide the left polynomial through the exponential.

        Every ordered monomial of ``left`` gives one word with trivial left
        factor; the shift absorbs the bumping exponent.
        """
        if _is_const(self.left):
            c = self.left.coeff(0, 0)
            return [Word(self.scalar * c, self.sign, ONE, self.zeta, self.shift, self.right)]
        out = []
        for i, j, a in self.left.sorted_terms():
            R = star_product(WeylPoly.monomial(i, j), self.right, NORMAL)
            out.append(Word(self.scalar * a, self.sign, ONE, self.zeta, self.shift + (j - i), R))
        return out

    def merged(self) -> "Word":
        """Single-word normal form, requires a monomial (or constant) left factor."""
        nf = self.normal_form()
        if len(nf) != 1:
            raise ValueError("left factor is not a monomial; use normal_form()")
        return nf[0]


def word_mul(w1: Word, w2: Word, h: HbarConfig = HbarConfig()):
    """Product of two words in normal form.

    Returns a ``Word`` when the middle polynomial is a monomial and a list
    of words otherwise.  Sheet signs multiply; the merged exponential is
    read on the sheet reached through the real axis.
    """
    out = []
    for a in w1.normal_form():
        for b in w2.normal_form():
            for i, j, c in star_product(a.right, b.left, NORMAL).sorted_terms():
                # e^{z1(H+s1)} * m * e^{z2(H+s2)} -> bump m to the right
                zeta = a.zeta + b.zeta
                expo = a.zeta * a.shift + b.zeta * (b.shift + (j - i))
                sign = a.sign * b.sign
                R = star_product(WeylPoly.monomial(i, j), b.right, NORMAL)
                if zeta != 0:
                    out.append(Word(a.scalar * b.scalar * c, sign, ONE, zeta, expo / zeta, R))
                else:
                    out.append(Word(a.scalar * b.scalar * c * np.exp(expo), sign, ONE, 0.0, 0.0, R))
    return out[0] if len(out) == 1 else out


def realize(w: Word, K: ExprParam, h: HbarConfig = HbarConfig()) -> GaussPoly:
    """K-expression of a word as a single ``GaussPoly``."""
    words = w.normal_form()
    zeta = complex(w.zeta)
    if zeta == 0:
        fam = GaussFamily([1.0], [0.0], [0.0], [0.0])
        sign_path = 1
    else:
        fam, sg = exp_H_family([zeta], K, h)
        sign_path = int(sg[0])
    total: dict = {}
    for x in words:
        f = fam.mul_ordered(x.right, "right", K, h)
        coef = x.scalar * x.sign * np.exp(zeta * x.shift)
        for ij, c in f.poly.items():
            total[ij] = total.get(ij, 0) + coef * c[0]
    g = fam.member(0)
    return GaussPoly(g.amp, g.quad, WeylPoly(total), sign_path)


# ---------------------------------------------------------------------------
# integral elements


@dataclass
class Term:
    zetas: np.ndarray
    weights: np.ndarray
    right: WeylPoly


def _merge_nodes(z, w, digits=10):
    key = np.round(z.real, digits) + 1j * np.round(z.imag, digits)
    uniq, inv = np.unique(key, return_inverse=True)
    wr = np.bincount(inv, weights=w.real, minlength=uniq.size)
    wi = np.bincount(inv, weights=w.imag, minlength=uniq.size)
    # keep the first exact zeta of each class
    first = np.zeros(uniq.size, dtype=int)
    first[inv[::-1]] = np.arange(inv.size)[::-1]
    return z[first], wr + 1j * wi


class IntegralElement:
    """``sum_terms sum_nodes weight * e^{zeta H} * right`` for one ``K``."""

    def __init__(self, terms: Sequence[Term], K: ExprParam, h: HbarConfig = HbarConfig(),
                 polynomial: WeylPoly | None = None):
        self.terms = [t for t in terms if t.zetas.size]
        self.K = K
        self.h = h
        # an optional plain polynomial part (ordered coefficients)
        self.polynomial = polynomial if polynomial is not None else WeylPoly()

    # construction helpers ------------------------------------------------
    @classmethod
    def zero(cls, K, h=HbarConfig()):
        return cls([], K, h)

    @classmethod
    def constant(cls, a: complex, K, h=HbarConfig()):
        return cls([], K, h, WeylPoly.const(a))

    @classmethod
    def family(cls, zetas, weights, K, h=HbarConfig(), right: WeylPoly = ONE):
        return cls([Term(np.asarray(zetas, dtype=complex).ravel(),
                         np.asarray(weights, dtype=complex).ravel(), right)], K, h)

    @property
    def n_nodes(self) -> int:
        return sum(t.zetas.size for t in self.terms)

    # linear structure ----------------------------------------------------
    def _check(self, other):
        if other.K != self.K or other.h != self.h:
            raise ValueError("integral elements for different K or hbar")

    def compact(self) -> "IntegralElement":
        groups: dict = {}
        for t in self.terms:
            key = tuple(sorted((k, complex(np.round(a, 14))) for k, a in t.right.terms.items()))
            groups.setdefault(key, []).append(t)
        terms = []
        for ts in groups.values():
            z = np.concatenate([t.zetas for t in ts])
            w = np.concatenate([t.weights for t in ts])
            z, w = _merge_nodes(z, w)
            terms.append(Term(z, w, ts[0].right))
        return IntegralElement(terms, self.K, self.h, self.polynomial)

    def __add__(self, other):
        if not isinstance(other, IntegralElement):
            return IntegralElement(self.terms, self.K, self.h, self.polynomial + WeylPoly.const(other))
        self._check(other)
        return IntegralElement(self.terms + other.terms, self.K, self.h,
                               self.polynomial + other.polynomial).compact()

    __radd__ = __add__

    def scale(self, a: complex) -> "IntegralElement":
        return IntegralElement([Term(t.zetas, a * t.weights, t.right) for t in self.terms],
                               self.K, self.h, self.polynomial.scale(a))

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other if isinstance(other, IntegralElement) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, a):
        if isinstance(a, IntegralElement):
            return self.star(a)
        return self.scale(a)

    def __rmul__(self, a):
        return self.scale(a)

    # algebra ---------------------------------------------------------------
    def left_mul(self, P: WeylPoly) -> "IntegralElement":
        """``P * self`` with ``P`` given by ordered coefficients."""
        terms = []
        for t in self.terms:
            for i, j, a in P.sorted_terms():
                w = t.weights * a * np.exp(t.zetas * (j - i))
                R = star_product(WeylPoly.monomial(i, j), t.right, NORMAL)
                terms.append(Term(t.zetas, w, R))
        poly = star_product(P, self.polynomial, NORMAL) if not self.polynomial.is_zero() else WeylPoly()
        return IntegralElement(terms, self.K, self.h, poly).compact()

    def right_mul(self, P: WeylPoly) -> "IntegralElement":
        terms = [Term(t.zetas, t.weights, star_product(t.right, P, NORMAL)) for t in self.terms]
        poly = star_product(self.polynomial, P, NORMAL) if not self.polynomial.is_zero() else WeylPoly()
        return IntegralElement(terms, self.K, self.h, poly).compact()

    def left_mul_K(self, P: WeylPoly) -> "IntegralElement":
        """Left multiply by a polynomial given as a K-expression."""
        return self.left_mul(to_ordered(P, self.K, self.h))

    def right_mul_K(self, P: WeylPoly) -> "IntegralElement":
        return self.right_mul(to_ordered(P, self.K, self.h))

    def star(self, other: "IntegralElement") -> "IntegralElement":
        """Product through the exponential law (double quadrature, merged).

        The merged exponential ``e^{(z1 + z2) H}`` is read on the sheet
        reached along ``0 -> Re(z1 + z2) -> z1 + z2``.  This is the usual
        contour bookkeeping and is valid when the merged contour stays in
        the same region of the exchanging interval as the factors require.
        """
        self._check(other)
        out_terms = []
        for ta in self.terms:
            for tb in other.terms:
                for i, j, c in ta.right.sorted_terms():
                    w = (ta.weights[:, None] * tb.weights[None, :] * c
                         * np.exp(tb.zetas[None, :] * (j - i)))
                    z = ta.zetas[:, None] + tb.zetas[None, :]
                    R = star_product(WeylPoly.monomial(i, j), tb.right, NORMAL)
                    zz, ww = _merge_nodes(z.ravel(), w.ravel())
                    out_terms.append(Term(zz, ww, R))
        res = IntegralElement(out_terms, self.K, self.h)
        if not other.polynomial.is_zero():
            res = res + IntegralElement(self.terms, self.K, self.h).right_mul(other.polynomial)
        if not self.polynomial.is_zero():
            res = res + IntegralElement(other.terms, self.K, self.h).left_mul(self.polynomial)
            if not other.polynomial.is_zero():
                res = res + IntegralElement([], self.K, self.h,
                                            star_product(self.polynomial, other.polynomial, NORMAL))
        return res.compact()

    # evaluation -------------------------------------------------------------
    def evaluate(self, grid: EvalGrid | None = None) -> np.ndarray:
        grid = grid or default_grid()
        out = np.zeros(len(grid.points), dtype=complex)
        for t in self.terms:
            for lo in range(0, t.zetas.size, 4096):
                z = t.zetas[lo:lo + 4096]
                fam, sg = exp_H_family(z, self.K, self.h)
                fam = fam.mul_ordered(t.right, "right", self.K, self.h)
                vals = fam.evaluate(grid.u, grid.v, self.h)
                out += (t.weights[lo:lo + 4096]) @ vals
        if not self.polynomial.is_zero():
            from .weyl import from_ordered
            out += from_ordered(self.polynomial, self.K, self.h)(grid.u, grid.v)
        return out

    def on_grid(self, grid: EvalGrid | None = None) -> EvalGrid:
        grid = grid or default_grid()
        return grid.with_values(self.evaluate(grid))


# ---------------------------------------------------------------------------
# contours


def h_interval(K: ExprParam) -> tuple[float, float]:
    """Exchanging interval in the variable ``zeta`` of ``e^{zeta H}``: ``(2a, 2b)``."""
    a, b = exchanging_interval(K)
    return 2 * a, 2 * b


def contour_position(kind: str, K: ExprParam) -> float:
    """Default ``Re`` of the contour: at distance >= 1 from the nearest
    singular line, with twice the value still on the same side."""
    a, b = h_interval(K)
    if kind == "vac":
        return min(a - 1.0, 0.5 * a - 0.5)
    if kind == "barvac":
        return max(b + 1.0, 0.5 * b + 0.5)
    if kind == "pseudovac":
        return 0.5 * (a + b)
    raise ValueError(kind)


def _ordered_gen(which: str, n: int) -> WeylPoly:
    return WeylPoly.monomial(n, 0) if which == "u" else WeylPoly.monomial(0, n)


def vacuum(kind: str, K: ExprParam, h: HbarConfig = HbarConfig(), n_nodes: int = TRAPEZOID_NODES,
           s: float | None = None) -> IntegralElement:
    """Vacuum, bar-vacuum or pseudo-vacuum as a periodic trapezoid sum."""
    cls = classify(K)
    if cls.tag == "Degenerate":
        raise WrongClass("degenerate expression parameter")
    if kind == "pseudovac" and cls.tag != "Kzero":
        raise WrongClass("pseudo-vacuum needs a Kzero parameter")
    if s is None:
        s = contour_position(kind, K)
    a, b = h_interval(K)
    if kind == "vac" and not s < a or kind == "barvac" and not s > b or \
            kind == "pseudovac" and not a < s < b:
        raise WrongClass(f"contour Re={s} outside the region of {kind}")
    if kind == "pseudovac":
        t, w = periodic_trapezoid(0.0, 2 * np.pi, n_nodes)
        z = s + 1j * t
        return IntegralElement.family(z, w / (2 * np.pi), K, h)
    t, w = periodic_trapezoid(-2 * np.pi, 4 * np.pi, n_nodes)
    z = s + 1j * t
    lam = -0.5 if kind == "vac" else 0.5
    return IntegralElement.family(z, w / (4 * np.pi) * np.exp(z * lam), K, h)


def _sqrt_ih_power(n: int, h: HbarConfig) -> complex:
    return (np.sqrt(h.ih)) ** n


def matrix_element(kind: str, p: int, q: int, K: ExprParam, h: HbarConfig = HbarConfig(),
                   n_nodes: int = TRAPEZOID_NODES) -> IntegralElement:
    """``E_{p,q}``, ``Ebar_{p,q}`` or ``D_{p,q}``.

    Normalizations use ``(sqrt(i hbar))^n`` in place of ``sqrt((i hbar)^n)``
    and ``i^{p+q}`` for ``sqrt(-1)^{p+q}``, which keeps the matrix-unit
    relations free of sign slips.
    """
    if kind in ("E", "Ebar"):
        if p < 0 or q < 0:
            raise IndexOutOfRange("E and Ebar indices must be non-negative")
        norm = np.sqrt(float(factorial(p) * factorial(q))) * _sqrt_ih_power(p + q, h)
        if kind == "E":
            vac = vacuum("vac", K, h, n_nodes)
            return vac.left_mul(_ordered_gen("u", p)).right_mul(_ordered_gen("v", q)).scale(1 / norm)
        vac = vacuum("barvac", K, h, n_nodes)
        return vac.left_mul(_ordered_gen("v", p)).right_mul(_ordered_gen("u", q)).scale((1j) ** (p + q) / norm)
    if kind == "D":
        vac = vacuum("pseudovac", K, h, n_nodes)
        left = _ordered_gen("u", p) if p >= 0 else _ordered_gen("v", -p)
        right = _ordered_gen("v", q) if q >= 0 else _ordered_gen("u", -q)
        norm = (np.sqrt(complex(pochhammer(0.5, p))) * np.sqrt(complex(pochhammer(0.5, q)))
                * _sqrt_ih_power(abs(p) + abs(q), h))
        return vac.left_mul(left).right_mul(right).scale(1 / norm)
    raise ValueError(kind)


def fourier_coeff(kind: str, n: int, s: float, K: ExprParam, h: HbarConfig = HbarConfig(),
                  n_nodes: int = TRAPEZOID_NODES) -> IntegralElement:
    """``(1/2pi) int_0^{2pi} e^{(s+it) H} e^{-(s+it) mu} dt``."""
    a, b = h_interval(K)
    if kind == "Etilde":
        ok, mu = s < a, n + 0.5
    elif kind == "Dtilde":
        ok, mu = a < s < b, n
    elif kind == "EbarTilde":
        ok, mu = s > b, -(n + 0.5)
    else:
        raise ValueError(kind)
    if not ok:
        raise WrongRegion(f"s={s} not in the region of {kind} for interval ({a:.4g}, {b:.4g})")
    t, w = periodic_trapezoid(0.0, 2 * np.pi, n_nodes)
    z = s + 1j * t
    return IntegralElement.family(z, w / (2 * np.pi) * np.exp(-z * mu), K, h)


# ---------------------------------------------------------------------------
# real-line integrals


def _decay_bound(K: ExprParam, tau: float, rate_shift: float, side: int) -> tuple[float, float]:
    """Prefactor and rate of ``|e^{s(shift + tau H)}|`` as ``s -> side * inf``."""
    # amplitude of exp_2H(t) behaves like C e^{-|t|}; t = tau s / 2
    probe = side * 40.0
    logabs, *_ = _closed_parts(np.array([tau * probe / 2]), K)
    amp = 2 * np.exp(-0.5 * logabs[0])
    rate = abs(tau) / 2 - side * rate_shift
    pref = amp * np.exp(probe * rate_shift + rate * 40.0) * 4.0
    return pref, rate


def _near_singular(K: ExprParam, tau: float, lo: float, hi: float, reach: float = 1.0):
    """Singular points of ``s -> e^{s tau H}`` within ``reach`` of the real segment."""
    centers, dists = [], []
    for w in singular_roots(K):
        base = np.log(w) / tau
        period = 2 * np.pi / abs(tau)
        k = np.round(-base.imag / period)
        for kk in (k - 1, k, k + 1):
            p = base + 1j * period * kk
            if abs(p.imag) < reach and lo - reach < p.real < hi + reach:
                centers.append(p.real)
                dists.append(max(abs(p.imag), 1e-3))
    return centers, dists


def line_family(lo: float | None, hi: float | None, z: complex, tau: float, K: ExprParam,
                h: HbarConfig = HbarConfig(), density=None, tol: float = 1e-14,
                extra_rate: float = 0.0) -> IntegralElement:
    """``int_lo^hi density(s) e^{s z} e^{s tau H} ds`` on the real axis.

    ``None`` bounds are infinite and truncated where the integrand bound
    falls below ``tol``.  ``extra_rate`` is the exponential decay the
    density contributes as ``s -> -inf``.
    """
    from .quadrature import truncation_point
    if lo is None:
        pref, rate = _decay_bound(K, tau, complex(z).real + extra_rate, -1)
        lo = -truncation_point(rate, pref, tol)
        if hi is not None:
            lo = min(lo, hi - 1.0)
    if hi is None:
        pref, rate = _decay_bound(K, tau, complex(z).real, 1)
        hi = truncation_point(rate, pref, tol)
        hi = max(hi, lo + 1.0)
    centers, dists = _near_singular(K, tau, lo, hi)
    s, w = graded_panels(lo, hi, centers, dists)
    dens = np.ones_like(s) if density is None else density(s)
    weights = w * np.exp(s * z) * dens
    return IntegralElement.family(tau * s, weights, K, h)


def star_delta(z: complex, xi: float, K: ExprParam, h: HbarConfig = HbarConfig()) -> IntegralElement:
    """``int e^{s(z + i xi)} e^{s H} ds`` over the real line, ``|Re z| < 1/2``."""
    z = complex(z)
    if abs(z.real) >= 0.5:
        raise OutOfStrip("star-delta needs |Re z| < 1/2")
    return line_family(None, None, z + 1j * xi, 1.0, K, h)


def _vertical(base: float, z: complex, tau: float, K, h, factor) -> tuple[np.ndarray, np.ndarray]:
    """Nodes of ``factor * int_base^{base + 2 pi i} e^{s z} e^{s tau H} ds``; ``|tau| = 1``."""
    zs, dz = segment_nodes(complex(base), complex(base) + 2j * np.pi)
    return tau * zs, factor * dz * np.exp(zs * z)


def _tails(z: complex, tau: float, K: ExprParam, h: HbarConfig, alpha: float, beta: float,
           left: bool, right: bool) -> list[Term]:
    """Meromorphic continuation of the two tail integrals.

    ``int_-inf^alpha`` equals ``-V_alpha / (1 + e^{2 pi i z})`` and
    ``int_beta^inf`` equals ``V_beta / (1 + e^{2 pi i z})``, where ``V`` is
    the integral up the vertical segment of height ``2 pi``, using the
    alternating periodicity outside the exchanging interval.
    """
    denom = 1 + np.exp(2j * np.pi * z)
    terms = []
    if left:
        zs, w = _vertical(alpha, z, tau, K, h, -1 / denom)
        terms.append(Term(zs, w, ONE))
    if right:
        zs, w = _vertical(beta, z, tau, K, h, 1 / denom)
        terms.append(Term(zs, w, ONE))
    return terms


def _param_region(K: ExprParam, tau: float) -> tuple[float, float]:
    """Interval of ``s`` where ``e^{s tau H}`` is periodic rather than alternating."""
    a, b = h_interval(K)
    if tau > 0:
        return a / tau, b / tau
    return b / tau, a / tau


def _check_half_integer(z: complex, sign_set):
    for k in range(0, 200):
        for sg in sign_set:
            if abs(z - sg * (k + 0.5)) < 1e-6:
                from .errors import PoleError
                raise PoleError(f"z={z} is a pole")


def star_delta_continued(z: complex, K: ExprParam, h: HbarConfig = HbarConfig(),
                         tau: float = 1.0) -> IntegralElement:
    """Continuation of ``star_delta(z, 0)`` to ``z`` off ``Z + 1/2``."""
    z = complex(z)
    _check_half_integer(z, (1, -1))
    a, b = _param_region(K, tau)
    alpha, beta = min(a, 0.0) - 1.0, max(b, 0.0) + 1.0
    mid = line_family(alpha, beta, z, tau, K, h)
    terms = mid.terms + _tails(z, tau, K, h, alpha, beta, True, True)
    return IntegralElement(terms, K, h).compact()


def inverse_pm(z: complex, sign: str, K: ExprParam, h: HbarConfig = HbarConfig(),
               tau: float = 1.0, continued: bool = False) -> IntegralElement:
    """One-sided inverses of ``z + tau H``.

    ``+``: ``int_-inf^0 e^{s(z + tau H)} ds`` for ``Re z > -|tau|/2``;
    ``-``: ``-int_0^inf e^{s(z + tau H)} ds`` for ``Re z < |tau|/2``.
    With ``continued=True`` the tail is replaced by its meromorphic
    continuation and any ``z`` off the poles is accepted.
    """
    z = complex(z)
    edge = abs(tau) / 2
    if continued and abs(abs(tau) - 1) > 1e-15:
        raise ValueError("continuation is implemented for tau = +-1")
    if not continued:
        if sign == "+" and not z.real > -edge:
            raise OutOfHalfPlane("inverse_+ needs Re z > -1/2")
        if sign == "-" and not z.real < edge:
            raise OutOfHalfPlane("inverse_- needs Re z < 1/2")
        if sign == "+":
            return line_family(None, 0.0, z, tau, K, h)
        return line_family(0.0, None, z, tau, K, h).scale(-1)
    a, b = _param_region(K, tau)
    if sign == "+":
        _check_half_integer(z, (-1,))
        alpha = min(a, 0.0) - 1.0
        mid = line_family(alpha, 0.0, z, tau, K, h)
        terms = mid.terms + _tails(z, tau, K, h, alpha, 0.0, True, False)
        return IntegralElement(terms, K, h).compact()
    _check_half_integer(z, (1,))
    beta = max(b, 0.0) + 1.0
    mid = line_family(0.0, beta, z, tau, K, h)
    terms = mid.terms + _tails(z, tau, K, h, 0.0, beta, False, True)
    return IntegralElement(terms, K, h).compact().scale(-1)


def contour_residue(f: Callable[[complex], IntegralElement], center: complex, radius: float,
                    n_nodes: int = 64, grid: EvalGrid | None = None,
                    poles: Iterable[complex] = (), pole_radius: float = 1e-6) -> EvalGrid:
    """``(1 / 2 pi i) oint f(w) dw`` on a circle, trapezoid rule, values on the grid."""
    grid = grid or default_grid()
    for p in poles:
        if abs(abs(p - center) - radius) < pole_radius:
            raise ContourHitsPole(f"contour passes through pole {p}")
    theta = 2 * np.pi * np.arange(n_nodes) / n_nodes
    acc = None
    for th in theta:
        w = center + radius * np.exp(1j * th)
        try:
            fw = f(w)
        except Exception as exc:  # noqa: BLE001
            if exc.__class__.__name__ == "PoleError":
                raise ContourHitsPole(str(exc)) from exc
            raise
        piece = fw.scale(radius * np.exp(1j * th) / n_nodes)
        acc = piece if acc is None else acc + piece
    return grid.with_values(acc.evaluate(grid))


def delta_poles(n: int = 50) -> list[complex]:
    return [s * (k + 0.5) for k in range(n) for s in (1, -1)]
