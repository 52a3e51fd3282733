"""Polynomial layer of the Weyl algebra in K-ordered expressions.

A polynomial ``f(u, v)`` stands for an algebra element written in the
expression fixed by a complex symmetric matrix ``K``.  The product twisted
by ``Lambda = K + J`` is computed exactly (the bidifferential series
terminates on polynomials), as is the intertwiner between two expressions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Iterable, Mapping

import numpy as np

_ZERO_CUTOFF = 0.0


@dataclass(frozen=True)
class HbarConfig:
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0):
            raise ValueError("hbar must be positive")

    @property
    def ih(self) -> complex:
        return 1j * self.hbar


@dataclass(frozen=True)
class ExprParam:
    """Expression parameter ``K = [[delta, c], [c, delta_prime]]``."""

    delta: complex = 0.0
    c: complex = 0.0
    delta_prime: complex = 0.0

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.delta, self.c], [self.c, self.delta_prime]], dtype=complex)

    @property
    def lam(self) -> np.ndarray:
        """``Lambda = K + J`` with ``J[0,1] = -1`` and ``J[1,0] = 1``."""
        return self.matrix + np.array([[0, -1], [1, 0]], dtype=complex)

    def __repr__(self):
        return f"ExprParam(delta={self.delta!r}, c={self.c!r}, delta_prime={self.delta_prime!r})"


WEYL = ExprParam(0.0, 0.0, 0.0)
# u_*^i * v_*^j is represented by the plain monomial u^i v^j
NORMAL = ExprParam(0.0, 1.0, 0.0)
ANTINORMAL = ExprParam(0.0, -1.0, 0.0)


def _clean(terms: Mapping[tuple[int, int], complex]) -> dict:
    return {k: complex(v) for k, v in terms.items() if v != 0}


@dataclass(frozen=True)
class WeylPoly:
    """Sparse bivariate polynomial; ``terms[(i, j)]`` multiplies ``u^i v^j``."""

    terms: Mapping[tuple[int, int], complex] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "terms", _clean(self.terms))

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, a: complex) -> "WeylPoly":
        return cls({(0, 0): a})

    @classmethod
    def monomial(cls, i: int, j: int, a: complex = 1.0) -> "WeylPoly":
        return cls({(i, j): a})

    @classmethod
    def u(cls) -> "WeylPoly":
        return cls({(1, 0): 1.0})

    @classmethod
    def v(cls) -> "WeylPoly":
        return cls({(0, 1): 1.0})

    @classmethod
    def from_dense(cls, arr: np.ndarray, tol: float = 0.0) -> "WeylPoly":
        out = {}
        for (i, j), a in np.ndenumerate(arr):
            if a != 0 and abs(a) > tol:
                out[(i, j)] = complex(a)
        return cls(out)

    # inspection ---------------------------------------------------------
    @property
    def degree(self) -> int:
        return max((i + j for i, j in self.terms), default=-1)

    def shape(self) -> tuple[int, int]:
        mu = max((i for i, _ in self.terms), default=0)
        mv = max((j for _, j in self.terms), default=0)
        return mu + 1, mv + 1

    def dense(self, shape: tuple[int, int] | None = None) -> np.ndarray:
        shape = shape or self.shape()
        arr = np.zeros(shape, dtype=complex)
        for (i, j), a in self.terms.items():
            arr[i, j] = a
        return arr

    def coeff(self, i: int, j: int) -> complex:
        return self.terms.get((i, j), 0j)

    def sorted_terms(self) -> list[tuple[int, int, complex]]:
        """Graded lexicographic order: total degree, then power of ``u``."""
        keys = sorted(self.terms, key=lambda ij: (ij[0] + ij[1], ij[0]))
        return [(i, j, self.terms[(i, j)]) for i, j in keys]

    def is_zero(self) -> bool:
        return not self.terms

    def max_abs(self) -> float:
        return max((abs(a) for a in self.terms.values()), default=0.0)

    def __call__(self, u, v):
        u = np.asarray(u, dtype=complex)
        v = np.asarray(v, dtype=complex)
        out = np.zeros(np.broadcast(u, v).shape, dtype=complex)
        for (i, j), a in self.terms.items():
            out = out + a * u**i * v**j
        return out

    # commutative arithmetic --------------------------------------------
    def __add__(self, other):
        other = _as_poly(other)
        out = dict(self.terms)
        for k, a in other.terms.items():
            out[k] = out.get(k, 0) + a
        return WeylPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return WeylPoly({k: -a for k, a in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def scale(self, a: complex) -> "WeylPoly":
        return WeylPoly({k: a * b for k, b in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, WeylPoly):
            return self.pointwise(other)
        return self.scale(other)

    __rmul__ = __mul__

    def pointwise(self, other: "WeylPoly") -> "WeylPoly":
        """Ordinary (commutative) product of the two polynomials."""
        out: dict = {}
        for (i, j), a in self.terms.items():
            for (k, l), b in other.terms.items():
                out[(i + k, j + l)] = out.get((i + k, j + l), 0) + a * b
        return WeylPoly(out)

    def diff(self, du: int = 0, dv: int = 0) -> "WeylPoly":
        out = {}
        for (i, j), a in self.terms.items():
            if i >= du and j >= dv:
                f = factorial(i) // factorial(i - du) * (factorial(j) // factorial(j - dv))
                out[(i - du, j - dv)] = a * f
        return WeylPoly(out)

    def close_to(self, other: "WeylPoly", tol: float) -> bool:
        return (self - other).max_abs() <= tol

    # serialization --------------------------------------------------------
    def to_json(self) -> list[dict]:
        return [{"i": i, "j": j, "re": a.real, "im": a.imag} for i, j, a in self.sorted_terms()]

    @classmethod
    def from_json(cls, data: Iterable[Mapping]) -> "WeylPoly":
        out: dict = {}
        for t in data:
            key = (int(t["i"]), int(t["j"]))
            out[key] = out.get(key, 0) + complex(t.get("re", 0.0), t.get("im", 0.0))
        return cls(out)

    def __repr__(self):
        if not self.terms:
            return "WeylPoly(0)"
        parts = [f"({a:.6g})u^{i}v^{j}" for i, j, a in self.sorted_terms()]
        return "WeylPoly(" + " + ".join(parts) + ")"


def _as_poly(x) -> WeylPoly:
    return x if isinstance(x, WeylPoly) else WeylPoly.const(x)


ONE = WeylPoly.const(1.0)


# ---------------------------------------------------------------------------
# dense kernels

def _falling(n: int, k: int) -> np.ndarray:
    """Array ``a[i] = (i + k)! / i!`` for ``i < n``."""
    i = np.arange(n, dtype=float)
    out = np.ones(n)
    for m in range(1, k + 1):
        out *= i + m
    return out


def _apply_pair_exp(T: np.ndarray, coef: complex, ax1: int, ax2: int) -> np.ndarray:
    """Apply ``exp(coef * d/dx_ax1 d/dx_ax2)`` to a dense coefficient tensor.

    For ``ax1 == ax2`` the operator is ``exp(coef * d^2/dx^2)``.
    """
    if coef == 0:
        return T
    out = T.copy()
    n1, n2 = T.shape[ax1], T.shape[ax2]
    nmax = min(n1, n2) - 1 if ax1 != ax2 else (n1 - 1) // 2
    term_coef = 1.0 + 0j
    for n in range(1, nmax + 1):
        term_coef = term_coef * coef / n
        if ax1 == ax2:
            sl = [slice(None)] * T.ndim
            sl[ax1] = slice(2 * n, None)
            part = T[tuple(sl)]
            w = _falling(n1 - 2 * n, 2 * n)
            shape = [1] * T.ndim
            shape[ax1] = n1 - 2 * n
            part = part * w.reshape(shape)
            tgt = [slice(None)] * T.ndim
            tgt[ax1] = slice(0, n1 - 2 * n)
        else:
            sl = [slice(None)] * T.ndim
            sl[ax1] = slice(n, None)
            sl[ax2] = slice(n, None)
            part = T[tuple(sl)]
            s1 = [1] * T.ndim
            s1[ax1] = n1 - n
            s2 = [1] * T.ndim
            s2[ax2] = n2 - n
            part = part * _falling(n1 - n, n).reshape(s1) * _falling(n2 - n, n).reshape(s2)
            tgt = [slice(None)] * T.ndim
            tgt[ax1] = slice(0, n1 - n)
            tgt[ax2] = slice(0, n2 - n)
        out[tuple(tgt)] += term_coef * part
    return out


def star_product(f: WeylPoly, g: WeylPoly, K: ExprParam, h: HbarConfig = HbarConfig()) -> WeylPoly:
    """K-expression of ``f *_K g``.

    The series ``exp((i hbar / 2) Lambda^{ij} d_i (x) d_j)`` is applied to
    ``f(u1, v1) g(u2, v2)`` as four commuting exponentials, after which the
    two copies of the variables are identified.
    """
    if f.is_zero() or g.is_zero():
        return WeylPoly()
    A = f.dense()
    B = g.dense()
    T = A[:, :, None, None] * B[None, None, :, :]
    lam = K.lam
    half = h.ih / 2
    # axes: 0 = u of f, 1 = v of f, 2 = u of g, 3 = v of g
    T = _apply_pair_exp(T, half * lam[0, 0], 0, 2)
    T = _apply_pair_exp(T, half * lam[0, 1], 0, 3)
    T = _apply_pair_exp(T, half * lam[1, 0], 1, 2)
    T = _apply_pair_exp(T, half * lam[1, 1], 1, 3)
    a0, a1, b0, b1 = T.shape
    out = np.zeros((a0 + b0 - 1, a1 + b1 - 1), dtype=complex)
    for i in range(a0):
        for j in range(a1):
            out[i:i + b0, j:j + b1] += T[i, j]
    return WeylPoly.from_dense(out)


def intertwine(f: WeylPoly, K: ExprParam, K2: ExprParam, h: HbarConfig = HbarConfig()) -> WeylPoly:
    """Rewrite the K-expression ``f`` as a K2-expression.

    Applies ``exp((i hbar / 4) sum (K2 - K)_{ij} d_i d_j)``.
    """
    if f.is_zero():
        return f
    d = K2.matrix - K.matrix
    q = h.ih / 4
    F = f.dense()
    F = _apply_pair_exp(F, q * d[0, 0], 0, 0)
    F = _apply_pair_exp(F, 2 * q * d[0, 1], 0, 1)
    F = _apply_pair_exp(F, q * d[1, 1], 1, 1)
    return WeylPoly.from_dense(F)


def symm_uv(K: ExprParam, h: HbarConfig = HbarConfig()) -> WeylPoly:
    """K-expression of ``u o v = (u*v + v*u) / 2``, namely ``uv + (i hbar / 2) c``."""
    return WeylPoly({(1, 1): 1.0, (0, 0): h.ih / 2 * K.c})


def H_poly(K: ExprParam, h: HbarConfig = HbarConfig()) -> WeylPoly:
    """K-expression of ``H = (1 / i hbar) u o v``."""
    return symm_uv(K, h).scale(1 / h.ih)


def star_power(f: WeylPoly, n: int, K: ExprParam, h: HbarConfig = HbarConfig()) -> WeylPoly:
    out = ONE
    for _ in range(n):
        out = star_product(out, f, K, h)
    return out


def gen_power(which: str, n: int, K: ExprParam, h: HbarConfig = HbarConfig()) -> WeylPoly:
    """K-expression of ``u_*^n`` or ``v_*^n``."""
    base = WeylPoly.u() if which == "u" else WeylPoly.v()
    return star_power(base, n, K, h)


def to_ordered(f: WeylPoly, K: ExprParam, h: HbarConfig = HbarConfig()) -> WeylPoly:
    """Coefficients of ``f`` in the ordered monomials ``u_*^i * v_*^j``."""
    return intertwine(f, K, NORMAL, h)


def from_ordered(f: WeylPoly, K: ExprParam, h: HbarConfig = HbarConfig()) -> WeylPoly:
    return intertwine(f, NORMAL, K, h)


def pochhammer(a: complex, n: int) -> complex:
    """Extended rising factorial: ``(a)_n = a(a+1)...(a+n-1)``, ``(a)_{-n} = (a-1)...(a-n)``."""
    out = 1.0 + 0j if isinstance(a, complex) else 1.0
    if n >= 0:
        for k in range(n):
            out *= a + k
    else:
        for k in range(1, -n + 1):
            out *= a - k
    return out
