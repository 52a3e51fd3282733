"""Diagonal-matrix expressions over the E, Ebar and D bases.

A series ``sum_n c_n X_{n,n}`` is stored as its coefficient table.  Algebra is
componentwise.  ``diag_embed`` turns a truncated series back into values of
a K-expression on a grid.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import WrongClass, ZeroComponent
from .quadrature import periodic_trapezoid
from .starexp import classify, exp_H_family
from .weyl import ExprParam, HbarConfig
from .words import EvalGrid, IntegralElement, contour_position, default_grid, h_interval

BASES = ("Emat", "EbarMat", "Dmat")
DEFAULT_N = 40
# class in which the full series of each basis converges
_CONVERGENT_CLASS = {"Emat": "Kplus", "EbarMat": "Kminus", "Dmat": "Kzero"}


@dataclass(frozen=True)
class DiagSeries:
    basis: str
    N: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.basis not in BASES:
            raise ValueError(f"unknown basis {self.basis!r}")
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (len(self._index_range(self.basis, self.N)),):
            raise ValueError("coefficient table does not match N")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite up to N")
        object.__setattr__(self, "coeffs", c)

    @staticmethod
    def _index_range(basis: str, N: int) -> np.ndarray:
        if basis == "Dmat":
            return np.arange(-N, N + 1)
        return np.arange(0, N + 1)

    @property
    def indices(self) -> np.ndarray:
        return self._index_range(self.basis, self.N)

    @classmethod
    def from_function(cls, basis: str, N: int, fn) -> "DiagSeries":
        idx = cls._index_range(basis, N)
        return cls(basis, N, np.array([complex(fn(int(n))) for n in idx]))

    @classmethod
    def ones(cls, basis: str, N: int = DEFAULT_N) -> "DiagSeries":
        return cls(basis, N, np.ones(len(cls._index_range(basis, N)), dtype=complex))

    def coeff(self, n: int) -> complex:
        lo = -self.N if self.basis == "Dmat" else 0
        if not lo <= n <= self.N:
            raise IndexError(n)
        return complex(self.coeffs[n - lo])

    def tail(self) -> float:
        """``|coeff(N)|`` (and ``|coeff(-N)|`` for D), a convergence diagnostic."""
        t = abs(self.coeffs[-1])
        if self.basis == "Dmat":
            t = max(t, abs(self.coeffs[0]))
        return float(t)

    def to_json(self) -> dict:
        return {"basis": self.basis, "N": self.N,
                "coeffs": [[int(n), float(c.real), float(c.imag)] for n, c in zip(self.indices, self.coeffs)]}

    @classmethod
    def from_json(cls, d: dict) -> "DiagSeries":
        N = int(d["N"])
        table = {int(n): complex(re, im) for n, re, im in d["coeffs"]}
        idx = cls._index_range(d["basis"], N)
        return cls(d["basis"], N, np.array([table[int(n)] for n in idx]))

    def close_to(self, other: "DiagSeries", tol: float) -> bool:
        return (self.basis == other.basis and self.N == other.N
                and bool(np.max(np.abs(self.coeffs - other.coeffs), initial=0.0) <= tol))


def diag_exp(basis: str, z: complex, w: complex, N: int = DEFAULT_N) -> DiagSeries:
    """Diagonal form of ``e^{w(z + H)}``."""
    idx = DiagSeries._index_range(basis, N)
    if basis == "Emat":
        mu = z + idx + 0.5
    elif basis == "EbarMat":
        mu = z - idx - 0.5
    else:
        mu = z + idx
    return DiagSeries(basis, N, np.exp(w * mu))


def diag_arith(op: str, a: DiagSeries, b: DiagSeries | None = None, scalar: complex = 1.0) -> DiagSeries:
    if op in ("add", "mul"):
        if b is None:
            raise ValueError(f"{op} needs two operands")
        if a.basis != b.basis or a.N != b.N:
            raise TypeError("operands live over different bases or truncations")
        out = a.coeffs + b.coeffs if op == "add" else a.coeffs * b.coeffs
        return DiagSeries(a.basis, a.N, out)
    if op == "scale":
        return DiagSeries(a.basis, a.N, scalar * a.coeffs)
    if op == "invert":
        zero = np.flatnonzero(a.coeffs == 0)
        if zero.size:
            raise ZeroComponent(f"component {int(a.indices[zero[0]])} vanishes")
        return DiagSeries(a.basis, a.N, 1 / a.coeffs)
    raise ValueError(f"unknown op {op!r}")


@dataclass(frozen=True)
class HybridDiag:
    """``sum c_n E_{n,n} + sum cbar_n Ebar_{n,n}``; cross products vanish."""

    epart: DiagSeries
    ebarpart: DiagSeries

    def __post_init__(self):
        if self.epart.basis != "Emat" or self.ebarpart.basis != "EbarMat":
            raise TypeError("a hybrid pairs an Emat series with an EbarMat series")

    def add(self, other: "HybridDiag") -> "HybridDiag":
        return HybridDiag(diag_arith("add", self.epart, other.epart),
                          diag_arith("add", self.ebarpart, other.ebarpart))

    def mul(self, other: "HybridDiag") -> "HybridDiag":
        return HybridDiag(diag_arith("mul", self.epart, other.epart),
                          diag_arith("mul", self.ebarpart, other.ebarpart))

    def invert(self) -> "HybridDiag":
        return HybridDiag(diag_arith("invert", self.epart), diag_arith("invert", self.ebarpart))

    def to_json(self) -> dict:
        return {"epart": self.epart.to_json(), "ebarpart": self.ebarpart.to_json()}

    @classmethod
    def from_json(cls, d: dict) -> "HybridDiag":
        return cls(DiagSeries.from_json(d["epart"]), DiagSeries.from_json(d["ebarpart"]))


# ---------------------------------------------------------------------------
# embedding


_VACUUM_PROBE = 60.0


def vacuum_gaussian(kind: str, K: ExprParam, h: HbarConfig = HbarConfig()):
    """Closed Gaussian of the vacuum (``vac``) or bar-vacuum (``barvac``).

    Read off as the limit of ``e^{-+zeta/2} e^{zeta H}`` for ``zeta -> -+inf``
    along the real axis, where the closed form is already converged.
    Returns ``(amp, quu, quv, qvv)``.
    """
    zeta = -_VACUUM_PROBE if kind == "vac" else _VACUUM_PROBE
    fam, _ = exp_H_family([zeta], K, h)
    amp = complex(fam.amp[0]) * np.exp(-0.5 * zeta if kind == "vac" else 0.5 * zeta)
    return amp, complex(fam.quu[0]), complex(fam.quv[0]), complex(fam.qvv[0])


class _DenseGauss:
    """``amp * P(u, v) * exp(Q / i hbar)`` with a dense coefficient array."""

    def __init__(self, amp, quu, quv, qvv, size):
        self.amp, self.quu, self.quv, self.qvv = amp, quu, quv, qvv
        self.P = np.zeros((size, size), dtype=complex)
        self.P[0, 0] = 1.0

    def _derivs(self, ih):
        P = self.P
        du = np.zeros_like(P)
        dv = np.zeros_like(P)
        n = P.shape[0]
        ar = np.arange(1, n)
        du[:-1, :] += ar[:, None] * P[1:, :]
        dv[:, :-1] += ar[None, :] * P[:, 1:]
        du[1:, :] += 2 * self.quu / ih * P[:-1, :]
        du[:, 1:] += 2 * self.quv / ih * P[:, :-1]
        dv[1:, :] += 2 * self.quv / ih * P[:-1, :]
        dv[:, 1:] += 2 * self.qvv / ih * P[:, :-1]
        return du, dv

    def mul_gen(self, which, side, K, h):
        lam = K.lam
        k = 0 if which == "u" else 1
        row = lam[k, :] if side == "left" else lam[:, k]
        du, dv = self._derivs(h.ih)
        out = np.zeros_like(self.P)
        if k == 0:
            out[1:, :] += self.P[:-1, :]
        else:
            out[:, 1:] += self.P[:, :-1]
        out += h.ih / 2 * (row[0] * du + row[1] * dv)
        self.P = out

    def evaluate(self, u, v, h):
        n = self.P.shape[0]
        U = u[:, None] ** np.arange(n)[None, :]
        V = v[:, None] ** np.arange(n)[None, :]
        poly = np.einsum("pi,ij,pj->p", U, self.P, V)
        Q = self.quu * u * u + 2 * self.quv * u * v + self.qvv * v * v
        return self.amp * poly * np.exp(Q / h.ih)


def diagonal_units(basis: str, N: int, K: ExprParam, grid: EvalGrid,
                   h: HbarConfig = HbarConfig()) -> np.ndarray:
    """Grid values of ``E_{n,n}`` or ``Ebar_{n,n}`` for ``0 <= n <= N``; shape ``(N+1, points)``.

    Each unit is ``u^n * vacuum * v^n`` (resp. ``v^n * barvac * u^n``) on the
    closed vacuum Gaussian, built by the recursion
    ``X_{n} = x * X_{n-1} * y / (n i hbar)``.
    """
    kind = "vac" if basis == "Emat" else "barvac"
    amp, quu, quv, qvv = vacuum_gaussian(kind, K, h)
    g = _DenseGauss(amp, quu, quv, qvv, 2 * N + 2)
    left, right = ("u", "v") if basis == "Emat" else ("v", "u")
    # Ebar_{n,n} carries i^{2n} = (-1)^n
    step = 1.0 if basis == "Emat" else -1.0
    out = np.empty((N + 1, grid.points.shape[0]), dtype=complex)
    out[0] = g.evaluate(grid.u, grid.v, h)
    for n in range(1, N + 1):
        g.mul_gen(left, "left", K, h)
        g.mul_gen(right, "right", K, h)
        g.P *= step / (n * h.ih)
        out[n] = g.evaluate(grid.u, grid.v, h)
    return out


def _dmat_element(d: DiagSeries, K: ExprParam, h: HbarConfig, n_nodes: int = 256) -> IntegralElement:
    """``sum_n c_n D_{n,n}`` through the Fourier coefficients on the pseudo-vacuum contour."""
    s = contour_position("pseudovac", K)
    t, w = periodic_trapezoid(0.0, 2 * np.pi, n_nodes)
    z = s + 1j * t
    weights = np.zeros(z.shape, dtype=complex)
    for n, c in zip(d.indices, d.coeffs):
        if c != 0:
            weights += c * np.exp(-z * n)
    return IntegralElement.family(z, w / (2 * np.pi) * weights, K, h)


def diag_embed(d: DiagSeries, K: ExprParam, grid: EvalGrid | None = None,
               h: HbarConfig = HbarConfig(), convergent: bool = False) -> EvalGrid:
    """``sum_{|n| <= N} coeff(n) X_{n,n}`` on the grid.

    ``convergent=True`` asks for an embedding whose ``N -> inf`` limit is
    meaningful and insists on the matching class of ``K``.
    """
    grid = grid or default_grid()
    cls = classify(K)
    if cls.tag == "Degenerate":
        raise WrongClass("degenerate expression parameter")
    if convergent and cls.tag != _CONVERGENT_CLASS[d.basis]:
        raise WrongClass(f"{d.basis} series converge for {_CONVERGENT_CLASS[d.basis]}, K is {cls.tag}")
    if not np.any(d.coeffs):
        return grid.with_values(np.zeros(grid.points.shape[0], dtype=complex))
    if d.basis == "Dmat":
        if cls.tag != "Kzero":
            raise WrongClass("D matrix units need a Kzero parameter")
        return grid.with_values(_dmat_element(d, K, h).evaluate(grid))
    units = diagonal_units(d.basis, d.N, K, grid, h)
    return grid.with_values(d.coeffs @ units)


def hybrid_embed(x: HybridDiag, K: ExprParam, grid: EvalGrid | None = None,
                 h: HbarConfig = HbarConfig()) -> EvalGrid:
    grid = grid or default_grid()
    e = diag_embed(x.epart, K, grid, h)
    eb = diag_embed(x.ebarpart, K, grid, h)
    return grid.with_values(e.values + eb.values)


__all__ = ["BASES", "DEFAULT_N", "DiagSeries", "HybridDiag", "diag_exp", "diag_arith",
           "diag_embed", "hybrid_embed", "diagonal_units", "vacuum_gaussian", "h_interval"]
