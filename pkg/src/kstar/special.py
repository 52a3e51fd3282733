"""Star-beta, star-gamma, star-zeta and relatives.

Every function of ``z +- H`` is produced either as an ``IntegralElement``
(a weighted family of star-exponentials) or as a diagonal series, and
often as both.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .diag import DEFAULT_N, DiagSeries, HybridDiag, diag_arith
from .errors import OutOfRegion, PoleError, WrongClass
from .quadrature import gauss_panels
from .scalar import bernoulli, gamma_c, partitions, primes_upto, rgamma_c, xi_c, zeta_c
from .weyl import ExprParam, HbarConfig
from .words import IntegralElement, inverse_pm, line_family

POLE_RADIUS = 1e-6
GAMMA_UPPER = math.log(45.0)
BERNOULLI_TERMS = 10


@dataclass
class StarFnResult:
    integral: IntegralElement | None = None
    diag: DiagSeries | HybridDiag | None = None
    meta: dict = field(default_factory=dict)


def _tau(sign: str) -> float:
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    return 1.0 if sign == "+" else -1.0


def _check_poles(z: complex, poles, what: str):
    for p in poles:
        if abs(z - p) < POLE_RADIUS:
            raise PoleError(f"{what} has a pole at {p}")


def _neg_half_integers(z: complex, count: int = 400):
    return [-(k + 0.5) for k in range(count)]


def _inverse_plus(z: complex, tau: float, K, h) -> IntegralElement:
    """``int_-inf^0 e^{s(z + tau H)} ds``, continued when ``Re z <= -1/2``."""
    z = complex(z)
    if z.real > -0.25:
        return inverse_pm(z, "+", K, h, tau)
    return inverse_pm(z, "+", K, h, tau, continued=True)


# ---------------------------------------------------------------------------
# beta


def _graded_right(lo: float, hi: float, levels: int = 40):
    """Gauss nodes on ``[lo, hi]`` refined geometrically towards ``hi``."""
    nodes, weights = [], []
    edges = [lo]
    L = hi - lo
    for k in range(1, levels + 1):
        edges.append(hi - L * 2.0 ** -k)
    edges.append(hi)
    for a, b in zip(edges[:-1], edges[1:]):
        s, w = gauss_panels(a, b, width=b - a + 1e-300)
        nodes.append(s)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def star_beta(alpha: complex, sign: str, y: complex, K: ExprParam, h: HbarConfig = HbarConfig(),
              tau: float = 1.0) -> IntegralElement:
    """``int_-inf^0 e^{s(alpha +- tau H)} (1 - e^s)^{y - 1} ds``."""
    alpha, y = complex(alpha), complex(y)
    if not alpha.real > -abs(tau) / 2 or not y.real > 0:
        raise OutOfRegion("star_beta needs Re alpha > -|tau|/2 and Re y > 0")
    t = _tau(sign) * tau
    p = y - 1

    def dens(s):
        return np.exp(p * np.log1p(-np.exp(s)))

    smooth = abs(p.imag) < 1e-15 and p.real >= 0 and abs(p.real - round(p.real)) < 1e-15
    if smooth:
        return line_family(None, 0.0, alpha, t, K, h, density=dens)
    far = line_family(None, -1.0, alpha, t, K, h, density=dens)
    s, w = _graded_right(-1.0, 0.0)
    near = IntegralElement.family(t * s, w * np.exp(s * alpha) * dens(s), K, h)
    return (far + near).compact()


def beta_product(alpha: complex, sign: str, n: int, K: ExprParam, h: HbarConfig = HbarConfig()) -> IntegralElement:
    """``n! prod_{k<=n} (k + alpha +- H)^{-1}`` by partial fractions of the resolvent."""
    t = _tau(sign)
    total = IntegralElement.zero(K, h)
    for k in range(n + 1):
        coef = math.comb(n, k) * (-1) ** k
        total = total + _inverse_plus(alpha + k, t, K, h).scale(coef)
    return total.compact()


# ---------------------------------------------------------------------------
# gamma


def _gamma_coeff_kind(sign: str, basis: str) -> int:
    """``+1`` for coefficients ``Gamma(z + n + 1/2)``, ``-1`` for ``Gamma(z - n - 1/2)``."""
    plus = (sign == "+") == (basis == "Emat")
    return 1 if plus else -1


def gamma_diag(z: complex, sign: str, basis: str = "Emat", N: int = DEFAULT_N) -> DiagSeries:
    """Diagonal form of ``Gamma_*(z +- H)`` in the E or Ebar basis."""
    if basis not in ("Emat", "EbarMat"):
        raise ValueError("gamma diagonal forms use Emat or EbarMat")
    kind = _gamma_coeff_kind(sign, basis)
    return DiagSeries.from_function(basis, N, lambda n: gamma_c(z + kind * (n + 0.5)))


def star_gamma(z: complex, sign: str, K: ExprParam, h: HbarConfig = HbarConfig(),
               basis: str | None = None, N: int = DEFAULT_N) -> StarFnResult:
    """``Gamma_*(z +- H) = int e^{-e^s} e^{s(z +- H)} ds``."""
    z = complex(z)
    t = _tau(sign)
    _check_poles(z, _neg_half_integers(z), "star-gamma")
    if z.real > -0.5:
        integral = line_family(None, GAMMA_UPPER, z, t, K, h, density=lambda s: np.exp(-np.exp(s)))
        meta = {"method": "integral"}
    else:
        n = int(math.floor(-z.real)) + 1
        integral = star_gamma_continued(z, sign, n, K, h)
        meta = {"method": "continued", "n": n}
    basis = basis or ("Emat" if sign == "+" else "EbarMat")
    try:
        diag = gamma_diag(z, sign, basis, N)
    except PoleError:
        diag = None
        meta["diag"] = "pole in a component"
    meta["basis"] = basis
    return StarFnResult(integral, diag, meta)


def _exp_remainder(s: np.ndarray, n: int) -> np.ndarray:
    """``e^{-x} - sum_{k<=n} (-x)^k / k!`` at ``x = e^s``, ``s <= 0``, as a tail series."""
    x = np.exp(s)
    total = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, n + 40):
        term = term * (-x) / k
        if k > n:
            total = total + term
    return total


def star_gamma_continued(z: complex, sign: str, n: int, K: ExprParam,
                         h: HbarConfig = HbarConfig()) -> IntegralElement:
    """Continuation of ``Gamma_*(z +- H)`` into ``Re(z + n) > 0``.

    ``int_0^inf`` is entire; on ``(-inf, 0]`` the factor ``e^{-e^s}`` is split
    into its Taylor polynomial of degree ``n``, which integrates to
    one-sided inverses, and a remainder of order ``e^{(n+1)s}``.
    """
    z = complex(z)
    t = _tau(sign)
    if not (z + n).real > 0:
        raise OutOfRegion("star_gamma_continued needs Re(z + n) > 0")
    _check_poles(z, _neg_half_integers(z), "star-gamma")
    total = line_family(0.0, GAMMA_UPPER, z, t, K, h, density=lambda s: np.exp(-np.exp(s)))
    for k in range(n + 1):
        total = total + _inverse_plus(z + k, t, K, h).scale((-1) ** k / math.factorial(k))
    rem = line_family(None, 0.0, z, t, K, h, density=lambda s: _exp_remainder(s, n),
                      extra_rate=float(n + 1))
    return (total + rem).compact()


def gamma_residue_combination(m: int) -> dict[int, float]:
    """Coefficients of ``E_{k,k}`` in the residue at ``z = -(m + 1/2)``: ``(-1)^{m-k} / (m-k)!``."""
    return {k: (-1) ** (m - k) / math.factorial(m - k) for k in range(m + 1)}


def star_gamma_inverse_diag(z: complex, sign: str, basis: str | None = None,
                            N: int = DEFAULT_N) -> DiagSeries:
    """``Gamma(z + 1/2)^{-1} (z + 1/2)_n^{-1} = 1 / Gamma(z + n + 1/2)`` per component."""
    expected = "Emat" if sign == "+" else "EbarMat"
    basis = basis or expected
    if basis != expected:
        raise WrongClass(f"the inverse of Gamma_*(z {sign} H) lives on {expected}")
    return DiagSeries.from_function(basis, N, lambda n: rgamma_c(z + n + 0.5))


def gamma_hybrid(z: complex, N: int = DEFAULT_N) -> tuple[HybridDiag, HybridDiag]:
    """``Gamma_*(z + H)`` over E paired with ``Gamma_*(z - H)`` over Ebar, and its inverse."""
    g = HybridDiag(gamma_diag(z, "+", "Emat", N), gamma_diag(z, "-", "EbarMat", N))
    ginv = HybridDiag(star_gamma_inverse_diag(z, "+", N=N), star_gamma_inverse_diag(z, "-", N=N))
    return g, ginv


def star_gamma_product(z: complex, sign: str, n: int, K: ExprParam,
                       h: HbarConfig = HbarConfig()) -> IntegralElement:
    """``int_-inf^{log n} e^{s(z +- H)} (1 - e^s / n)^n ds``."""
    z = complex(z)
    if not z.real > -0.5:
        raise OutOfRegion("star_gamma_product needs Re z > -1/2")
    if n < 1:
        raise OutOfRegion("n must be positive")
    t = _tau(sign)
    top = math.log(n)
    return line_family(None, top, z, t, K, h,
                       density=lambda s: np.exp(n * np.log1p(-np.minimum(np.exp(s - top), 1.0))))


def euler_gamma_gap(n: int) -> float:
    """``log n - H_n + gamma``, which tends to 0."""
    return math.log(n) - sum(1.0 / k for k in range(1, n + 1)) + 0.5772156649015329


# ---------------------------------------------------------------------------
# zeta


def _zeta_family(ns: np.ndarray, weights: np.ndarray, z: complex, sign: str, K, h) -> IntegralElement:
    t = _tau(sign)
    logs = np.log(ns.astype(float))
    return IntegralElement.family(-t * logs, weights * np.exp(-z * logs), K, h)


def zeta_diag(z: complex, N: int = DEFAULT_N, basis: str = "Emat") -> DiagSeries:
    """``zeta(z + k + 1/2)`` per component."""
    _check_poles(complex(z), [0.5], "star-zeta")
    return DiagSeries.from_function(basis, N, lambda k: zeta_c(z + k + 0.5))


def star_zeta(z: complex, sign: str, N: int, K: ExprParam, h: HbarConfig = HbarConfig(),
              Ndiag: int = DEFAULT_N) -> StarFnResult:
    """Dirichlet partial sum ``sum_{n<=N} e^{-log n (z +- H)}`` and the diagonal form."""
    z = complex(z)
    basis = "Emat" if sign == "+" else "EbarMat"
    diag = zeta_diag(z, Ndiag, basis)
    if not z.real > 0.5:
        raise OutOfRegion("the Dirichlet series needs Re z > 1/2")
    ns = np.arange(1, N + 1)
    integral = _zeta_family(ns, np.ones(N, dtype=complex), z, sign, K, h)
    return StarFnResult(integral, diag, {"N": N, "basis": basis})


def star_zeta_inverse_diag(z: complex, N: int = DEFAULT_N, basis: str = "Emat") -> DiagSeries:
    return diag_arith("invert", zeta_diag(z, N, basis))


def euler_terms(P: int, Kmax: int, nmax: float) -> list[int]:
    """Integers ``prod p^{k_p}`` with ``p <= P``, ``k_p <= Kmax`` and value ``<= nmax``."""
    primes = primes_upto(P)
    out: list[int] = []

    def walk(i: int, value: int):
        if i == len(primes):
            out.append(value)
            return
        p = primes[i]
        v = value
        for _k in range(Kmax + 1):
            if v > nmax:
                break
            walk(i + 1, v)
            v *= p

    walk(0, 1)
    return sorted(out)


def star_zeta_euler(z: complex, sign: str, P: int, Kmax: int, K: ExprParam,
                    h: HbarConfig = HbarConfig(), tol: float = 1e-13) -> IntegralElement:
    """Truncated Euler product, expanded through the exponential law.

    Products ``prod_p e^{-k_p log p (z +- H)}`` collapse to ``e^{-log n (z +- H)}``;
    terms whose weight bound ``n^{-Re z - 1/2}`` falls below ``tol`` are dropped.
    """
    z = complex(z)
    if not z.real > 0.5:
        raise OutOfRegion("the Euler product needs Re z > 1/2")
    nmax = tol ** (-1.0 / (z.real + 0.5))
    ns = np.array(euler_terms(P, Kmax, nmax))
    return _zeta_family(ns, np.ones(ns.size, dtype=complex), z, sign, K, h)


def euler_scalar(s: complex, P: int) -> complex:
    out = 1.0 + 0j
    for p in primes_upto(P):
        out /= 1 - p ** (-s)
    return out


# ---------------------------------------------------------------------------
# L = Gamma zeta


def _bose(s: np.ndarray) -> np.ndarray:
    return 1.0 / np.expm1(np.exp(s))


def _bernoulli_remainder(s: np.ndarray, M: int) -> np.ndarray:
    """``1/(e^x - 1) - 1/x + 1/2 - sum_{n<=M} B_2n x^{2n-1}/(2n)!`` at ``x = e^s``."""
    x = np.exp(s)
    total = np.zeros_like(x)
    for n in range(M + 1, 31):
        total = total + bernoulli(2 * n) / math.factorial(2 * n) * x ** (2 * n - 1)
    return total


def bose_split_decay(t: float, M: int = 1) -> float:
    """Size of the pieces left after the Bernoulli split at ``t``.

    For ``t >= 0`` this is ``1/(e^{e^t} - 1)`` itself, for ``t < 0`` the
    remainder after ``M`` Bernoulli terms.
    """
    if t >= 0:
        return float(_bose(np.array([t]))[0])
    x = math.exp(t)
    head = 1 / x - 0.5 + sum(bernoulli(2 * n) / math.factorial(2 * n) * x ** (2 * n - 1)
                             for n in range(1, M + 1))
    return float(abs(1 / math.expm1(x) - head))


def L_diag(z: complex, N: int = DEFAULT_N, basis: str = "Emat") -> DiagSeries:
    return DiagSeries.from_function(basis, N, lambda k: gamma_c(z + k + 0.5) * zeta_c(z + k + 0.5))


def _L_poles(z: complex):
    return [0.5] + _neg_half_integers(z)


def L_star(z: complex, sign: str, K: ExprParam, h: HbarConfig = HbarConfig(),
           method: str | None = None, N: int = DEFAULT_N, M: int = BERNOULLI_TERMS) -> StarFnResult:
    """``int 1/(e^{e^s} - 1) e^{s(z +- H)} ds``; Bernoulli continuation off ``Re z > 1/2``."""
    z = complex(z)
    t = _tau(sign)
    _check_poles(z, _L_poles(z), "L_*")
    method = method or ("integral" if z.real > 0.5 else "bernoulli")
    if method == "integral":
        if not z.real > 0.5:
            raise OutOfRegion("direct quadrature needs Re z > 1/2")
        integral = line_family(None, GAMMA_UPPER, z, t, K, h, density=_bose, extra_rate=-1.0)
    elif method == "bernoulli":
        integral = line_family(0.0, GAMMA_UPPER, z, t, K, h, density=_bose)
        integral = integral + _inverse_plus(z - 1, t, K, h) - _inverse_plus(z, t, K, h).scale(0.5)
        for n in range(1, M + 1):
            c = bernoulli(2 * n) / math.factorial(2 * n)
            integral = integral + _inverse_plus(z + 2 * n - 1, t, K, h).scale(c)
        integral = integral + line_family(None, 0.0, z, t, K, h,
                                          density=lambda s: _bernoulli_remainder(s, M),
                                          extra_rate=float(2 * M + 1))
        integral = integral.compact()
    else:
        raise ValueError(method)
    basis = "Emat" if sign == "+" else "EbarMat"
    try:
        diag = L_diag(z, N, basis)
    except PoleError:
        diag = None
    return StarFnResult(integral, diag, {"method": method, "basis": basis})


# ---------------------------------------------------------------------------
# partitions


def partition_gen(z: complex, sign: str, Nmax: int, K: ExprParam, h: HbarConfig = HbarConfig()) -> IntegralElement:
    """``1 + sum_{n<=Nmax} p(n) e^{-n(z +- H)}``."""
    z = complex(z)
    if not z.real > 0:
        raise OutOfRegion("the partition series needs Re z > 0")
    n = np.arange(0, Nmax + 1)
    weights = np.array([float(partitions(int(k))) for k in n]) * np.exp(-n * z)
    return IntegralElement.family(-_tau(sign) * n, weights, K, h)


def partition_product_coeffs(L: int, degree: int) -> list[int]:
    """Coefficients of ``prod_{l<=L} sum_k q^{kl}`` up to ``q^degree``."""
    coeffs = [1] + [0] * degree
    for ell in range(1, L + 1):
        new = coeffs[:]
        for d in range(ell, degree + 1):
            new[d] += new[d - ell]
        coeffs = new
    return coeffs


def partition_product(z: complex, sign: str, L: int, K: ExprParam, h: HbarConfig = HbarConfig(),
                      degree: int | None = None) -> IntegralElement:
    """``prod_{l<=L} sum_k e^{-kl(z +- H)}`` collapsed by the exponential law."""
    z = complex(z)
    if not z.real > 0:
        raise OutOfRegion("the partition product needs Re z > 0")
    degree = degree if degree is not None else 3 * L
    c = partition_product_coeffs(L, degree)
    n = np.arange(0, degree + 1)
    return IntegralElement.family(-_tau(sign) * n, np.array(c, dtype=float) * np.exp(-n * z), K, h)


# ---------------------------------------------------------------------------
# theta integral and the reflection


THETA_UPPER = math.log(45.0 / math.pi)


def theta_tail(x: np.ndarray) -> np.ndarray:
    """``sum_{n>=1} exp(-n^2 pi e^x) = (theta3(pi e^x) - 1) / 2``."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    n = np.arange(1, 12)[:, None]
    xp = x[pos][None, :]
    out[pos] = np.sum(np.exp(-n * n * np.pi * np.exp(xp)), axis=0)
    xn = x[~pos][None, :]
    inner = 1 + 2 * np.sum(np.exp(-n * n * np.pi * np.exp(-xn)), axis=0)
    out[~pos] = 0.5 * (np.exp(-0.5 * x[~pos]) * inner - 1)
    return out


def _phi_entire(s: complex, t: float, K, h) -> IntegralElement:
    a = line_family(0.0, THETA_UPPER, s / 2, t / 2, K, h, density=theta_tail)
    b = line_family(0.0, THETA_UPPER, (1 - s) / 2, -t / 2, K, h, density=theta_tail)
    return a + b


def phi_star(s: complex, sign: str, K: ExprParam, h: HbarConfig = HbarConfig(),
             method: str | None = None) -> IntegralElement:
    """``int sum_n e^{-n^2 pi e^x} e^{(x/2)(s +- H)} dx``.

    The direct quadrature converges for ``Re s > 1/2``.  ``method='split'``
    uses the entire part minus ``(1 - (s +- H))^{-1}`` and ``(s +- H)^{-1}``.
    """
    s = complex(s)
    t = _tau(sign)
    method = method or ("integral" if s.real > 0.5 else "split")
    if method == "integral":
        if not s.real > 0.5:
            raise OutOfRegion("direct quadrature needs Re s > 1/2")
        return line_family(None, THETA_UPPER, s / 2, t / 2, K, h, density=theta_tail, extra_rate=-0.5)
    _check_poles(s, [0.5] + _neg_half_integers(s) + [1.5 + k for k in range(400)], "Phi_*")
    out = _phi_entire(s, t, K, h) + _inverse_plus(s - 1, t, K, h) - _inverse_plus(s, t, K, h)
    return out.compact()


def reflection_residual(s: complex, k: int) -> float:
    """``|xi(sigma) - xi(1 - sigma)|`` at ``sigma = s + k + 1/2``."""
    sigma = complex(s) + k + 0.5
    _check_poles(sigma, [0.0, 1.0], "xi")
    return abs(xi_c(sigma) - xi_c(1 - sigma))


def FG_hybrid(s: complex, N: int = 10, pairing: str = "plus") -> tuple[HybridDiag, HybridDiag]:
    """``F_*`` and ``G_*`` as hybrids with components ``xi(sigma_k)`` and ``1/xi(sigma_k)``.

    ``pairing='plus'`` uses ``sigma_k = s + k + 1/2``; ``'minus'`` uses
    ``sigma_k = s - k - 1/2``, the components of the same element written
    through ``1 - (s' +- H)`` with ``s' = 1 - s``.
    """
    sg = 1 if pairing == "plus" else -1

    def comp(k):
        sigma = complex(s) + sg * (k + 0.5)
        _check_poles(sigma, [0.0, 1.0], "xi")
        return xi_c(sigma)

    f = DiagSeries.from_function("Emat", N, comp)
    fb = DiagSeries.from_function("EbarMat", N, comp)
    F = HybridDiag(f, fb)
    return F, F.invert()
