"""Star-exponentials of ``u o v``: closed form, sheets, singular set, classes.

The canonical parameter is ``t`` in ``exp_*(t (2 / i hbar) u o v)``.  The
amplitude involves a square root whose sheet is fixed by continuity along
a path starting at ``t = 0`` with value 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (DegenerateParameter, PathTooCloseToSingularity, SingularPoint,
                     StepSizeTooLarge)
from .weyl import ExprParam, HbarConfig, WeylPoly

SINGULAR_MARGIN = 1e-3
SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class QuadForm:
    """``Q(u, v) = quu u^2 + 2 quv uv + qvv v^2``."""

    quu: complex = 0j
    quv: complex = 0j
    qvv: complex = 0j

    def __call__(self, u, v):
        return self.quu * u * u + 2 * self.quv * u * v + self.qvv * v * v

    def as_tuple(self):
        return (complex(self.quu), complex(self.quv), complex(self.qvv))


@dataclass(frozen=True)
class GaussPoly:
    """``poly(u, v) * amp * exp(Q(u, v) / (i hbar))``.

    ``sign`` records the sheet relative to the continuation along the
    reference path ``0 -> Re t -> t``; it is bookkeeping only and is
    already included in ``amp``.
    """

    amp: complex
    quad: QuadForm = field(default_factory=QuadForm)
    poly: WeylPoly = field(default_factory=lambda: WeylPoly.const(1.0))
    sign: int = 1

    def __call__(self, u, v, h: HbarConfig = HbarConfig()):
        u = np.asarray(u, dtype=complex)
        v = np.asarray(v, dtype=complex)
        return self.poly(u, v) * self.amp * np.exp(self.quad(u, v) / h.ih)

    def to_json(self) -> dict:
        q = self.quad
        return {
            "amp": [self.amp.real, self.amp.imag],
            "Q": {"uu": [complex(q.quu).real, complex(q.quu).imag],
                  "uv": [complex(q.quv).real, complex(q.quv).imag],
                  "vv": [complex(q.qvv).real, complex(q.qvv).imag]},
            "poly": self.poly.to_json(),
            "sign": int(self.sign),
        }

    @classmethod
    def from_json(cls, d: dict) -> "GaussPoly":
        def cx(x):
            return complex(x[0], x[1]) if isinstance(x, (list, tuple)) else complex(x)
        q = d["Q"]
        return cls(cx(d["amp"]), QuadForm(cx(q["uu"]), cx(q["uv"]), cx(q["vv"])),
                   WeylPoly.from_json(d.get("poly", [{"i": 0, "j": 0, "re": 1.0, "im": 0.0}])),
                   int(d.get("sign", 1)))

    def close_to(self, other: "GaussPoly", tol: float) -> bool:
        a = np.array(self.quad.as_tuple() + (self.amp,))
        b = np.array(other.quad.as_tuple() + (other.amp,))
        return bool(np.max(np.abs(a - b)) <= tol and self.poly.close_to(other.poly, tol))


# ---------------------------------------------------------------------------
# vectorised Gaussian family used by every quadrature

class GaussFamily:
    """A batch of Gaussians sharing nothing but their length.

    ``poly`` maps ``(i, j)`` to an array of coefficients, one per member.
    """

    def __init__(self, amp, quu, quv, qvv, poly=None):
        self.amp = np.asarray(amp, dtype=complex)
        n = self.amp.shape
        self.quu = np.broadcast_to(np.asarray(quu, dtype=complex), n)
        self.quv = np.broadcast_to(np.asarray(quv, dtype=complex), n)
        self.qvv = np.broadcast_to(np.asarray(qvv, dtype=complex), n)
        self.poly = poly if poly is not None else {(0, 0): np.ones(n, dtype=complex)}

    def __len__(self):
        return self.amp.shape[0]

    def member(self, k: int, sign: int = 1) -> GaussPoly:
        P = WeylPoly({ij: c[k] for ij, c in self.poly.items()})
        return GaussPoly(complex(self.amp[k]),
                         QuadForm(complex(self.quu[k]), complex(self.quv[k]), complex(self.qvv[k])),
                         P, sign)

    @classmethod
    def from_gauss(cls, g: GaussPoly) -> "GaussFamily":
        poly = {ij: np.array([a]) for ij, a in g.poly.terms.items()}
        return cls([g.amp], [g.quad.quu], [g.quad.quv], [g.quad.qvv], poly)

    def _with_poly(self, poly):
        return GaussFamily(self.amp, self.quu, self.quv, self.qvv, poly)

    def _derivs(self, h: HbarConfig):
        """Polynomial parts of d/du and d/dv of the family."""
        du: dict = {}
        dv: dict = {}
        ih = h.ih
        for (i, j), c in self.poly.items():
            if i:
                _acc(du, (i - 1, j), i * c)
            if j:
                _acc(dv, (i, j - 1), j * c)
            # derivative of the exponent: dQ/du = 2 quu u + 2 quv v
            _acc(du, (i + 1, j), 2 * self.quu * c / ih)
            _acc(du, (i, j + 1), 2 * self.quv * c / ih)
            _acc(dv, (i + 1, j), 2 * self.quv * c / ih)
            _acc(dv, (i, j + 1), 2 * self.qvv * c / ih)
        return du, dv

    def mul_gen(self, which: str, side: str, K: ExprParam, h: HbarConfig) -> "GaussFamily":
        """Star multiply by ``u`` or ``v`` on the left or on the right.

        Exact first-order rule ``x_k * g = x_k g + (i hbar / 2) Lambda^{kj} d_j g``
        and its mirror ``g * x_k = g x_k + (i hbar / 2) Lambda^{jk} d_j g``.
        """
        lam = K.lam
        k = 0 if which == "u" else 1
        row = lam[k, :] if side == "left" else lam[:, k]
        du, dv = self._derivs(h)
        half = h.ih / 2
        out: dict = {}
        shift = (1, 0) if k == 0 else (0, 1)
        for (i, j), c in self.poly.items():
            _acc(out, (i + shift[0], j + shift[1]), c)
        if row[0] != 0:
            for ij, c in du.items():
                _acc(out, ij, half * row[0] * c)
        if row[1] != 0:
            for ij, c in dv.items():
                _acc(out, ij, half * row[1] * c)
        return self._with_poly(out)

    def mul_ordered(self, P: WeylPoly, side: str, K: ExprParam, h: HbarConfig) -> "GaussFamily":
        """Star multiply by the element ``sum P_ij u_*^i * v_*^j``.

        ``P`` holds ordered coefficients (see ``weyl.to_ordered``).
        """
        if P.is_zero():
            return self._with_poly({(0, 0): np.zeros(len(self), dtype=complex)})
        total: dict = {}
        if side == "right":
            # g * u^i * v^j: multiply by u i times, then by v j times
            by_i: dict = {}
            for (i, j), a in P.terms.items():
                by_i.setdefault(i, []).append((j, a))
            cur = self
            for i in range(max(by_i) + 1):
                if i:
                    cur = cur.mul_gen("u", "right", K, h)
                if i not in by_i:
                    continue
                js = dict(by_i[i])
                inner = cur
                for j in range(max(js) + 1):
                    if j:
                        inner = inner.mul_gen("v", "right", K, h)
                    if j in js:
                        for ij, c in inner.poly.items():
                            _acc(total, ij, js[j] * c)
        else:
            # u^i * v^j * g: multiply by v j times, then by u i times
            by_j: dict = {}
            for (i, j), a in P.terms.items():
                by_j.setdefault(j, []).append((i, a))
            cur = self
            for j in range(max(by_j) + 1):
                if j:
                    cur = cur.mul_gen("v", "left", K, h)
                if j not in by_j:
                    continue
                is_ = dict(by_j[j])
                inner = cur
                for i in range(max(is_) + 1):
                    if i:
                        inner = inner.mul_gen("u", "left", K, h)
                    if i in is_:
                        for ij, c in inner.poly.items():
                            _acc(total, ij, is_[i] * c)
        return self._with_poly(total)

    def evaluate(self, u, v, h: HbarConfig) -> np.ndarray:
        """Values of every member at the points; shape ``(members, points)``."""
        u = np.asarray(u, dtype=complex)[None, :]
        v = np.asarray(v, dtype=complex)[None, :]
        Q = self.quu[:, None] * u * u + 2 * self.quv[:, None] * u * v + self.qvv[:, None] * v * v
        P = np.zeros((len(self), u.shape[1]), dtype=complex)
        for (i, j), c in self.poly.items():
            P += c[:, None] * (u**i * v**j)
        return P * self.amp[:, None] * np.exp(Q / h.ih)


def _acc(d: dict, key, val):
    if key in d:
        d[key] = d[key] + val
    else:
        d[key] = val


# ---------------------------------------------------------------------------
# closed form

def _closed_parts(t, K: ExprParam):
    """Scaled pieces of the closed form.

    Returns ``(logD_real, argD_wrapped, Dhat, quu, quv, qvv)`` with
    ``D = exp(2 sigma t) Dhat`` and ``sigma = sign(Re t)``; no overflow for
    large ``|Re t|``.
    """
    t = np.asarray(t, dtype=complex)
    sigma = np.where(t.real >= 0, 1.0, -1.0)
    x = np.exp(-2 * sigma * t)
    c = K.c
    dd = K.delta * K.delta_prime
    A = (1 - sigma * c) + (1 + sigma * c) * x
    one_m = 1 - x
    Dhat = A * A - one_m * one_m * dd
    with np.errstate(divide="ignore", invalid="ignore"):
        quu = one_m * one_m * K.delta_prime / Dhat
        qvv = one_m * one_m * K.delta / Dhat
        quv = sigma * one_m * A / Dhat
    logabs = 2 * sigma * t.real + np.log(np.abs(Dhat))
    argw = np.angle(np.exp(1j * (2 * sigma * t.imag + np.angle(Dhat))))
    return logabs, argw, Dhat, quu, quv, qvv


def denominator(t, K: ExprParam):
    """``Delta^2 - (e^t - e^-t)^2 delta delta'`` evaluated directly."""
    t = np.asarray(t, dtype=complex)
    ep, em = np.exp(t), np.exp(-t)
    S = ep - em
    Dl = ep + em - K.c * S
    return Dl * Dl - S * S * K.delta * K.delta_prime


def singular_roots(K: ExprParam) -> list[complex]:
    """Finite nonzero roots ``w = e^{2t}`` of the denominator."""
    r = np.sqrt(complex(K.delta * K.delta_prime))
    out = []
    for s in (1, -1):
        den = (1 - K.c) - s * r
        num = -((1 + K.c) + s * r)
        if abs(den) < 1e-300 or abs(num) < 1e-300:
            continue
        out.append(complex(num / den))
    return out


def singular_points(K: ExprParam, im_lo: float, im_hi: float) -> np.ndarray:
    """Points of the singular set with imaginary part in ``[im_lo, im_hi]``."""
    pts = []
    for w in singular_roots(K):
        base = 0.5 * np.log(w)
        k0 = int(np.floor((im_lo - base.imag) / np.pi)) - 1
        k1 = int(np.ceil((im_hi - base.imag) / np.pi)) + 1
        for k in range(k0, k1 + 1):
            p = base + 1j * np.pi * k
            if im_lo <= p.imag <= im_hi:
                pts.append(p)
    return np.array(pts, dtype=complex)


def _seg_distance(p, a, b):
    """Distance from points ``p`` to segments ``[a, b]`` (broadcast)."""
    d = b - a
    L2 = np.abs(d) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(L2 > 0, ((p - a) * np.conj(d)).real / L2, 0.0)
    s = np.clip(s, 0.0, 1.0)
    return np.abs(p - (a + s * d))


def _track_phase(samples_arg: np.ndarray) -> np.ndarray:
    """Unwrap along the last axis; raise if steps are too coarse."""
    un = np.unwrap(samples_arg, axis=-1)
    return un


def _track_segments(vertices: np.ndarray, K: ExprParam, margin: float, n0: int = 32):
    """Continue ``arg D`` along polylines.

    ``vertices`` has shape ``(members, nv)``; all polylines start at 0.
    Returns the unwrapped argument of ``D`` at the final vertex.
    """
    vertices = np.asarray(vertices, dtype=complex)
    m, nv = vertices.shape
    # distance to the singular set
    lo = float(np.min(vertices.imag)) - 1.0
    hi = float(np.max(vertices.imag)) + 1.0
    sp = singular_points(K, lo, hi)
    if sp.size:
        for k in range(nv - 1):
            a = vertices[:, k][:, None]
            b = vertices[:, k + 1][:, None]
            dist = _seg_distance(sp[None, :], a, b)
            if np.min(dist) < margin:
                raise PathTooCloseToSingularity(
                    f"path passes within {np.min(dist):.3g} of the singular set")
    phase = np.zeros(m)
    for k in range(nv - 1):
        a = vertices[:, k]
        b = vertices[:, k + 1]
        n = n0
        while True:
            s = np.linspace(0.0, 1.0, n + 1)
            pts = a[:, None] + s[None, :] * (b - a)[:, None]
            _, argw, *_ = _closed_parts(pts, K)
            argw = argw - argw[:, :1]
            un = np.unwrap(argw, axis=-1)
            steps = np.abs(np.diff(un, axis=-1))
            if steps.size == 0 or np.max(steps) < np.pi / 4:
                break
            if n > 2**16:
                raise PathTooCloseToSingularity("argument of the radicand varies too fast")
            n *= 4
        phase = phase + un[:, -1]
    return phase


def _family_from_phase(t, phase_total, K: ExprParam, phase_ref=None) -> tuple[GaussFamily, np.ndarray]:
    logabs, argw, Dhat, quu, quv, qvv = _closed_parts(t, K)
    if np.any(np.abs(Dhat) < SINGULAR_TOL):
        raise SingularPoint("denominator vanishes")
    # arg D at t=0 equals arg 4 = 0, so the continued argument is phase_total
    amp = 2 * np.exp(-0.5 * (logabs + 1j * phase_total))
    ref = argw if phase_ref is None else phase_ref
    k = np.rint((phase_total - ref) / (2 * np.pi)).astype(int)
    sign = np.where(k % 2 == 0, 1, -1)
    return GaussFamily(amp, quu, quv, qvv), sign


def _reference_phase(t: complex, K: ExprParam) -> float | None:
    """Continued ``arg D`` along ``0 -> Re t -> t``, else along ``[0, t]``."""
    for path in (default_path(t), [0j, t]):
        verts = np.array([p for i, p in enumerate(path) if i == 0 or p != path[i - 1]], dtype=complex)
        if verts.size < 2:
            return 0.0
        try:
            return float(_track_segments(verts[None, :], K, SINGULAR_MARGIN)[0])
        except PathTooCloseToSingularity:
            continue
    return None


def exp_2H_path(path: Sequence[complex], K: ExprParam, h: HbarConfig = HbarConfig(),
                margin: float = SINGULAR_MARGIN) -> tuple[GaussPoly, int]:
    """Continue ``exp_*(t (2 / i hbar) u o v)`` along a polyline starting at 0.

    The returned sign is ``-1`` when the endpoint value sits on the other
    sheet from the reference continuation ``0 -> Re t -> t``.
    """
    verts = np.asarray(list(path), dtype=complex)
    if verts.size == 0 or abs(verts[0]) > 1e-15:
        raise ValueError("path must start at 0")
    if verts.size == 1:
        return GaussPoly(1.0 + 0j), 1
    keep = [verts[0]]
    for z in verts[1:]:
        if z != keep[-1]:
            keep.append(z)
    verts = np.array(keep)[None, :]
    if verts.shape[1] == 1:
        return GaussPoly(1.0 + 0j), 1
    phase = _track_segments(verts, K, margin)
    ref = _reference_phase(complex(verts[0, -1]), K)
    fam, sign = _family_from_phase(verts[:, -1], phase, K, None if ref is None else np.array([ref]))
    g = fam.member(0, int(sign[0]))
    return g, int(sign[0])


def exp_2H(t: complex, K: ExprParam, h: HbarConfig = HbarConfig()) -> GaussPoly:
    """Closed-form star-exponential at ``t`` continued along the segment ``[0, t]``."""
    t = complex(t)
    if abs(denominator(t, K)) < SINGULAR_TOL * max(1.0, abs(np.exp(2 * abs(t.real)))):
        raise SingularPoint(f"t={t} lies on the singular set")
    if t == 0:
        return GaussPoly(1.0 + 0j)
    g, _ = exp_2H_path([0, t], K, h, margin=0.0)
    return g


def default_path(t: complex) -> list[complex]:
    """``0 -> Re t -> t``: along the real axis, then vertically."""
    return [0j, complex(t.real, 0.0), complex(t)]


def exp_H_family(zetas, K: ExprParam, h: HbarConfig = HbarConfig(),
                 margin: float = SINGULAR_MARGIN) -> tuple[GaussFamily, np.ndarray]:
    """Batch of ``exp_*(zeta H)`` with ``H = (1 / i hbar) u o v``.

    Uses ``t = zeta / 2`` and the path ``0 -> Re t -> t`` for every member.
    """
    t = np.asarray(zetas, dtype=complex).ravel() / 2
    verts = np.stack([np.zeros_like(t), t.real.astype(complex), t], axis=1)
    phase = _track_segments(verts, K, margin)
    # the reference path itself: every member is on the + sheet
    return _family_from_phase(t, phase, K, phase)


# ---------------------------------------------------------------------------
# interval and classes

@dataclass(frozen=True)
class KClass:
    tag: str
    interval: tuple[float, float]


def exchanging_interval(K: ExprParam) -> tuple[float, float]:
    """Real parts ``(a, b)`` of the two lines carrying the singular set.

    Solves ``(1 - c) w + (1 + c) = +-sqrt(delta delta') (w - 1)`` for
    ``w = e^{2t}``.
    """
    r = np.sqrt(complex(K.delta * K.delta_prime))
    vals = []
    for s in (1, -1):
        den = (1 - K.c) - s * r
        num = -((1 + K.c) + s * r)
        if abs(den) < 1e-14 or abs(num) < 1e-14:
            raise DegenerateParameter("singular line escapes to infinity")
        vals.append(0.5 * float(np.log(abs(num / den))))
    a, b = sorted(vals)
    return a, b


def classify(K: ExprParam) -> KClass:
    a, b = exchanging_interval(K)
    if abs(a - b) < 1e-12:
        tag = "Degenerate"
    elif a > 0:
        tag = "Kplus"
    elif b < 0:
        tag = "Kminus"
    elif a < 0 < b:
        tag = "Kzero"
    else:
        tag = "Degenerate"
    return KClass(tag, (a, b))


def polar_element(K: ExprParam, h: HbarConfig = HbarConfig()) -> GaussPoly:
    """``(c^2 - delta delta')^{-1/2} exp((delta' u^2 + delta v^2 - 2 c uv) / (i hbar (c^2 - delta delta')))``."""
    X = complex(K.c * K.c - K.delta * K.delta_prime)
    if abs(X) < 1e-14:
        raise DegenerateParameter("c^2 - delta delta' vanishes")
    return GaussPoly(1 / np.sqrt(X), QuadForm(K.delta_prime / X, -K.c / X, K.delta / X))


def q_scalar_sign(K: ExprParam, h: HbarConfig = HbarConfig()) -> int:
    """Sign of ``exp_*(i pi (2 / i hbar) u o v)`` continued along ``[0, i pi]``."""
    g, _ = exp_2H_path([0, 1j * np.pi], K, h)
    return int(np.sign(round(g.amp.real)))


# ---------------------------------------------------------------------------
# Riccati flow: an ODE oracle independent of the closed form

def _riccati_rhs(y, K: ExprParam, h: HbarConfig):
    a, quu, quv, qvv = y
    fam = GaussFamily([1.0], [quu], [quv], [qvv])
    vg = fam.mul_gen("v", "left", K, h)
    uvg = vg.mul_gen("u", "left", K, h)
    ug = fam.mul_gen("u", "left", K, h)
    vug = ug.mul_gen("v", "left", K, h)

    def coef(key):
        return complex((uvg.poly.get(key, 0) + vug.poly.get(key, 0))[0]) / h.ih

    # (2 / i hbar) u o v * g = (1 / i hbar)(u*(v*g) + v*(u*g))
    ih = h.ih
    return np.array([a * coef((0, 0)), ih * coef((2, 0)), ih * coef((1, 1)) / 2, ih * coef((0, 2))])


def _rk4_step(y, dt, K, h):
    k1 = dt * _riccati_rhs(y, K, h)
    k2 = dt * _riccati_rhs(y + k1 / 2, K, h)
    k3 = dt * _riccati_rhs(y + k2 / 2, K, h)
    k4 = dt * _riccati_rhs(y + k3, K, h)
    return y + (k1 + 2 * k2 + 2 * k3 + k4) / 6


def riccati_flow(init: GaussPoly, t_end: complex, steps: int, K: ExprParam,
                 h: HbarConfig = HbarConfig(), tol: float = 1e-9) -> GaussPoly:
    """Integrate ``d/dt f = (2 / i hbar) u o v * f`` along ``[0, t_end]`` with RK4.

    The Gaussian ansatz closes on ``(amp, Q)``.  Each step is compared with
    two half steps; a discrepancy above ``tol`` raises ``StepSizeTooLarge``.
    """
    if init.poly.degree > 0 or init.poly.coeff(0, 0) != 1:
        raise ValueError("riccati_flow needs a pure Gaussian initial value")
    y = np.array([init.amp, *init.quad.as_tuple()], dtype=complex)
    if t_end == 0:
        return init
    dt = complex(t_end) / steps
    for _ in range(steps):
        full = _rk4_step(y, dt, K, h)
        half = _rk4_step(_rk4_step(y, dt / 2, K, h), dt / 2, K, h)
        scale = max(1.0, float(np.max(np.abs(half))))
        if np.max(np.abs(full - half)) > tol * scale:
            raise StepSizeTooLarge(f"local error {np.max(np.abs(full - half)):.3g}")
        y = half + (half - full) / 15
    return GaussPoly(complex(y[0]), QuadForm(complex(y[1]), complex(y[2]), complex(y[3])))
