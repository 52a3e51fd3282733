"""Quadrature rules: Gauss-Legendre panels, periodic trapezoid, segments."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

PANEL_WIDTH = 0.5
PANEL_ORDER = 10
TRAPEZOID_NODES = 256
TRUNCATION_TOL = 1e-14


@lru_cache(maxsize=32)
def _legendre(order: int):
    return np.polynomial.legendre.leggauss(order)


def gauss_panels(lo: float, hi: float, width: float = PANEL_WIDTH,
                 order: int = PANEL_ORDER) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on ``[lo, hi]``."""
    if hi <= lo:
        return np.zeros(0), np.zeros(0)
    npan = max(1, int(np.ceil((hi - lo) / width - 1e-12)))
    edges = np.linspace(lo, hi, npan + 1)
    x, w = _legendre(order)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def segment_nodes(a: complex, b: complex, width: float = PANEL_WIDTH,
                  order: int = PANEL_ORDER) -> tuple[np.ndarray, np.ndarray]:
    """Nodes along the straight segment ``[a, b]``; weights include ``dz``."""
    L = abs(b - a)
    s, w = gauss_panels(0.0, L, width, order)
    d = (b - a) / L
    return a + d * s, d * w


def periodic_trapezoid(lo: float, period: float, n: int = TRAPEZOID_NODES) -> tuple[np.ndarray, np.ndarray]:
    """Equispaced nodes on ``[lo, lo + period)`` with equal weights ``period / n``."""
    t = lo + period * np.arange(n) / n
    return t, np.full(n, period / n)


def truncation_point(decay_rate: float, prefactor: float = 4.0, tol: float = TRUNCATION_TOL,
                     cap: float = 800.0) -> float:
    """Smallest ``S`` with ``prefactor * exp(-decay_rate * S) < tol``."""
    if decay_rate <= 0:
        raise ValueError("integrand does not decay")
    S = np.log(prefactor / tol) / decay_rate
    return float(min(max(S, 1.0), cap))


def graded_panels(lo: float, hi: float, centers, dists, width: float = PANEL_WIDTH,
                  order: int = PANEL_ORDER) -> tuple[np.ndarray, np.ndarray]:
    """Gauss panels on ``[lo, hi]`` shrunk near nearby complex singularities.

    A singularity at ``c + i d`` narrows the panels around ``x`` to half of
    ``max(d, |x - c|)``, which keeps each panel's Bernstein ellipse clear of it.
    """
    centers = np.asarray(centers, dtype=float)
    dists = np.asarray(dists, dtype=float)
    if centers.size == 0:
        return gauss_panels(lo, hi, width, order)
    edges = [lo]
    x = lo
    while x < hi - 1e-14:
        reach = np.maximum(dists, np.abs(x - centers))
        step = min(width, 0.5 * float(np.min(reach)))
        # do not step past a center without landing near it
        ahead = centers[(centers > x + 1e-14) & (centers < x + step)]
        if ahead.size:
            step = max(float(ahead.min() - x), 0.5 * float(np.min(dists)))
        x = min(hi, x + step)
        edges.append(x)
    edges = np.array(edges)
    xg, wg = _legendre(order)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    weights = (half[:, None] * wg[None, :]).ravel()
    return nodes, weights
