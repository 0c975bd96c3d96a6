"""Deterministic quadrature helpers shared by the geometry and audit modules.

Everything here is fixed-order composite quadrature: no adaptivity, so repeated
runs with identical inputs produce identical floats.
"""

from __future__ import annotations

import numpy as np

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    if order not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(order)
        _GL_CACHE[order] = (x, w)
    return _GL_CACHE[order]


def gl_panels(fn, a: float, b: float, n_panels: int = 64, order: int = 10) -> float:
    """Composite Gauss-Legendre integral of a vectorized callable on [a, b]."""
    if b == a:
        return 0.0
    x, w = _gl_nodes(order)
    edges = np.linspace(a, b, n_panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    vals = np.asarray(fn(nodes), dtype=float).reshape(n_panels, order)
    return float(np.sum(vals * w[None, :] * half[:, None]))


def split_points(a: float, b: float, breaks) -> np.ndarray:
    """Sorted subdivision of [a, b] at every interior breakpoint."""
    pts = [a, b]
    lo, hi = min(a, b), max(a, b)
    for t in np.atleast_1d(np.asarray(breaks, dtype=float)):
        if lo + 1e-14 * (1 + abs(lo)) < t < hi - 1e-14 * (1 + abs(hi)):
            pts.append(t)
    return np.array(sorted(set(pts)))


def split_quad(fn, a: float, b: float, breaks=(), n_panels: int = 64, order: int = 10) -> float:
    """Composite GL applied separately between breakpoints of fn."""
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    pts = split_points(a, b, breaks)
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        total += gl_panels(fn, lo, hi, n_panels=n_panels, order=order)
    return sign * total


def simpson_tracked(fn, a: float, b: float, n: int = 512) -> tuple[float, float]:
    """Composite Simpson value plus a Richardson error estimate.

    n is rounded up to an even count; the estimate compares against the
    half-resolution rule (|S_n - S_{n/2}| / 15).
    """
    n = max(2, int(n))
    if n % 2:
        n += 1
    r = np.linspace(a, b, n + 1)
    v = np.asarray(fn(r), dtype=float)
    h = (b - a) / n
    s_full = h / 3.0 * (v[0] + v[-1] + 4.0 * v[1:-1:2].sum() + 2.0 * v[2:-2:2].sum())
    vc = v[::2]
    hc = 2.0 * h
    s_half = hc / 3.0 * (vc[0] + vc[-1] + 4.0 * vc[1:-1:2].sum() + 2.0 * vc[2:-2:2].sum())
    return float(s_full), abs(s_full - s_half) / 15.0


def cumulative_simpson_grid(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Cumulative integral of samples y(x) on a grid, O(h^4) between nodes."""
    from scipy.integrate import cumulative_simpson

    out = cumulative_simpson(y, x=x, initial=0.0)
    return np.asarray(out, dtype=float)
