"""Ellipse quadrature core shared by the manifold catalog and the
continuum-energy oracles.

All ellipses here are axis-aligned with parametrization
(a cos t, b sin t) and fixed perimeter 2*pi, so the semi-minor axis b is an
implicit function of the semi-major axis a on [1, pi/2].
"""
from __future__ import annotations

import numpy as np

from .numerics import adaptive_simpson, bisect

A_MAX = np.pi / 2.0


def speed(t, a, b):
    """Parametric speed |d/dt (a cos t, b sin t)|."""
    st, ct = np.sin(t), np.cos(t)
    return np.sqrt(a * a * st * st + b * b * ct * ct)


def _composite_simpson_quadrant(f, panels=2048):
    """Vectorized composite Simpson of f over [0, pi/2], times 4.

    Both ellipse integrands are smooth on the closed quadrant (including
    the degenerate b = 0 case, where sin t >= 0 there), so the composite
    rule converges at full fourth order; 2048 panels put the error near
    machine precision.
    """
    t = np.linspace(0.0, np.pi / 2.0, panels + 1)
    h = t[1] - t[0]
    mid = 0.5 * (t[:-1] + t[1:])
    v = f(t)
    return 4.0 * float(np.sum((h / 6.0) * (v[:-1] + 4.0 * f(mid) + v[1:])))


def perimeter(a, b, tol=1e-12, panels=2048):
    """Perimeter of the ellipse, integrated by quadrant."""
    return _composite_simpson_quadrant(lambda t: speed(t, a, b), panels)


def perimeter_adaptive(a, b, tol=1e-12):
    """Adaptive-Simpson reference for the perimeter (used for cross-checks)."""
    val, _ = adaptive_simpson(lambda t: speed(t, a, b), 0.0, np.pi / 2.0, tol=tol / 4.0)
    return 4.0 * val


def solve_semi_minor(a, tol=1e-11):
    """Semi-minor axis b in [0, 1] giving perimeter 2*pi for semi-major a."""
    if not (1.0 <= a <= A_MAX + 1e-12):
        raise ValueError(f"semi-major axis must lie in [1, pi/2], got {a}")
    if a == 1.0:
        return 1.0
    if abs(a - A_MAX) <= 1e-12:
        return 0.0

    # secant iteration on the (strictly increasing) perimeter residual,
    # safeguarded by a bisection bracket
    def g(b):
        return perimeter(a, b) - 2.0 * np.pi

    lo, hi = 0.0, 1.0
    glo, ghi = g(lo), g(hi)
    b0, b1 = lo, hi
    g0, g1 = glo, ghi
    for _ in range(80):
        if abs(g1 - g0) < 1e-300:
            break
        b2 = b1 - g1 * (b1 - b0) / (g1 - g0)
        if not (lo < b2 < hi):
            b2 = 0.5 * (lo + hi)
        g2 = g(b2)
        if g2 > 0:
            hi, ghi = b2, g2
        else:
            lo, glo = b2, g2
        b0, g0, b1, g1 = b1, g1, b2, g2
        if abs(g2) < 1e-13 or (hi - lo) < 1e-15:
            return b2
    return bisect(g, lo, hi, xtol=1e-15)


def second_moment(a, b, tol=1e-10, panels=2048):
    """Line integral of |x|^2 over the ellipse with respect to arc length."""

    def g(t):
        st, ct = np.sin(t), np.cos(t)
        return (a * a * ct * ct + b * b * st * st) * speed(t, a, b)

    val = _composite_simpson_quadrant(g, panels)
    ref = _composite_simpson_quadrant(g, panels // 2)
    return val, abs(val - ref) / 15.0 + 1e-14


def second_moment_adaptive(a, b, tol=1e-10):
    """Adaptive-Simpson reference for the second moment (cross-checks)."""

    def g(t):
        st, ct = np.sin(t), np.cos(t)
        return (a * a * ct * ct + b * b * st * st) * speed(t, a, b)

    val, err = adaptive_simpson(g, 0.0, np.pi / 2.0, tol=tol / 4.0)
    return 4.0 * val, 4.0 * err


def arclength_table(a, b, resolution=16384):
    """Cumulative arc length s(t) on a uniform t-grid over [0, 2*pi].

    Returns (t_grid, s_grid) with s_grid[0] = 0.  Composite Simpson on each
    cell keeps the table error far below the geometric tolerances used by
    the samplers and distance oracles.
    """
    t = np.linspace(0.0, 2.0 * np.pi, resolution + 1)
    h = t[1] - t[0]
    mid = 0.5 * (t[:-1] + t[1:])
    cell = (h / 6.0) * (speed(t[:-1], a, b) + 4.0 * speed(mid, a, b) + speed(t[1:], a, b))
    s = np.concatenate([[0.0], np.cumsum(cell)])
    return t, s
