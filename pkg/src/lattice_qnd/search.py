"""Derivative-free 1-D search used by the fitters and the modulation optimizer."""

import math

INV_PHI = (math.sqrt(5) - 1) / 2
INV_PHI2 = (3 - math.sqrt(5)) / 2


def golden_section(f, a, b, tol=1e-8, max_iter=200):
    """Minimize a unimodal ``f`` on ``[a, b]``; returns ``(x_min, f(x_min))``."""
    a, b = min(a, b), max(a, b)
    h = b - a
    c = a + INV_PHI2 * h
    d = a + INV_PHI * h
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if h <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            h = INV_PHI * h
            c = a + INV_PHI2 * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = INV_PHI * h
            d = a + INV_PHI * h
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def bracket_on_grid(f, grid):
    """Evaluate ``f`` on ``grid`` and return the neighbours of the best point."""
    values = [f(x) for x in grid]
    k = min(range(len(values)), key=values.__getitem__)
    return grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)], k
