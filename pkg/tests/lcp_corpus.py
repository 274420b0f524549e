"""Random polynomials with known, well separated roots.

Roots are drawn on the grid 2^-9 (Z + iZ), so distinct roots are at least
2^-9 > 1e-3 apart; some cases add deliberately adjacent grid pairs.  Even
indices give real polynomials (real roots and conjugate pairs), odd ones
complex polynomials with a complex leading coefficient.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from rootclusters.geometry import Box

GRID = Fraction(1, 512)
ROIS = [(-4, 4, -4, 4), (-2, 2, -2, 2), (-1, 3, -2, 2), (-3, 1, -1, 3), (-1, 1, -1, 1)]


def _grid_point(rng, span=3.5):
    k = int(span / GRID)
    return (Fraction(int(rng.integers(-k, k + 1))) * GRID,
            Fraction(int(rng.integers(-k, k + 1))) * GRID)


def _mul_linear(coeffs, root):
    """coeffs * (z - root) over Gaussian rationals, ascending order."""
    rr, ri = root
    out = [(Fraction(0), Fraction(0))] * (len(coeffs) + 1)
    for k, (a, b) in enumerate(coeffs):
        # z * c
        x, y = out[k + 1]
        out[k + 1] = (x + a, y + b)
        # -root * c
        x, y = out[k]
        out[k] = (x - (rr * a - ri * b), y - (rr * b + ri * a))
    return out


def random_case(seed: int):
    """(coefficients, roots, roi) for case ``seed``."""
    rng = np.random.default_rng(1000 + seed)
    real = seed % 2 == 0
    d = int(rng.integers(1, 33))
    roots: list = []
    taken = set()

    def add(z):
        if z in taken:
            return False
        taken.add(z)
        roots.append(z)
        return True

    while len(roots) < d:
        z = _grid_point(rng)
        if real:
            if rng.random() < 0.3 or d - len(roots) == 1:
                add((z[0], Fraction(0)))
            elif z[1] != 0 and (z[0], -z[1]) not in taken and z not in taken:
                add(z)
                add((z[0], -z[1]))
        else:
            add(z)
            # an adjacent pair now and then
            if rng.random() < 0.15 and len(roots) < d:
                add((z[0] + GRID, z[1]))
    if real:
        lead = (Fraction(int(rng.integers(1, 5))), Fraction(0))
    else:
        lead = (Fraction(int(rng.integers(1, 4))), Fraction(int(rng.integers(-2, 3))))
    coeffs = [lead]
    for z in roots:
        coeffs = _mul_linear(coeffs, z)
    roi = Box.from_bounds(*ROIS[seed % len(ROIS)])
    return coeffs, roots, roi
