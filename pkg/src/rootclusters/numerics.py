"""Ball arithmetic used throughout the package.

Balls are Arb's ``acb`` values: a floating-point midpoint plus an error
radius, with every operation rounded so that the exact result stays
enclosed.  Arb keeps one radius per component; :func:`ball_radius` gives
the single-radius view (an upper bound on the distance from the midpoint
to any member).

Geometry elsewhere in the package is exact, with dyadic rationals held as
:class:`fractions.Fraction`.  The helpers here convert between the two
without rounding.
"""
from __future__ import annotations

import math
from contextlib import contextmanager
from fractions import Fraction
from typing import Iterator, Union

import flint
from flint import acb, arb

ComplexBall = acb
BigFloat = arb

DyadicLike = Union[int, Fraction]
ComplexLike = Union[int, float, complex, Fraction, tuple, acb]


@contextmanager
def working_precision(bits: int) -> Iterator[None]:
    """Run the enclosed block with Arb midpoints rounded to ``bits`` bits."""
    old = flint.ctx.prec
    flint.ctx.prec = max(2, int(bits))
    try:
        yield
    finally:
        flint.ctx.prec = old


def is_dyadic(q: DyadicLike) -> bool:
    q = Fraction(q)
    den = q.denominator
    return den & (den - 1) == 0


def dyadic_to_arb(q: DyadicLike) -> arb:
    """Exact conversion of a dyadic rational (denominator a power of two)."""
    q = Fraction(q)
    if not is_dyadic(q):
        raise ValueError(f"{q} is not a dyadic rational")
    return arb((q.numerator, -(q.denominator.bit_length() - 1)))


def rational_to_arb(q: Fraction, bits: int) -> arb:
    """Ball of radius at most 2**-bits around the rational ``q``.

    The midpoint is ``q`` rounded to the nearest multiple of 2**-bits, so the
    result is exact whenever ``q`` already is such a multiple.
    """
    q = Fraction(q)
    if is_dyadic(q) and q.denominator.bit_length() - 1 <= bits:
        return dyadic_to_arb(q)
    num = q.numerator << (bits + 1)
    m = (num // q.denominator + 1) >> 1  # round half up
    return arb((m, -bits), (1, -bits - 1))


def arb_to_fraction(x: arb) -> Fraction:
    """Exact value of the midpoint of ``x``."""
    man, exp = x.mid().man_exp()
    man, exp = int(man), int(exp)
    return Fraction(man << exp) if exp >= 0 else Fraction(man, 1 << -exp)


def ball(center: ComplexLike, radius: DyadicLike | float = 0) -> acb:
    """Complex ball containing the disc of the given center and radius.

    ``center`` may be a pair of dyadic fractions (converted exactly), a
    Python number, or an existing ball (its midpoint is used).
    """
    if isinstance(center, acb):
        re, im = center.real.mid(), center.imag.mid()
    elif isinstance(center, tuple):
        re, im = dyadic_to_arb(center[0]), dyadic_to_arb(center[1])
    elif isinstance(center, Fraction):
        re, im = dyadic_to_arb(center), arb(0)
    else:
        c = complex(center)
        re, im = arb(c.real), arb(c.imag)
    if radius:
        r = arb(radius) if not isinstance(radius, Fraction) else _upper_arb(radius)
        # arb(mid, rad) keeps the midpoint exact whatever the context precision
        re = arb(re.mid(), re.rad() + r)
        im = arb(im.mid(), im.rad() + r)
    return acb(re, im)


def _upper_arb(q: Fraction) -> arb:
    if is_dyadic(q):
        return dyadic_to_arb(q)
    return arb(math.nextafter(float(q), math.inf))


def ball_add(a: acb, b: acb) -> acb:
    return a + b


def ball_mul(a: acb, b: acb) -> acb:
    return a * b


def ball_pow(a: acb, k: int) -> acb:
    """``a**k`` for ``k >= 1`` by repeated squaring."""
    if k < 1:
        raise ValueError("exponent must be a positive integer")
    result = None
    base = a
    while k:
        if k & 1:
            result = base if result is None else result * base
        k >>= 1
        if k:
            base = base * base
    return result


def ball_radius(a: acb) -> float:
    """Upper bound on |x - mid(a)| over all members x of ``a``."""
    r = a.real.rad() + a.imag.rad()
    return math.nextafter(float(r), math.inf) if r != 0 else 0.0


def ball_radius_log2(a: acb) -> float:
    """log2 of an upper bound of the ball radius (``-inf`` for exact balls)."""
    r = a.real.rad() + a.imag.rad()
    if r == 0:
        return -math.inf
    man, exp = r.upper().man_exp() if not r.is_exact() else r.man_exp()
    return int(exp) + math.log2(int(man)) + 1e-12


def ball_center(a: acb) -> tuple[Fraction, Fraction]:
    """Exact midpoint as a pair of dyadic fractions."""
    return arb_to_fraction(a.real), arb_to_fraction(a.imag)


def magnitude_log2(x: acb | arb) -> float:
    """log2 of an upper bound on |x|; ``-inf`` when x is exactly zero."""
    u = x.abs_upper() if isinstance(x, acb) else abs(x).upper()
    if u == 0:
        return -math.inf
    man, exp = u.mid().man_exp()
    return int(exp) + math.log2(int(man)) + 1e-12


def contains(a: acb, z: ComplexLike) -> bool:
    if isinstance(z, tuple):
        z = acb(dyadic_to_arb(z[0]), dyadic_to_arb(z[1]))
    return a.contains(acb(z) if not isinstance(z, acb) else z)
