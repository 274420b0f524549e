"""Benchmark polynomial families and an independent root oracle.

The families are built exactly (rational or integer coefficients) except
the spiral polynomial, whose roots are transcendental and whose
coefficients are therefore produced as balls at the requested precision.

:func:`oracle_roots` is a validation tool for tests.  It uses mpmath and
numpy only and never calls into the solver or into Arb.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath
import numpy as np
from flint import acb, acb_poly, arb

from .numerics import working_precision
from .polynomial import DensePolynomial, ExactPolynomial, OraclePolynomial

FAMILIES = ("bernoulli", "mignotte", "mandelbrot", "spiral")


@lru_cache(maxsize=None)
def bernoulli_numbers(n: int) -> tuple[Fraction, ...]:
    """b_0..b_n from sum_{k<m+1} C(m+1, k) b_k = 0, with b_1 = -1/2."""
    b = [Fraction(1)]
    for m in range(1, n + 1):
        s = sum(math.comb(m + 1, k) * b[k] for k in range(m))
        b.append(-s / (m + 1))
    return tuple(b)


def bernoulli(d: int) -> ExactPolynomial:
    """Bernoulli polynomial sum_k C(d, k) b_{d-k} z^k."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    b = bernoulli_numbers(d)
    return ExactPolynomial([math.comb(d, k) * b[d - k] for k in range(d + 1)])


def mignotte(d: int, a: int) -> ExactPolynomial:
    """z^d - 2 (2^a z - 1)^2."""
    if d < 3 or a < 1:
        raise ValueError("mignotte needs d >= 3 and a >= 1")
    t = 1 << a
    coeffs = [0] * (d + 1)
    coeffs[0] -= 2
    coeffs[1] += 4 * t
    coeffs[2] -= 2 * t * t
    coeffs[d] += 1
    return ExactPolynomial(coeffs)


def _int_poly_mul(p: Sequence[int], q: Sequence[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def mandelbrot(d: int) -> ExactPolynomial:
    """P_k with P_0 = 1, P_k = z P_{k-1}^2 + 1 and k = floor(log2(d + 1))."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    k = (d + 1).bit_length() - 1
    if (1 << k) - 1 != d:
        warnings.warn(
            f"mandelbrot degree {d} is not of the form 2^k - 1; using degree {(1 << k) - 1}",
            stacklevel=2,
        )
    p = [1]
    for _ in range(k):
        p = [0] + _int_poly_mul(p, p)
        p[0] += 1
    return ExactPolynomial(p)


class SpiralOracle(OraclePolynomial):
    """prod_{k=1..d} (z - (k/d) exp(4 k pi i / d)), approximated on demand."""

    def __init__(self, d: int):
        super().__init__()
        if d < 1:
            raise ValueError("degree must be >= 1")
        self.degree = d
        self.is_real = False

    def _compute(self, L: int) -> DensePolynomial:
        d = self.degree
        # coefficients are at most 2^d in modulus; the product loses about
        # log2(d) bits more
        prec = L + d + 2 * d.bit_length() + 32
        with working_precision(prec):
            pi = arb.pi()
            roots = []
            for k in range(1, d + 1):
                theta = 4 * k * pi / d
                rk = arb(k) / d
                roots.append(acb(rk * theta.cos(), rk * theta.sin()))
            poly = acb_poly.from_roots(roots)
            coeffs = list(poly.coeffs())
        P = DensePolynomial(tuple(coeffs))
        if P.max_radius_log2() > -L:
            return self._compute(2 * L)
        return P

    def __repr__(self):
        return f"SpiralOracle(degree={self.degree})"


def spiral(d: int, L: int | None = None):
    """Spiral polynomial oracle, or its L-bit approximation when L is given."""
    O = SpiralOracle(d)
    return O if L is None else O.approximate(L)


@dataclass(frozen=True)
class FamilySpec:
    family: str
    degree: int
    a: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.degree < 1:
            raise ValueError("degree must be positive")
        if self.family == "mignotte" and self.a is None:
            raise ValueError("mignotte needs a parameter a")
        if self.family != "mignotte" and self.a is not None:
            raise ValueError(f"{self.family} takes no parameter")

    def build(self) -> OraclePolynomial:
        if self.family == "bernoulli":
            return bernoulli(self.degree)
        if self.family == "mignotte":
            return mignotte(self.degree, self.a)
        if self.family == "mandelbrot":
            return mandelbrot(self.degree)
        return SpiralOracle(self.degree)


def parse_family_spec(text: str) -> FamilySpec:
    """Parse ``builtin:<family>:<d>[:a]`` (the ``builtin:`` prefix is optional)."""
    parts = text.split(":")
    if parts and parts[0] == "builtin":
        parts = parts[1:]
    if len(parts) not in (2, 3):
        raise ValueError(f"bad family spec {text!r}")
    try:
        d = int(parts[1])
        a = int(parts[2]) if len(parts) == 3 else None
    except ValueError:
        raise ValueError(f"bad family spec {text!r}") from None
    return FamilySpec(parts[0], d, a)


# ---------------------------------------------------------------------------
# validation oracle


@dataclass(frozen=True)
class OracleRoot:
    """A root estimate with an inclusion radius and the multiplicity of its group.

    ``center`` and ``radius`` are mpmath numbers carrying the oracle's full
    working precision; ``value`` gives the center as a Python complex.
    """

    center: object
    radius: object
    multiplicity: int

    @property
    def value(self) -> complex:
        return complex(self.center)


def _coefficients_mp(P) -> list:
    """Coefficients (ascending) as mpmath complex numbers."""
    if isinstance(P, ExactPolynomial):
        return [mpmath.mpc(mpmath.mpf(re.numerator) / re.denominator,
                           mpmath.mpf(im.numerator) / im.denominator)
                for re, im in P.coefficients]
    if isinstance(P, OraclePolynomial):
        P = P.approximate(mpmath.mp.prec + 20)
    if isinstance(P, DensePolynomial):
        out = []
        for c in P.coefficients:
            re = c.real.mid().man_exp()
            im = c.imag.mid().man_exp()
            out.append(mpmath.mpc(mpmath.ldexp(int(re[0]), int(re[1])),
                                  mpmath.ldexp(int(im[0]), int(im[1]))))
        return out
    return [mpmath.mpc(c) for c in P]


def _aberth(coeffs: list, start: list, max_iter: int) -> list:
    d = len(coeffs) - 1
    lead = coeffs[-1]
    monic = [c / lead for c in coeffs][::-1]
    dmonic = [k * c for k, c in zip(range(d, 0, -1), monic[:-1])]
    z = list(start)
    # stop at half precision, then polish: convergence is at least quadratic
    tol = mpmath.mpf(2) ** (-mpmath.mp.prec // 2)
    polish = None
    for _ in range(max_iter):
        biggest = mpmath.mpf(0)
        for i in range(d):
            zi = z[i]
            p = mpmath.polyval(monic, zi)
            if p == 0:
                continue
            dp = mpmath.polyval(dmonic, zi)
            ratio = p / dp if dp != 0 else mpmath.mpc(1)
            s = mpmath.fsum(1 / (zi - z[j]) for j in range(d) if j != i and zi != z[j])
            step = ratio / (1 - ratio * s)
            z[i] = zi - step
            biggest = max(biggest, abs(step) / max(mpmath.mpf(1), abs(zi)))
        if polish is not None:
            polish -= 1
            if polish == 0:
                break
        elif biggest < tol:
            polish = 2
    return z


def oracle_roots(P, prec: int = 256, max_iter: int = 400) -> list[OracleRoot]:
    """All roots of P with inclusion radii and multiplicities.

    Aberth iteration in mpmath from a numpy starting point, then the
    a posteriori bound: with ``W_i = P(z_i) / (a_d prod_{j != i} (z_i - z_j))``
    every connected component of the discs ``D(z_i, d |W_i|)`` made of k
    discs holds exactly k roots.  Each root reports the number of discs of
    its component as its multiplicity.  Raises ``ArithmeticError`` when
    the inclusion radii do not shrink below 1e-6 (raise ``prec``).
    """
    deg = P.degree if hasattr(P, "degree") else len(P) - 1
    if deg > 128:
        raise ValueError("oracle_roots is meant for degrees up to 128")
    with mpmath.workprec(prec):
        coeffs = _coefficients_mp(P)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        d = len(coeffs) - 1
        if d == 0:
            return []
        # zero roots are handled exactly
        nz = 0
        while coeffs[nz] == 0:
            nz += 1
        core = coeffs[nz:]
        dc = len(core) - 1
        roots: list = []
        if dc > 0:
            start_np = np.roots([complex(c) for c in core[::-1]])
            rng = np.random.default_rng(12345)
            start = [mpmath.mpc(complex(s)) + mpmath.mpc(*(rng.standard_normal(2) * 1e-12))
                     for s in start_np]
            roots = _aberth(core, start, max_iter)
            lead = core[-1]
            radii = []
            abs_core = [abs(c) for c in core[::-1]]
            unit = mpmath.mpf(2) ** (-mpmath.mp.prec + 1)

            def eval_err(z):
                return 4 * (dc + 1) * unit * mpmath.polyval(abs_core, abs(z))

            for i, zi in enumerate(roots):
                denom = lead
                for j, zj in enumerate(roots):
                    if j != i:
                        denom *= zi - zj
                # |P(z_i)| plus a bound on its evaluation error
                val = abs(mpmath.polyval(core[::-1], zi)) + eval_err(zi)
                w = val / abs(denom) if denom != 0 else mpmath.inf
                radii.append(dc * w * (1 + mpmath.mpf(2) ** -20))
        else:
            radii = []
        zero = mpmath.mpc(0)
        centers = list(roots) + [zero] * nz
        rads = list(radii) + [mpmath.mpf(0)] * nz
        # components of overlapping inclusion discs
        n = len(centers)
        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i in range(n):
            for j in range(i + 1, n):
                if abs(centers[i] - centers[j]) <= rads[i] + rads[j]:
                    parent[find(i)] = find(j)
        groups: dict[int, list[int]] = {}
        for i in range(n):
            groups.setdefault(find(i), []).append(i)
        out = []
        for members in groups.values():
            m = len(members)
            if m > 1:
                c = mpmath.fsum(centers[i] for i in members) / m
                r = max(abs(centers[i] - c) + rads[i] for i in members)
            else:
                c, r = centers[members[0]], rads[members[0]]
            if not mpmath.isfinite(r) or m == 1 and r > 1e-6 * max(1, abs(c)):
                raise ArithmeticError("inclusion radii too large; increase prec")
            out.append(OracleRoot(c, r, m))
    out.sort(key=lambda o: (float(o.center.real), float(o.center.imag)))
    return out


def _to_mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _to_mpc(z):
    if isinstance(z, tuple):
        return mpmath.mpc(_to_mpf(z[0]), _to_mpf(z[1]))
    return mpmath.mpc(z)


def _bits_needed(*values) -> int:
    bits = 0
    for v in values:
        for q in (v if isinstance(v, tuple) else (v,)):
            if isinstance(q, Fraction):
                bits = max(bits, q.denominator.bit_length() + q.numerator.bit_length())
    return bits


def count_roots_in_disc(roots: Sequence[OracleRoot], center, radius) -> int:
    """Roots (with multiplicity) whose inclusion disc lies in D(center, radius).

    ``center`` is a complex number or a pair of Fractions, ``radius`` a
    number or Fraction; Fractions are converted without loss.  Raises
    ``ArithmeticError`` when an inclusion disc straddles the circle.
    """
    with mpmath.workprec(max(256, 64 + _bits_needed(center, radius))):
        c = _to_mpc(center)
        rad = _to_mpf(radius)
        total = 0
        for r in roots:
            dist = abs(r.center - c)
            if dist + r.radius <= rad:
                total += r.multiplicity
            elif dist - r.radius <= rad:
                raise ArithmeticError("root too close to the disc boundary")
    return total
