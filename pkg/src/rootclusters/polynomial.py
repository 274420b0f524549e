"""Dense polynomials with ball coefficients and polynomial oracles.

An oracle is a polynomial that is only available through approximations:
``approximate(L)`` returns a :class:`DensePolynomial` whose coefficient
balls all have radius at most 2**-L.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from flint import acb, acb_poly, arb

from .numerics import (
    ball_radius_log2,
    magnitude_log2,
    rational_to_arb,
    working_precision,
)

GaussianRational = tuple[Fraction, Fraction]


class PolynomialFormatError(ValueError):
    """Raised for malformed polynomial files; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True, eq=False)
class DensePolynomial:
    """Polynomial with ball coefficients in ascending degree order.

    Trailing coefficients that are exactly zero are dropped, so
    ``len(coefficients) == degree + 1`` always holds.
    """

    coefficients: tuple[acb, ...]
    _poly: acb_poly = field(init=False, repr=False)

    def __post_init__(self):
        coeffs = [c if isinstance(c, acb) else acb(c) for c in self.coefficients]
        while len(coeffs) > 1 and coeffs[-1].is_zero():
            coeffs.pop()
        if not coeffs:
            coeffs = [acb(0)]
        object.__setattr__(self, "coefficients", tuple(coeffs))
        object.__setattr__(self, "_poly", acb_poly(coeffs))

    @classmethod
    def from_acb_poly(cls, p: acb_poly) -> "DensePolynomial":
        return cls(tuple(p.coeffs()) or (acb(0),))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def poly(self) -> acb_poly:
        return self._poly

    def __len__(self):
        return len(self.coefficients)

    def __getitem__(self, k):
        return self.coefficients[k]

    def max_radius_log2(self) -> float:
        return max(ball_radius_log2(c) for c in self.coefficients)

    def overlaps(self, other: "DensePolynomial") -> bool:
        """Coefficientwise ball overlap (missing coefficients count as 0)."""
        n = max(len(self), len(other))
        a = list(self.coefficients) + [acb(0)] * (n - len(self))
        b = list(other.coefficients) + [acb(0)] * (n - len(other))
        return all(x.overlaps(y) for x, y in zip(a, b))

    def __repr__(self):
        return f"DensePolynomial(degree={self.degree})"


def evaluate(P: DensePolynomial, z: acb) -> acb:
    """Horner evaluation; encloses P(x) for every x in ``z``."""
    z = z if isinstance(z, acb) else acb(z)
    acc = acb(0)
    for c in reversed(P.coefficients):
        acc = acc * z + c
    return acc


def taylor_shift_scale(P: DensePolynomial, c: acb, r: arb | acb) -> DensePolynomial:
    """Coefficients of ``P(c + r z)``.

    Composition with a linear polynomial is a Taylor shift followed by a
    scaling; Arb performs it in C with rigorous error propagation.
    """
    c = c if isinstance(c, acb) else acb(c)
    r = r if isinstance(r, acb) else acb(r)
    return DensePolynomial.from_acb_poly(P.poly(acb_poly([c, r])))


def graeffe(P: DensePolynomial) -> DensePolynomial:
    """Root-squaring transform.

    With ``P(z) = E(z^2) + z O(z^2)``, the result is ``(-1)^d (E^2 - z O^2)``,
    whose roots are the squares of the roots of P and whose leading
    coefficient is the square of P's.
    """
    coeffs = P.coefficients
    even = acb_poly(list(coeffs[0::2]))
    odd = acb_poly(list(coeffs[1::2]) or [acb(0)])
    g = even * even - (odd * odd).left_shift(1)
    if P.degree % 2:
        g = -g
    out = list(g.coeffs())
    out += [acb(0)] * (P.degree + 1 - len(out))
    return DensePolynomial(tuple(out[: P.degree + 1]))


class OraclePolynomial:
    """A polynomial of fixed degree queried at arbitrary precision.

    Subclasses implement :meth:`_compute`.  Results are cached per
    precision; a request is served from any cached approximation at least
    as precise.
    """

    degree: int
    is_real: bool = False

    def __init__(self):
        self._cache: dict[int, DensePolynomial] = {}
        self._lock = threading.Lock()
        self._magnitudes: list[float] | None = None

    def _compute(self, L: int) -> DensePolynomial:
        raise NotImplementedError

    def approximate(self, L: int) -> DensePolynomial:
        if L < 1:
            raise ValueError("precision must be a positive integer")
        with self._lock:
            best = min((k for k in self._cache if k >= L), default=None)
            if best is not None:
                return self._cache[best]
        P = self._compute(L)
        if P.degree != self.degree:
            raise ArithmeticError(
                f"oracle returned degree {P.degree}, expected {self.degree}"
            )
        with self._lock:
            self._cache[L] = P
        return P

    def coefficient_log2_magnitudes(self) -> list[float]:
        """log2 upper bounds of |coefficient| (used to size working precision)."""
        if self._magnitudes is None:
            P = self.approximate(53)
            self._magnitudes = [magnitude_log2(c) for c in P.coefficients]
        return self._magnitudes

    def max_coefficient_bits(self) -> int:
        m = max(self.coefficient_log2_magnitudes())
        return max(0, math.ceil(m)) if m != -math.inf else 0


def approximate(O: OraclePolynomial, L: int) -> DensePolynomial:
    return O.approximate(L)


class ExactPolynomial(OraclePolynomial):
    """Oracle for a polynomial with exact Gaussian-rational coefficients."""

    def __init__(self, coefficients: Sequence):
        super().__init__()
        coeffs = [_as_gaussian(c) for c in coefficients]
        while len(coeffs) > 1 and coeffs[-1] == (0, 0):
            coeffs.pop()
        self.coefficients: tuple[GaussianRational, ...] = tuple(coeffs)
        self.degree = len(coeffs) - 1
        self.is_real = all(im == 0 for _, im in coeffs)

    def _compute(self, L: int) -> DensePolynomial:
        with working_precision(L + 64):
            balls = [
                acb(rational_to_arb(re, L + 1), rational_to_arb(im, L + 1))
                for re, im in self.coefficients
            ]
        return DensePolynomial(tuple(balls))

    def __call__(self, z):
        """Exact evaluation at a rational or Gaussian-rational point."""
        zr, zi = _as_gaussian(z)
        ar, ai = Fraction(0), Fraction(0)
        for cr, ci in reversed(self.coefficients):
            ar, ai = ar * zr - ai * zi + cr, ar * zi + ai * zr + ci
        return ar, ai

    def __repr__(self):
        return f"ExactPolynomial(degree={self.degree})"


def _as_gaussian(c) -> GaussianRational:
    if isinstance(c, tuple):
        return Fraction(c[0]), Fraction(c[1])
    if isinstance(c, complex):
        return Fraction(c.real), Fraction(c.imag)
    return Fraction(c), Fraction(0)


def parse_polynomial(lines: Iterable[str]) -> ExactPolynomial:
    """Parse the text format: ``degree d`` then d+1 lines ``re im``.

    Values are decimals or rationals ``p/q`` and are read exactly.
    Blank lines and ``#`` comments are ignored.
    """
    entries = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if text:
            entries.append((lineno, text))
    if not entries:
        raise PolynomialFormatError("empty polynomial file", 1)
    lineno, head = entries[0]
    parts = head.split()
    if len(parts) != 2 or parts[0] != "degree":
        raise PolynomialFormatError("expected 'degree <d>'", lineno)
    try:
        d = int(parts[1])
    except ValueError:
        raise PolynomialFormatError(f"bad degree {parts[1]!r}", lineno) from None
    if d < 0:
        raise PolynomialFormatError("degree must be nonnegative", lineno)
    body = entries[1:]
    if len(body) != d + 1:
        where = body[d + 1][0] if len(body) > d + 1 else (body[-1][0] + 1 if body else lineno + 1)
        raise PolynomialFormatError(
            f"expected {d + 1} coefficient lines, found {len(body)}", where
        )
    coeffs = []
    for lineno, text in body:
        parts = text.split()
        if len(parts) != 2:
            raise PolynomialFormatError("expected two numbers 're im'", lineno)
        try:
            coeffs.append((Fraction(parts[0]), Fraction(parts[1])))
        except (ValueError, ZeroDivisionError):
            raise PolynomialFormatError(f"cannot parse {text!r}", lineno) from None
    if coeffs[-1] == (0, 0) and d > 0:
        raise PolynomialFormatError("leading coefficient is zero", body[-1][0])
    return ExactPolynomial(coeffs)


def read_polynomial_file(path: str | Path) -> ExactPolynomial:
    with open(path, encoding="utf-8") as fh:
        return parse_polynomial(fh)


def format_polynomial(coefficients: Sequence) -> str:
    """Inverse of :func:`parse_polynomial` for exact coefficients."""
    coeffs = [_as_gaussian(c) for c in coefficients]
    lines = [f"degree {len(coeffs) - 1}"]
    lines += [f"{re} {im}" for re, im in coeffs]
    return "\n".join(lines) + "\n"
