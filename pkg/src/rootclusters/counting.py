"""Root counting in discs: a soft Pellet test after Graeffe iterations.

For a disc D(c, r) the polynomial ``T(z) = P(c + r z)`` has as many roots in
the unit disc as P has in D(c, r).  Graeffe iterations square the roots,
which pushes roots inside the unit circle towards 0 and roots outside
towards infinity.  When one coefficient ``g_k`` of the iterate satisfies
``|g_k| >= 2 * sum_{i != k} |g_i|``, Rouché's theorem on the unit circle
gives exactly k roots in the open disc, and none on its boundary.

Arithmetic kernel
-----------------
Testing one disc with Arb is dominated by the Taylor shift and by Graeffe
steps on wide-exponent balls.  The subdivision only needs a few dozen bits
of relative accuracy on the dominant coefficient, so the work is done on
*local expansions*: coefficient midpoints in ``complex128`` with ``float64``
error radii that are rigorous upper bounds (every rounding is accounted
for).  Overall scale is irrelevant to the dominance test, so expansions are
renormalised by powers of two whenever convenient.

An expansion is computed from the oracle with Arb (an *anchor*), or derived
from the parent box's expansion by a fixed linear map.  When the radii grow
too large relative to the coefficients the engine re-anchors from the
oracle at a higher precision.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from flint import acb, acb_poly, arb

from .geometry import Box, Disc, containing_disc
from .numerics import rational_to_arb, working_precision
from .polynomial import OraclePolynomial

U = 2.0**-53
# Relative bound for the rounding error of any float sum or product of at
# most 4096 terms (we only handle degrees up to 1024).
ERR = 2.0**-40
# Absolute slack for underflow; expansions are normalised to max |coeff| ~ 1.
FLOOR = 2.0**-1000
MAX_DEGREE = 1024

# Graeffe iterations tried beyond N before giving up.  A root on a corner of
# a box sits at 0.943 of the containing disc radius, which N iterations
# cannot separate for small degrees.
EXTRA_ITERATIONS = 4

DEFAULT_L0 = 53
DEFAULT_LMAX = 53 * 64

# Re-anchor when the relative error of an expansion exceeds this.
_REL_REANCHOR = 2.0**-20
# An anchor is accepted only below this relative error (otherwise L doubles).
_REL_ACCEPT = 2.0**-32


@dataclass(frozen=True)
class CountResult:
    """Outcome of a counting test: -1 undecided, otherwise a certified count."""

    value: int

    def __post_init__(self):
        if self.value < -1:
            raise ValueError("count must be >= -1")

    @property
    def decided(self) -> bool:
        return self.value >= 0

    def __int__(self):
        return self.value

    def __eq__(self, other):
        if isinstance(other, CountResult):
            return self.value == other.value
        if isinstance(other, int):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash(self.value)


UNDECIDED = CountResult(-1)


def graeffe_iterations(d: int) -> int:
    """N = ceil(log2(1 + log2 d)) + 2, and 2 for d <= 1."""
    if d <= 1:
        return 2
    return math.ceil(math.log2(1 + math.log2(d))) + 2


@dataclass
class LocalExpansion:
    """Coefficients of ``s * P(c + r z)`` for an unknown scale ``s > 0``.

    ``mid[k] +- rad[k]`` encloses the k-th coefficient.  ``precision`` is the
    oracle precision of the anchor this expansion descends from.
    """

    mid: np.ndarray
    rad: np.ndarray
    precision: int

    @property
    def degree(self) -> int:
        return len(self.mid) - 1

    def relative_error(self) -> float:
        top = float(np.max(np.abs(self.mid)))
        if top == 0.0:
            return math.inf
        return float(np.max(self.rad)) / top


def _normalise(mid: np.ndarray, rad: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    top = float(np.max(np.abs(mid)))
    if top == 0.0 or not math.isfinite(top):
        return mid, rad
    e = math.frexp(top)[1]
    mid = np.ldexp(mid.real, -e) + 1j * np.ldexp(mid.imag, -e)
    # scaling by 2^-e is exact except for underflow, which FLOOR absorbs
    rad = np.ldexp(rad, -e) + FLOOR
    return mid, rad


# ---------------------------------------------------------------------------
# anchors


def _log2_abs_upper(q: Fraction) -> float:
    q = abs(q)
    if q == 0:
        return -math.inf
    return math.log2(q.numerator) - math.log2(q.denominator) + 1e-9


def _compose_precision(P: OraclePolynomial, center, radius: Fraction, L: int) -> int:
    mags = P.coefficient_log2_magnitudes()
    reach = abs(center[0]) + abs(center[1]) + radius
    lr = _log2_abs_upper(reach) if reach else -math.inf
    log_m = max(
        (m + j * lr if lr != -math.inf else (m if j == 0 else -math.inf))
        for j, m in enumerate(mags)
    )
    log_m = max(log_m, 0.0) + math.log2(len(mags))
    return L + math.ceil(log_m) + 32


def _acb_to_arrays(coeffs: list, d: int) -> tuple[np.ndarray, np.ndarray]:
    # exponent of the largest midpoint
    emax = None
    for c in coeffs:
        for part in (c.real, c.imag):
            man, exp = part.mid().man_exp()
            man = int(man)
            if man:
                e = int(exp) + man.bit_length()
                emax = e if emax is None or e > emax else emax
    if emax is None:
        emax = 0
    scale = acb(arb((1, -emax)))
    mid = np.zeros(d + 1, dtype=np.complex128)
    rad = np.zeros(d + 1)
    for k, c in enumerate(coeffs[: d + 1]):
        c = c * scale
        re, im = c.real, c.imag
        mr, mi = float(re.mid()), float(im.mid())
        mid[k] = complex(mr, mi)
        rr = float(re.rad()) + float(im.rad())
        if not math.isfinite(rr):
            rad[k] = math.inf
            continue
        rad[k] = rr * (1 + 2 * U) + (abs(mr) + abs(mi)) * U
    rad += FLOOR
    return mid, rad


def anchor(P: OraclePolynomial, center, radius: Fraction, L: int) -> LocalExpansion:
    """Expansion of P on D(center, radius) from an L-bit oracle approximation."""
    center = (Fraction(center[0]), Fraction(center[1]))
    radius = Fraction(radius)
    d = P.degree
    prec = _compose_precision(P, center, radius, L)
    with working_precision(prec):
        A = P.approximate(L)
        # non-dyadic inputs become tight balls; the enclosure then holds
        # for every center and radius inside them
        c = acb(rational_to_arb(center[0], prec), rational_to_arb(center[1], prec))
        r = acb(rational_to_arb(radius, prec))
        T = A.poly(acb_poly([c, r]))
        coeffs = list(T.coeffs())
    coeffs += [acb(0)] * (d + 1 - len(coeffs))
    mid, rad = _acb_to_arrays(coeffs, d)
    return LocalExpansion(mid, rad, L)


# ---------------------------------------------------------------------------
# derived expansions


@lru_cache(maxsize=None)
def _child_maps(d: int) -> tuple:
    """Matrices of z -> delta + z/2 for the four quadrants, in float.

    ``M[k, j] = C(j, k) delta^(j-k) 2^-k`` with ``delta = (+-1 +- i)/3``;
    the order matches :func:`quadrisect`.  Each entry is accurate to a
    relative 2^-42, so ``ERR * |M|`` bounds the representation error.
    """
    if d > MAX_DEGREE:
        raise ValueError(f"degree {d} exceeds supported maximum {MAX_DEGREE}")
    n = d + 1
    binom = np.zeros((n, n))
    binom[0, 0] = 1.0
    for j in range(1, n):
        binom[j, 0] = 1.0
        binom[j, 1:j + 1] = binom[j - 1, 0:j] + binom[j - 1, 1:j + 1]
    # binom[j, k] = C(j, k); transpose so rows index k
    B = binom.T
    idx = np.arange(n)
    diff = idx[None, :] - idx[:, None]  # j - k
    halves = np.ldexp(1.0, -idx)[:, None]
    maps = []
    for sx, sy in ((-1, -1), (1, -1), (-1, 1), (1, 1)):
        delta = complex(sx, sy) / 3
        powers = delta ** np.arange(n)
        D = np.where(diff >= 0, powers[np.clip(diff, 0, None)], 0)
        M = B * D * halves
        maps.append((M, np.abs(M)))
    return tuple(maps)


def child_expansion(T: LocalExpansion, quadrant: int) -> LocalExpansion:
    """Expansion on the containing disc of the ``quadrant``-th child box."""
    M, absM = _child_maps(T.degree)[quadrant]
    mid = M @ T.mid
    n = len(mid)
    rad = absM @ (T.rad + ERR * np.abs(T.mid)) * (1 + ERR) + n * FLOOR
    mid, rad = _normalise(mid, rad)
    return LocalExpansion(mid, rad, T.precision)


def scaled_expansion(T: LocalExpansion, factor: float) -> LocalExpansion:
    """Expansion of ``z -> T(factor * z)`` (disc radius times ``factor``)."""
    d = T.degree
    logs = np.arange(d + 1) * math.log2(factor)
    logs -= logs.max()
    w = np.exp2(logs)
    mid = T.mid * w
    rad = (T.rad + ERR * np.abs(T.mid)) * w * (1 + ERR) + FLOOR
    mid, rad = _normalise(mid, rad)
    return LocalExpansion(mid, rad, T.precision)


# ---------------------------------------------------------------------------
# Graeffe iteration and dominance


def _graeffe_float(mid: np.ndarray, rad: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d = len(mid) - 1
    E, O = mid[0::2], mid[1::2]
    rE, rO = rad[0::2], rad[1::2]
    aE, aO = np.abs(E), np.abs(O)

    def square(X, aX, rX):
        sq = np.convolve(X, X)
        abs_sq = np.convolve(aX, aX)
        err = (2 * np.convolve(aX, rX) + np.convolve(rX, rX) + ERR * abs_sq) * (1 + ERR)
        return sq, abs_sq, err

    e2, ae2, re2 = square(E, aE, rE)
    n = d + 1
    g = np.zeros(n, dtype=np.complex128)
    ag = np.zeros(n)
    rg = np.zeros(n)
    g[0:len(e2)] += e2
    ag[0:len(e2)] += ae2
    rg[0:len(e2)] += re2
    if len(O):
        o2, ao2, ro2 = square(O, aO, rO)
        g[1:1 + len(o2)] -= o2
        ag[1:1 + len(o2)] += ao2
        rg[1:1 + len(o2)] += ro2
    if d % 2:
        g = -g
    rg = (rg + ERR * ag) * (1 + ERR)
    return _normalise(g, rg)


def _dominance(mid: np.ndarray, rad: np.ndarray) -> tuple[int, bool]:
    """(k or -1, precision_limited)."""
    a = np.abs(mid)
    k = int(np.argmax(a))
    top = float(a[k])
    if top == 0.0 or not np.all(np.isfinite(rad)):
        return -1, True
    upper = (a + rad) * (1 + ERR)
    others = (float(np.sum(upper)) - float(upper[k])) * (1 + ERR) + float(upper[k]) * ERR
    lo_k = top * (1 - ERR) - float(rad[k])
    if lo_k > 0 and lo_k >= 2 * others:
        return k, False
    mids_only = top >= 2 * (float(np.sum(a)) - top) * (1 + ERR)
    limited = mids_only or float(np.max(rad)) > 2.0**-24 * top
    return -1, limited


def pellet_on_expansion(T: LocalExpansion) -> tuple[int, bool]:
    """Run the Graeffe iterations and the dominance test on an expansion.

    Returns ``(count, precision_limited)``; count is -1 when undecided.
    """
    d = T.degree
    if d == 0:
        return (0, False) if np.abs(T.mid[0]) > T.rad[0] else (-1, True)
    mid, rad = T.mid, T.rad
    N = graeffe_iterations(d)
    for i in range(N + EXTRA_ITERATIONS):
        mid, rad = _graeffe_float(mid, rad)
        if float(np.max(rad)) > 2.0**100:
            return -1, True
        if i + 1 >= N:
            k, limited = _dominance(mid, rad)
            if k >= 0 or limited:
                return k, limited
    return -1, False


def _graeffe_ball(p: acb_poly, d: int) -> acb_poly:
    c = p.coeffs()
    c += [acb(0)] * (d + 1 - len(c))
    even = acb_poly(c[0::2])
    odd = acb_poly(c[1::2])
    g = even * even - (odd * odd).left_shift(1)
    return -g if d % 2 else g


def ball_pellet(P: OraclePolynomial, center, radius, L: int) -> tuple[int, bool]:
    """The same test carried out entirely in Arb ball arithmetic.

    Slower than the float kernel but immune to its cancellation losses.
    Returns ``(count, precision_limited)``.
    """
    center = (Fraction(center[0]), Fraction(center[1]))
    radius = Fraction(radius)
    d = P.degree
    prec = _compose_precision(P, center, radius, L)
    with working_precision(prec):
        A = P.approximate(L)
        c = acb(rational_to_arb(center[0], prec), rational_to_arb(center[1], prec))
        r = acb(rational_to_arb(radius, prec))
        g = A.poly(acb_poly([c, r]))
        N = graeffe_iterations(d)
        for i in range(N + EXTRA_ITERATIONS):
            g = _graeffe_ball(g, d)
            if i + 1 < N:
                continue
            k, limited = _ball_dominance(g, d)
            if k >= 0 or limited:
                return k, limited
    return -1, False


def _ball_dominance(g: acb_poly, d: int) -> tuple[int, bool]:
    coeffs = g.coeffs()
    coeffs += [acb(0)] * (d + 1 - len(coeffs))
    mids = [x.mid().abs_upper() for x in coeffs]
    k = max(range(d + 1), key=lambda i: _log2_exact(mids[i]))
    others = sum((coeffs[i].abs_upper() for i in range(d + 1) if i != k), arb(0))
    lower = coeffs[k].abs_lower()
    if lower > 0 and lower >= 2 * others:
        return k, False
    top = mids[k]
    rest = sum((mids[i] for i in range(d + 1) if i != k), arb(0))
    mids_only = bool(top > 0 and top >= 2 * rest)
    return -1, mids_only


def _log2_exact(a: arb) -> float:
    man, exp = a.mid().man_exp()
    man = int(man)
    return -math.inf if man == 0 else int(exp) + math.log2(abs(man))


# ---------------------------------------------------------------------------
# engine


@dataclass
class CountingStats:
    tests: int = 0
    degree_cost: int = 0
    anchors: int = 0
    ball_tests: int = 0
    anchor_precisions: dict = field(default_factory=dict)
    time: float = 0.0

    def merge(self, other: "CountingStats"):
        self.tests += other.tests
        self.degree_cost += other.degree_cost
        self.anchors += other.anchors
        self.ball_tests += other.ball_tests
        for k, v in other.anchor_precisions.items():
            self.anchor_precisions[k] = self.anchor_precisions.get(k, 0) + v
        self.time += other.time


class CountingEngine:
    """Counts roots of one oracle polynomial in discs, reusing expansions.

    ``L0`` and ``Lmax`` bound the oracle precisions used by anchors; the
    ladder is ``L0 * 2**k``.
    """

    def __init__(self, P: OraclePolynomial, L0: int = DEFAULT_L0,
                 Lmax: int = DEFAULT_LMAX, stats: CountingStats | None = None):
        if L0 > Lmax:
            raise ValueError("L0 must not exceed Lmax")
        self.P = P
        self.L0 = L0
        self.Lmax = Lmax
        self.stats = stats if stats is not None else CountingStats()
        self._hint = L0

    def _anchor(self, center, radius, start: int) -> LocalExpansion | None:
        L = max(start, self.L0)
        last = None
        while L <= self.Lmax:
            T = anchor(self.P, center, radius, L)
            self.stats.anchors += 1
            self.stats.anchor_precisions[L] = self.stats.anchor_precisions.get(L, 0) + 1
            last = T
            if T.relative_error() <= _REL_ACCEPT:
                if L > self._hint:
                    self._hint = L
                return T
            L *= 2
        return last

    def expansion(self, center, radius) -> LocalExpansion | None:
        return self._anchor(center, radius, self._hint)

    def count(self, center, radius, T: LocalExpansion | None = None
              ) -> tuple[CountResult, LocalExpansion | None]:
        """Count roots in D(center, radius).

        ``T`` is an optional expansion for this disc (derived from a parent);
        the expansion actually used is returned for reuse by children.
        """
        t0 = time.perf_counter()
        self.stats.tests += 1
        self.stats.degree_cost += self.P.degree
        try:
            if self.P.degree == 0:
                return CountResult(0), T
            if T is None or T.relative_error() > _REL_REANCHOR:
                T = self.expansion(center, radius)
            elif T is not None:
                k, limited = pellet_on_expansion(T)
                if k >= 0 or not limited:
                    return CountResult(k), T
                T = self.expansion(center, radius)
            if T is None:
                return UNDECIDED, None
            k, limited = pellet_on_expansion(T)
            if k >= 0 or not limited:
                return CountResult(k), T
            # the float kernel lost too much to cancellation: redo in Arb
            return CountResult(self._ball_count(center, radius, T.precision)), T
        finally:
            self.stats.time += time.perf_counter() - t0

    def _ball_count(self, center, radius, L: int) -> int:
        while L <= self.Lmax:
            self.stats.ball_tests += 1
            k, limited = ball_pellet(self.P, center, radius, L)
            if k >= 0 or not limited:
                return k
            L *= 2
        return -1

    def count_disc(self, disc: Disc) -> CountResult:
        return self.count(disc.center, disc.radius)[0]

    def confirm_box(self, B: Box) -> CountResult:
        """Natural-cluster certificate for the containing disc of B."""
        D = containing_disc(B)
        m, T = self.count(D.center, D.radius)
        if m.value <= 0:
            return m
        T3 = scaled_expansion(T, 3.0) if T is not None else None
        m3, _ = self.count(D.center, 3 * D.radius, T3)
        return m if m3 == m else UNDECIDED


def pellet_test(P: OraclePolynomial, disc: Disc, L0: int = DEFAULT_L0,
                Lmax: int = DEFAULT_LMAX) -> CountResult:
    """Certified number of roots of P in ``disc``, or -1 when undecided."""
    return CountingEngine(P, L0, Lmax).count_disc(disc)


def count_with_confirmation(P: OraclePolynomial, B: Box, L0: int = DEFAULT_L0,
                            Lmax: int = DEFAULT_LMAX,
                            engine: CountingEngine | None = None) -> CountResult:
    """m >= 1 only when the containing disc of B and its 3-fold dilation agree."""
    engine = engine or CountingEngine(P, L0, Lmax)
    return engine.confirm_box(B)
