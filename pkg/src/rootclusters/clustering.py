"""Subdivision search for natural root clusters.

``cluster_pol`` explores a stack of boxes depth first.  Each box is tested
on its containing disc D: boxes with no roots are dropped, small boxes
whose disc D and 3D hold the same number m >= 1 of roots become clusters,
the others are quadrisected.  It stops once n clusters are found and hands
back the unexplored boxes, which is what the deflation driver builds on.

For real polynomials the search may skip boxes strictly below the real
axis and report the conjugate of every cluster found strictly above it.
"""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from flint import acb

from .counting import (
    DEFAULT_L0,
    DEFAULT_LMAX,
    CountingEngine,
    CountingStats,
    LocalExpansion,
    child_expansion,
    scaled_expansion,
)
from .geometry import (
    Box,
    Disc,
    ImaginarySign,
    clean_discs,
    containing_disc,
    disc_inside,
    discs_intersect,
    imaginary_sign,
    pairwise_disjoint,
    quadrisect,
)
from .numerics import arb_to_fraction, dyadic_to_arb, rational_to_arb, working_precision
from .polynomial import OraclePolynomial

# below eps * 2**-UNDERFLOW_BITS the search gives up on a box
UNDERFLOW_BITS = 60


class UnresolvableRegionError(RuntimeError):
    """Subdivision went far below eps without deciding a box."""

    def __init__(self, box: Box, message: str | None = None):
        self.box = box
        a, b = box.center
        super().__init__(
            message
            or f"unresolvable region near {float(a):.17g}{float(b):+.17g}i "
               f"(box width {float(box.width):.3g}); roots are clustered "
               "tighter than the working precision can separate"
        )


@dataclass(frozen=True)
class Cluster:
    disc: Disc
    multiplicity: int

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be >= 1")

    @property
    def center(self):
        return self.disc.center

    @property
    def radius(self):
        return self.disc.radius

    def conjugate(self) -> "Cluster":
        return Cluster(self.disc.conjugate(), self.multiplicity)


@dataclass
class SolveStats:
    depth: int = 0
    size: int = 0
    skipped_negative: int = 0
    negative_tested: int = 0
    counting: CountingStats = field(default_factory=CountingStats)
    timings: dict = field(default_factory=dict)
    refine_precisions: list = field(default_factory=list)
    passes: int = 0
    degrees: list = field(default_factory=list)
    # when set, every tested box is appended to ``boxes`` (for plotting)
    record_boxes: bool = False
    boxes: list = field(default_factory=list)

    @property
    def tests(self) -> int:
        return self.counting.tests

    @property
    def degree_cost(self) -> int:
        return self.counting.degree_cost

    def add_time(self, key: str, seconds: float):
        self.timings[key] = self.timings.get(key, 0.0) + seconds


class ClusterSet(Sequence):
    """Ordered clusters with pairwise disjoint discs, plus solver statistics."""

    def __init__(self, clusters: Iterable[Cluster] = (), stats: SolveStats | None = None):
        self._items: list[Cluster] = list(clusters)
        self.stats = stats if stats is not None else SolveStats()

    def __getitem__(self, i):
        return self._items[i]

    def __len__(self):
        return len(self._items)

    def __iter__(self) -> Iterator[Cluster]:
        return iter(self._items)

    def append(self, c: Cluster):
        self._items.append(c)

    def extend(self, cs: Iterable[Cluster]):
        self._items.extend(cs)

    @property
    def total_multiplicity(self) -> int:
        return sum(c.multiplicity for c in self._items)

    def is_disjoint(self) -> bool:
        return pairwise_disjoint([c.disc for c in self._items])

    def sorted(self) -> "ClusterSet":
        return ClusterSet(sorted(self._items, key=lambda c: (c.disc.center, c.disc.radius)),
                          self.stats)

    def __repr__(self):
        return f"ClusterSet({len(self)} clusters, {self.total_multiplicity} roots)"


@dataclass
class _Entry:
    box: Box
    depth: int
    parent: LocalExpansion | None = None
    quadrant: int = -1
    owner: int = 0


class SearchDomain:
    """Last-in first-out stack of boxes still to be explored."""

    def __init__(self, boxes: Iterable[Box] = ()):
        self._stack: list[_Entry] = [_Entry(B, 0) for B in reversed(list(boxes))]

    @classmethod
    def from_box(cls, B0: Box) -> "SearchDomain":
        return cls([B0])

    def push(self, entry: _Entry):
        self._stack.append(entry)

    def pop(self) -> _Entry:
        return self._stack.pop()

    def __len__(self):
        return len(self._stack)

    def __bool__(self):
        return bool(self._stack)

    @property
    def boxes(self) -> list[Box]:
        """Boxes in the order they will be explored."""
        return [e.box for e in reversed(self._stack)]

    def copy(self) -> "SearchDomain":
        D = SearchDomain()
        D._stack = [_Entry(e.box, e.depth) for e in self._stack]
        return D


def _found_covers(disc: Disc, found: Iterable[Cluster]) -> bool:
    """disc lies in 3D for a found natural cluster D, so it adds no new root."""
    return any(disc_inside(disc, K.disc.scaled(3)) for K in found)


def cluster_pol(
    Q: OraclePolynomial,
    D: SearchDomain,
    eps: Fraction,
    C: Sequence[Cluster] = (),
    n: int | float = math.inf,
    *,
    real_symmetry: bool = False,
    engine: CountingEngine | None = None,
    stats: SolveStats | None = None,
) -> tuple[ClusterSet, SearchDomain]:
    """Find at most n (one more with symmetry) eps-clusters of Q in D.

    ``C`` holds clusters found earlier whose roots Q no longer has.  The
    returned domain is empty unless the search stopped at n clusters, and
    every root of Q in D lies in a returned cluster or in the returned
    domain.  Clusters are natural for every polynomial whose roots are
    those of Q plus those inside C.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if real_symmetry and not getattr(Q, "is_real", False):
        raise ValueError("real symmetry needs a polynomial with real coefficients")
    stats = stats if stats is not None else SolveStats()
    engine = engine or CountingEngine(Q, stats=stats.counting)
    owner = id(engine)
    C = list(C)
    found: list[Cluster] = []
    floor = eps * Fraction(1, 1 << UNDERFLOW_BITS)
    t0 = time.perf_counter()

    while D:
        entry = D.pop()
        B = entry.box
        sign = imaginary_sign(B)
        if real_symmetry and sign is ImaginarySign.NEGATIVE:
            stats.skipped_negative += 1
            continue
        Delta = containing_disc(B)
        if _found_covers(Delta, C) or _found_covers(Delta, found):
            continue
        stats.size += 1
        stats.depth = max(stats.depth, entry.depth)
        if stats.record_boxes:
            stats.boxes.append(B)
        if sign is ImaginarySign.NEGATIVE:
            stats.negative_tested += 1

        T = None
        if entry.parent is not None and entry.owner == owner:
            T = child_expansion(entry.parent, entry.quadrant)
        m, T = engine.count(Delta.center, Delta.radius, T)
        m = m.value
        if m == 0:
            continue
        if m > 0 and sum(K.multiplicity for K in found if disc_inside(K.disc, Delta)) == m:
            continue

        if m > 0 and Delta.radius <= eps:
            three = Delta.scaled(3)
            if not any(discs_intersect(three, K.disc) for K in C) and not any(
                discs_intersect(Delta, K.disc) for K in found
            ):
                T3 = scaled_expansion(T, 3.0) if T is not None else None
                m3, _ = engine.count(three.center, three.radius, T3)
                if m3.value == m:
                    found.append(Cluster(Delta, m))
                    if real_symmetry and sign is ImaginarySign.POSITIVE:
                        mirror = Cluster(Delta.conjugate(), m)
                        hits = [K for K in C + found if discs_intersect(mirror.disc, K.disc)]
                        if not hits:
                            found.append(mirror)
                        elif not all(K.radius >= Delta.radius for K in hits):
                            raise AssertionError("conjugate cluster overlaps a smaller cluster")
                    if sum(K.multiplicity for K in found) == Q.degree:
                        # every root of Q is accounted for
                        D = SearchDomain()
                        break
                    if len(found) >= n:
                        break
                    continue

        if B.width < floor:
            raise UnresolvableRegionError(B)
        children = quadrisect(B)
        for q in (3, 2, 1, 0):
            D.push(_Entry(children[q], entry.depth + 1, T, q, owner))

    stats.add_time("cluster_pol", time.perf_counter() - t0)
    return ClusterSet(found, stats), D


# ---------------------------------------------------------------------------
# refinement


def _round_dyadic(x: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction(round(x * scale), scale)


class Refiner:
    """Shrinks natural clusters of P to radius 2**-L.

    A Schröder step ``x <- x - m P(x)/P'(x)`` is iterated from the cluster
    center and the result certified by counting m roots in D(x, 2^-L) and
    in D(x, 3 * 2^-L), with D(x, 3 * 2^-L) inside 3D for the original disc
    D.  Clusters that do not converge (several distinct roots closer than
    the cluster radius) are split by subdivision and refined again.
    """

    def __init__(self, P: OraclePolynomial, engine: CountingEngine | None = None,
                 stats: SolveStats | None = None):
        self.P = P
        self.stats = stats if stats is not None else SolveStats()
        self.engine = engine or CountingEngine(P, stats=self.stats.counting)
        self._cache: dict[tuple[Cluster, int], list[Cluster]] = {}

    def refine(self, C: Iterable[Cluster], L: int) -> ClusterSet:
        if L <= 1:
            raise ValueError("L must be > 1")
        t0 = time.perf_counter()
        out = ClusterSet(stats=self.stats)
        for K in C:
            out.extend(self._refine_one(K, L))
        self.stats.add_time("refine", time.perf_counter() - t0)
        return out

    def _refine_one(self, K: Cluster, L: int) -> list[Cluster]:
        target = Fraction(1, 1 << L)
        if K.radius <= target:
            return [K]
        key = (K, L)
        if key not in self._cache:
            one = self._newton(K, L)
            res = [one] if one is not None else self._split(K, L)
            self._cache[key] = res
        return self._cache[key]

    def finest(self, K: Cluster) -> list[Cluster]:
        """The most refined version of K computed so far (K itself if none)."""
        levels = [L for (k, L) in self._cache if k == K]
        return self._cache[(K, max(levels))] if levels else [K]

    def _newton(self, K: Cluster, L: int) -> Cluster | None:
        P = self.P
        m = K.multiplicity
        rho = Fraction(1, 1 << L)
        c = K.center
        reach = max(1.0, abs(float(c[0])) + abs(float(c[1])) + float(K.radius))
        prec = 2 * L + P.max_coefficient_bits() + math.ceil(P.degree * math.log2(reach)) + 64
        A = P.approximate(prec)
        with working_precision(prec):
            poly = A.poly
            dpoly = poly.derivative()
            x = acb(rational_to_arb(c[0], prec), rational_to_arb(c[1], prec)).mid()
            tol = dyadic_to_arb(Fraction(1, 1 << (L + 4)))
            ok = False
            for _ in range(4 * L.bit_length() + 40):
                v = poly(x)
                if v.is_zero():
                    ok = True
                    break
                dv = dpoly(x)
                if dv.is_zero():
                    break
                step = (m * v / dv).mid()
                x = (x - step).mid()
                if step.abs_upper() < tol:
                    ok = True
                    break
        if not ok:
            return None
        cx = (_round_dyadic(arb_to_fraction(x.real), L + 8),
              _round_dyadic(arb_to_fraction(x.imag), L + 8))
        inner = Disc(cx, rho)
        if not disc_inside(inner.scaled(3), K.disc.scaled(3)):
            return None
        m1, T = self.engine.count(inner.center, inner.radius)
        if m1.value != m:
            return None
        T3 = scaled_expansion(T, 3.0) if T is not None else None
        m3, _ = self.engine.count(inner.center, 3 * rho, T3)
        if m3.value != m:
            return None
        return Cluster(inner, m)

    def _split(self, K: Cluster, L: int) -> list[Cluster]:
        r = K.radius
        eps = max(Fraction(1, 1 << L), r / (1 << 16))
        box = Box(K.center, 4 * r)
        found, rest = cluster_pol(self.P, SearchDomain.from_box(box), eps,
                                  engine=self.engine, stats=SolveStats(counting=self.stats.counting))
        if rest or found.total_multiplicity != K.multiplicity:
            raise UnresolvableRegionError(
                box, f"could not refine cluster of multiplicity {K.multiplicity}")
        out = []
        for sub in found:
            out.extend(self._refine_one(sub, L))
        return out


def cluster_cover(C: Iterable[Cluster], refiner: Refiner) -> list[Cluster]:
    """Replace each cluster by its finest known refinement."""
    out: list[Cluster] = []
    for K in C:
        out.extend(refiner.finest(K))
    return out


def refine(C: Iterable[Cluster], L: int, P: OraclePolynomial) -> ClusterSet:
    """Clusters of radius <= 2**-L holding exactly the roots of P in C."""
    return Refiner(P).refine(C, L)


# ---------------------------------------------------------------------------
# drivers


def resolve_symmetry(P: OraclePolynomial, real_symmetry, B0: Box | None = None) -> bool:
    """Map on/off/auto (or booleans, None = auto) to a boolean.

    The shortcut relies on the search region being its own mirror image, so
    it is switched off (with a warning when explicitly requested) for a
    region not centered on the real axis.
    """
    symmetric_roi = B0 is None or B0.center[1] == 0
    if real_symmetry in (None, "auto"):
        return bool(getattr(P, "is_real", False)) and symmetric_roi
    if real_symmetry in (True, "on"):
        if not getattr(P, "is_real", False):
            raise ValueError("real symmetry requested for a non-real polynomial")
        if not symmetric_roi:
            warnings.warn("region is not symmetric about the real axis; "
                          "real symmetry disabled", stacklevel=3)
            return False
        return True
    if real_symmetry in (False, "off"):
        return False
    raise ValueError(f"bad real_symmetry value {real_symmetry!r}")


def solve_lcp(P: OraclePolynomial, B0: Box, eps, *, real_symmetry=None,
              L0: int = DEFAULT_L0, Lmax: int = DEFAULT_LMAX,
              record_boxes: bool = False) -> ClusterSet:
    """Natural eps-clusters covering the roots of P in B0.

    Real symmetry defaults to on for polynomials with real coefficients.
    """
    eps = Fraction(eps)
    sym = resolve_symmetry(P, real_symmetry, B0)
    stats = SolveStats(record_boxes=record_boxes)
    stats.degrees = [P.degree]
    engine = CountingEngine(P, L0, Lmax, stats=stats.counting)
    t0 = time.perf_counter()
    found, rest = cluster_pol(P, SearchDomain.from_box(B0), eps, (), math.inf,
                              real_symmetry=sym, engine=engine, stats=stats)
    assert not rest
    kept = clean_discs([(K.disc, K.multiplicity) for K in found])
    stats.add_time("total", time.perf_counter() - t0)
    stats.passes = 1
    return ClusterSet([Cluster(d, m) for d, m in kept], stats)


def subdivision_stats(result: ClusterSet) -> tuple[int, int]:
    """(depth, size) of the subdivision tree explored to produce ``result``."""
    return result.stats.depth, result.stats.size
