"""Square boxes, discs and the clean procedure.

All coordinates are exact dyadic rationals, so quadrisection never rounds.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

Point = tuple[Fraction, Fraction]


@dataclass(frozen=True, order=True)
class Disc:
    center: Point
    radius: Fraction

    def __post_init__(self):
        object.__setattr__(self, "center", (Fraction(self.center[0]), Fraction(self.center[1])))
        object.__setattr__(self, "radius", Fraction(self.radius))
        if self.radius <= 0:
            raise ValueError("disc radius must be positive")

    def scaled(self, factor) -> "Disc":
        """The disc with the same center and ``factor`` times the radius."""
        return Disc(self.center, self.radius * Fraction(factor))

    def contains_point(self, z: Point) -> bool:
        dx, dy = z[0] - self.center[0], z[1] - self.center[1]
        return dx * dx + dy * dy <= self.radius * self.radius

    def conjugate(self) -> "Disc":
        return Disc((self.center[0], -self.center[1]), self.radius)


@dataclass(frozen=True, order=True)
class Box:
    """Square ``[a - w/2, a + w/2] + i[b - w/2, b + w/2]``."""

    center: Point
    width: Fraction

    def __post_init__(self):
        object.__setattr__(self, "center", (Fraction(self.center[0]), Fraction(self.center[1])))
        object.__setattr__(self, "width", Fraction(self.width))
        if self.width <= 0:
            raise ValueError("box width must be positive")

    @classmethod
    def from_bounds(cls, xmin, xmax, ymin, ymax) -> "Box":
        xmin, xmax, ymin, ymax = map(Fraction, (xmin, xmax, ymin, ymax))
        if xmax - xmin != ymax - ymin:
            raise ValueError("region of interest must be a square")
        return cls(((xmin + xmax) / 2, (ymin + ymax) / 2), xmax - xmin)

    @property
    def bounds(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        h = self.width / 2
        a, b = self.center
        return a - h, a + h, b - h, b + h

    def corners(self) -> list[Point]:
        x0, x1, y0, y1 = self.bounds
        return [(x0, y0), (x1, y0), (x0, y1), (x1, y1)]

    def contains_point(self, z: Point) -> bool:
        x0, x1, y0, y1 = self.bounds
        return x0 <= z[0] <= x1 and y0 <= z[1] <= y1

    def scaled(self, factor) -> "Box":
        return Box(self.center, self.width * Fraction(factor))


class ImaginarySign(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    MIXED = "mixed"


def quadrisect(B: Box) -> list[Box]:
    """The four children of B: centers (a +- w/4) + i(b +- w/4), width w/2."""
    a, b = B.center
    q = B.width / 4
    h = B.width / 2
    return [
        Box((a - q, b - q), h),
        Box((a + q, b - q), h),
        Box((a - q, b + q), h),
        Box((a + q, b + q), h),
    ]


def containing_disc(B: Box) -> Disc:
    """Disc of radius (3/4)·width centered at B's center; it covers B."""
    return Disc(B.center, B.width * Fraction(3, 4))


def conjugate_box(B: Box) -> Box:
    return Box((B.center[0], -B.center[1]), B.width)


def imaginary_sign(B: Box) -> ImaginarySign:
    half = B.width / 2
    b = B.center[1]
    if b - half > 0:
        return ImaginarySign.POSITIVE
    if b + half < 0:
        return ImaginarySign.NEGATIVE
    return ImaginarySign.MIXED


def _dist2(p: Point, q: Point) -> Fraction:
    dx, dy = p[0] - q[0], p[1] - q[1]
    return dx * dx + dy * dy


def discs_intersect(D1: Disc, D2: Disc) -> bool:
    """True when the closed discs share at least one point."""
    s = D1.radius + D2.radius
    return _dist2(D1.center, D2.center) <= s * s


def disc_inside(inner: Disc, outer: Disc) -> bool:
    """True when ``inner`` is a subset of ``outer``."""
    gap = outer.radius - inner.radius
    return gap >= 0 and _dist2(inner.center, outer.center) <= gap * gap


def pairwise_disjoint(discs: Sequence[Disc]) -> bool:
    return not any(
        discs_intersect(discs[i], discs[j])
        for i in range(len(discs))
        for j in range(i + 1, len(discs))
    )


def clean_discs(items: Iterable[tuple[Disc, int]]) -> list[tuple[Disc, int]]:
    """Keep the largest disc of every overlapping group.

    Each input disc must be natural (same roots in D and 3D).  Discs are
    visited by decreasing radius, ties broken by the center's real then
    imaginary part; a disc is kept only if it misses every disc kept so
    far.  A dropped disc meets a kept disc at least as large, so its roots
    already lie in that kept disc.
    """
    pending = sorted(items, key=lambda it: (-it[0].radius, it[0].center))
    kept: list[tuple[Disc, int]] = []
    for disc, m in pending:
        if all(not discs_intersect(disc, other) for other, _ in kept):
            kept.append((disc, m))
    return kept


def clean(Q: Iterable[tuple[Box, int]]) -> list[tuple[Box, int]]:
    """Subset of boxes whose containing discs are pairwise disjoint."""
    by_disc = {}
    items = []
    for B, m in Q:
        D = containing_disc(B)
        by_disc.setdefault((D, m), B)
        items.append((D, m))
    return [(by_disc[(D, m)], m) for D, m in clean_discs(items)]
