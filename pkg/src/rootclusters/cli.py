"""Command-line front end.

Reads a polynomial (a file in the ``degree d`` text format or a
``builtin:<family>:<d>[:a]`` specifier), clusters its roots in a square
region and writes the clusters as JSON or CSV, optionally with an SVG
picture and a statistics table.

Exit status: 0 on success, 2 when a region cannot be resolved, 1 on bad
arguments or unreadable input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .benchmarks import parse_family_spec
from .clustering import ClusterSet, UnresolvableRegionError, solve_lcp
from .counting import DEFAULT_L0, DEFAULT_LMAX
from .deflation import DeflationError, cluster_with_deflation
from .geometry import Box
from .numerics import is_dyadic
from .polynomial import PolynomialFormatError, read_polynomial_file

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNRESOLVED = 2

PHASES = ("total", "oracle_for_q", "refine", "power_sums_to_coeffs")


class UsageError(Exception):
    pass


def dyadic_to_decimal(q: Fraction) -> str:
    """Exact decimal expansion of a dyadic rational."""
    q = Fraction(q)
    if not is_dyadic(q):
        raise ValueError(f"{q} is not dyadic")
    sign = "-" if q < 0 else ""
    num, den = abs(q.numerator), q.denominator
    k = den.bit_length() - 1
    if k == 0:
        return f"{sign}{num}"
    digits = str(num * 5**k).rjust(k + 1, "0")
    whole, frac = digits[:-k], digits[-k:].rstrip("0")
    return f"{sign}{whole}.{frac}" if frac else f"{sign}{whole}"


def parse_eps(text: str) -> Fraction:
    """``2^-k`` or a positive decimal/rational."""
    t = text.strip().replace("**", "^")
    try:
        if t.startswith("2^"):
            eps = Fraction(2) ** int(t[2:])
        else:
            eps = Fraction(t)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse eps {text!r}") from None
    if eps <= 0:
        raise UsageError("eps must be positive")
    return eps


def parse_roi(text: str) -> Box:
    parts = text.split(",")
    if len(parts) != 4:
        raise UsageError("--roi needs xmin,xmax,ymin,ymax")
    try:
        vals = [Fraction(p.strip()) for p in parts]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse roi {text!r}") from None
    if not all(is_dyadic(v) for v in vals):
        raise UsageError("roi bounds must be dyadic (finite binary fractions)")
    xmin, xmax, ymin, ymax = vals
    if xmax <= xmin or ymax <= ymin:
        raise UsageError("roi bounds must satisfy xmin < xmax and ymin < ymax")
    try:
        return Box.from_bounds(xmin, xmax, ymin, ymax)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def load_polynomial(spec: str):
    """An oracle for ``spec``: a file path or a builtin family specifier."""
    if spec.startswith("builtin:"):
        try:
            return parse_family_spec(spec).build()
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    try:
        return read_polynomial_file(spec)
    except OSError as exc:
        raise UsageError(f"cannot read {spec}: {exc.strerror or exc}") from None
    except PolynomialFormatError as exc:
        raise UsageError(f"{spec}: {exc}") from None


@dataclass
class RunReport:
    """Result of one run, ready for serialisation."""

    degree: int
    clusters: list  # (center_re, center_im, radius) as Fractions, multiplicity
    stats: dict = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)
    boxes: list = field(default_factory=list)

    @classmethod
    def from_result(cls, degree: int, result: ClusterSet, parameters: dict) -> "RunReport":
        clusters = [(K.center[0], K.center[1], K.radius, K.multiplicity)
                    for K in result.sorted()]
        st = result.stats
        stats = {
            "depth": st.depth,
            "size": st.size,
            "maxprec": maxprec([c[2] for c in clusters]),
            "tests": st.tests,
            "degree_cost": st.degree_cost,
            "passes": st.passes,
            "degrees": list(st.degrees),
            "refine_precisions": sorted(set(st.refine_precisions)),
            "skipped_negative": st.skipped_negative,
            "timings": {k: round(st.timings.get(k, 0.0), 6) for k in PHASES},
        }
        return cls(degree, clusters, stats, parameters, list(st.boxes))

    @property
    def total_multiplicity(self) -> int:
        return sum(c[3] for c in self.clusters)

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "clusters": [
                {"center": [dyadic_to_decimal(re), dyadic_to_decimal(im)],
                 "radius": dyadic_to_decimal(r), "multiplicity": m}
                for re, im, r, m in self.clusters
            ],
            "stats": self.stats,
            "parameters": self.parameters,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["re", "im", "radius", "multiplicity"])
        for re, im, r, m in self.clusters:
            w.writerow([dyadic_to_decimal(re), dyadic_to_decimal(im), dyadic_to_decimal(r), m])
        return buf.getvalue()

    def stats_table(self) -> str:
        s = self.stats
        rows = [
            ("degree", self.degree),
            ("clusters", len(self.clusters)),
            ("roots", self.total_multiplicity),
            ("depth", s["depth"]),
            ("size", s["size"]),
            ("counting tests", s["tests"]),
            ("degree cost", s["degree_cost"]),
            ("maxprec", s["maxprec"]),
        ]
        rows += [(f"time {k} (s)", f"{v:.3f}") for k, v in s["timings"].items()]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v}" for k, v in rows) + "\n"


def maxprec(radii: Sequence[Fraction]):
    """-ceil(log2 r) for the smallest radius r, or None without clusters."""
    if not radii:
        return None
    r = min(radii)
    # exact ceil(log2 r) for a positive rational
    k = r.numerator.bit_length() - r.denominator.bit_length()
    if Fraction(2) ** k < r:
        k += 1
    elif Fraction(2) ** (k - 1) >= r:
        k -= 1
    return -k


# ---------------------------------------------------------------------------
# SVG


SVG_SIZE = 640
MARGIN = 20
MIN_DISC_PX = 3.0


def _fmt(x: float) -> str:
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def emit_plot(report: RunReport, roi: Box, path, boxes: Sequence[Box] = ()):
    """Write a deterministic SVG of the clusters inside the region ``roi``."""
    x0, x1, y0, y1 = (float(v) for v in roi.bounds)
    inner = SVG_SIZE - 2 * MARGIN
    scale = inner / (x1 - x0)

    def px(x, y):
        return MARGIN + (x - x0) * scale, MARGIN + (y1 - y) * scale

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" '
        f'viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<rect class="roi" x="{MARGIN}" y="{MARGIN}" width="{inner}" height="{inner}" '
        'fill="none" stroke="black" stroke-width="1"/>',
    ]
    if boxes:
        out.append('<g class="boxes" fill="none" stroke="#9ab" stroke-width="0.3">')
        for B in sorted(boxes):
            bx0, bx1, by0, by1 = (float(v) for v in B.bounds)
            x, y = px(bx0, by1)
            w = (bx1 - bx0) * scale
            out.append(f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" height="{_fmt(w)}"/>')
        out.append("</g>")
    # real and imaginary axes when they cross the region
    if x0 < 0 < x1:
        ax, _ = px(0, 0)
        out.append(f'<line class="axis" x1="{_fmt(ax)}" y1="{MARGIN}" x2="{_fmt(ax)}" '
                   f'y2="{MARGIN + inner}" stroke="#ccc" stroke-width="0.5"/>')
    if y0 < 0 < y1:
        _, ay = px(0, 0)
        out.append(f'<line class="axis" x1="{MARGIN}" y1="{_fmt(ay)}" x2="{MARGIN + inner}" '
                   f'y2="{_fmt(ay)}" stroke="#ccc" stroke-width="0.5"/>')
    out.append('<g class="clusters">')
    for re, im, r, m in report.clusters:
        cx, cy = px(float(re), float(im))
        rad = max(float(r) * scale, MIN_DISC_PX)
        color = "#c22" if m > 1 else "#225"
        out.append(f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(rad)}" '
                   f'fill="{color}" fill-opacity="0.6" stroke="{color}"/>')
        if m > 1:
            out.append(f'<text x="{_fmt(cx + rad + 2)}" y="{_fmt(cy - rad - 2)}" '
                       f'font-size="11" font-family="sans-serif">{m}</text>')
    out.append("</g>")
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rootclusters",
                description="Natural epsilon-clusters of the roots of a polynomial in a square region.")
    p.add_argument("--poly", required=True,
                   help="polynomial file, or builtin:<family>:<d>[:a] with family one of "
                        "bernoulli, mignotte, mandelbrot, spiral")
    p.add_argument("--roi", required=True, help="square region xmin,xmax,ymin,ymax (dyadic)")
    p.add_argument("--eps", default="2^-53", help="cluster radius bound, 2^-k or a decimal (default 2^-53)")
    p.add_argument("--mode", choices=("plain", "deflate"), default="plain")
    p.add_argument("--n", default="auto", help="clusters per deflation pass, or auto = floor(d/8)")
    p.add_argument("--real-symmetry", choices=("on", "off", "auto"), default="auto")
    p.add_argument("--output", choices=("json", "csv"), default="json")
    p.add_argument("--plot", metavar="PATH", help="write an SVG picture of the clusters")
    p.add_argument("--plot-boxes", action="store_true", help="draw the subdivision boxes in the plot")
    p.add_argument("--stats", action="store_true", help="print a statistics table on stderr")
    p.add_argument("--lmax", type=int, default=DEFAULT_LMAX, help=argparse.SUPPRESS)
    return p


def _parse_n(text: str, degree: int) -> int:
    if text == "auto":
        return max(1, degree // 8)
    try:
        n = int(text)
    except ValueError:
        raise UsageError(f"--n must be an integer or auto, got {text!r}") from None
    if n < 1:
        raise UsageError("--n must be at least 1")
    return n


def _attach_values(argv: Sequence[str]) -> list[str]:
    """Join ``--roi -1,1,-1,1`` into ``--roi=-1,1,-1,1``.

    argparse would otherwise read a leading minus as the start of an option.
    """
    out: list[str] = []
    it = iter(argv)
    for a in it:
        if a in ("--roi", "--eps"):
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_attach_values(argv))
    try:
        eps = parse_eps(args.eps)
        roi = parse_roi(args.roi)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            P = load_polynomial(args.poly)
        for w in caught:
            print(f"warning: {w.message}", file=stderr)
        n = _parse_n(args.n, P.degree)
    except UsageError as exc:
        print(f"rootclusters: error: {exc}", file=stderr)
        return EXIT_USAGE

    if args.plot:
        parent = Path(args.plot).resolve().parent
        if not parent.is_dir() or not os.access(parent, os.W_OK) or Path(args.plot).is_dir():
            print(f"rootclusters: error: cannot write {args.plot}", file=stderr)
            return EXIT_USAGE

    sym = args.real_symmetry
    params = {"poly": args.poly, "roi": args.roi, "eps": args.eps, "mode": args.mode,
              "real_symmetry": sym}
    if args.mode == "deflate":
        params["n"] = n
    try:
        if args.mode == "plain":
            result = solve_lcp(P, roi, eps, real_symmetry=sym, L0=DEFAULT_L0, Lmax=args.lmax,
                               record_boxes=args.plot_boxes)
        else:
            result = cluster_with_deflation(P, roi, eps, n, real_symmetry=sym, L0=DEFAULT_L0,
                                            Lmax=args.lmax, record_boxes=args.plot_boxes)
    except UnresolvableRegionError as exc:
        print(f"rootclusters: unresolvable region: {exc}", file=stderr)
        return EXIT_UNRESOLVED
    except DeflationError as exc:
        print(f"rootclusters: deflation failed: {exc}", file=stderr)
        return EXIT_UNRESOLVED

    report = RunReport.from_result(P.degree, result, params)
    stdout.write(report.to_json() if args.output == "json" else report.to_csv())
    if args.stats:
        stderr.write(report.stats_table())
    if args.plot:
        try:
            emit_plot(report, roi, args.plot, report.boxes)
        except OSError as exc:
            print(f"rootclusters: error: cannot write {args.plot}: {exc.strerror}", file=stderr)
            return EXIT_USAGE
    return EXIT_OK


def main() -> int:
    return run()


if __name__ == "__main__":
    sys.exit(main())
