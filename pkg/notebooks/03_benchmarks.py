# %% [markdown]
# # The benchmark families
#
# Four families with known structure: Bernoulli (real, roots spread along
# the real axis and two arms), Mignotte (two roots very close to 1/2**k),
# Mandelbrot (roots on the Mandelbrot boundary, from the recurrence
# p_{k+1} = z p_k^2 + 1) and Spiral (roots on a spiral in the unit disc).
# Each run writes an SVG picture of the clusters into ``out/``.

# %%
import time
from fractions import Fraction
from pathlib import Path

from rootclusters import Box, bernoulli, mandelbrot, mignotte, solve_lcp, spiral
from rootclusters.cli import RunReport, emit_plot

out = Path(__file__).resolve().parent / "out"
out.mkdir(exist_ok=True)
eps = Fraction(1, 2**53)

cases = [
    ("bernoulli32", bernoulli(32), Box.from_bounds(-50, 50, -50, 50)),
    ("mignotte32", mignotte(32, 8), Box.from_bounds(-4, 4, -4, 4)),
    ("mandelbrot31", mandelbrot(31), Box.from_bounds(-4, 4, -4, 4)),
    ("spiral32", spiral(32), Box.from_bounds(-2, 2, -2, 2)),
]
for name, P, roi in cases:
    t0 = time.perf_counter()
    res = solve_lcp(P, roi, eps, record_boxes=True)
    dt = time.perf_counter() - t0
    report = RunReport.from_result(P.degree, res, {"eps": str(eps)})
    emit_plot(report, roi, out / f"{name}.svg", boxes=res.stats.boxes)
    mults = sorted({K.multiplicity for K in res})
    print(f"{name:13s} {len(res):3d} clusters, multiplicities {mults}, "
          f"{res.stats.size:5d} boxes, maxprec {report.stats['maxprec']}, {dt:.1f}s")

# %% [markdown]
# Bernoulli polynomials have real coefficients, so roots come in conjugate
# pairs.  With a region of interest centered on the real axis, boxes below
# the axis need not be searched: the upper half is solved and mirrored.

# %%
roi = Box.from_bounds(-50, 50, -50, 50)
sym = solve_lcp(bernoulli(32), roi, eps, real_symmetry="on")
plain = solve_lcp(bernoulli(32), roi, eps, real_symmetry="off")
print("boxes with symmetry:", sym.stats.size, " without:", plain.stats.size,
      f" ({100 * sym.stats.size / plain.stats.size:.0f}%)")
print("pictures in", out)
