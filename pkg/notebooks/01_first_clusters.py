# %% [markdown]
# # Clusters of roots, first steps
#
# A cluster is a disc together with the number of roots it holds, counted
# with multiplicity.  It is *natural* when the disc three times larger holds
# the same roots.  `solve_lcp` finds natural clusters of radius at most eps
# covering every root inside a square region.

# %%
from fractions import Fraction

from rootclusters import Box, ExactPolynomial, oracle_roots, solve_lcp

eps = Fraction(1, 2**53)

# z^2 + 1 has roots at +i and -i
P = ExactPolynomial([1, 0, 1])
res = solve_lcp(P, Box.from_bounds(-2, 2, -2, 2), eps)
for K in res:
    print(float(K.center[0]), float(K.center[1]), float(K.radius), K.multiplicity)

# %% [markdown]
# Real coefficients mean roots come in conjugate pairs, so only the upper
# half of the region needs searching.  The statistics show how many boxes
# were tested and how many lower-half boxes were skipped.

# %%
off = solve_lcp(P, Box.from_bounds(-2, 2, -2, 2), eps, real_symmetry="off")
print("tested boxes with symmetry:", res.stats.size, " without:", off.stats.size)
print("lower-half boxes skipped:", res.stats.skipped_negative)

# %% [markdown]
# Multiple roots do not split: (z - 1/2)^3 (z + 1) gives one cluster of
# multiplicity 3, however small eps is.

# %%
# z^4 - z^3/2 - 3 z^2/4 + 5 z/8 - 1/8, ascending order
Q = ExactPolynomial([Fraction(-1, 8), Fraction(5, 8), Fraction(-3, 4), Fraction(-1, 2), 1])
for K in solve_lcp(Q, Box((0, 0), 4), eps):
    print(f"{float(K.center[0]):+.6f}{float(K.center[1]):+.2e}i  m={K.multiplicity}")

# %% [markdown]
# An independent check: the mpmath root oracle finds the same structure.

# %%
for r in oracle_roots(Q):
    print(f"{r.value:.6f}  multiplicity {r.multiplicity}")

# %% [markdown]
# Two roots closer than eps end up in one cluster; farther apart they are
# separated.  Mignotte polynomials z^d - 2 (2^a z - 1)^2 have two roots
# about 2^-(a(d+2)/2) apart near 2^-a.

# %%
from rootclusters import mignotte

M = mignotte(16, 4)
for k in (10, 53):
    out = solve_lcp(M, Box.from_bounds(-4, 4, -4, 4), Fraction(1, 2**k))
    print(f"eps=2^-{k}:", len(out), "clusters,", out.total_multiplicity, "roots,",
          "multiplicities", sorted({K.multiplicity for K in out}))
