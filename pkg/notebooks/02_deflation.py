# %% [markdown]
# # Deflation through power sums
#
# Once some clusters are known, the roots still to be found are the roots
# of a lower-degree factor Q of P.  Its coefficients come from power sums:
# those of all roots of P (Newton identities on P's coefficients) minus the
# contribution of every known cluster, converted back to coefficients.

# %%
from fractions import Fraction

from rootclusters import (
    Box,
    Cluster,
    Disc,
    ExactPolynomial,
    bernoulli,
    cluster_with_deflation,
    coeffs_to_power_sums,
    oracle_for_q,
    power_sums_to_coeffs,
    solve_lcp,
)

# roots 1 and 2: power sums 3 and 5
ps = coeffs_to_power_sums(ExactPolynomial([2, -3, 1]), 2, 53)
print([str(v) for v in ps.values])
Q, Lres = power_sums_to_coeffs(ps, 53, 2)
print([str(c) for c in Q.coefficients], "L' =", Lres)

# %% [markdown]
# Removing the root 3 from (z-1)(z-2)(z-3) gives z^2 - 3z + 2.  The cluster
# is refined internally before its contribution is subtracted.

# %%
P = ExactPolynomial([-6, 11, -6, 1])
Q = oracle_for_q(P, [Cluster(Disc((3, 0), Fraction(1, 8)), 1)], 53)
for c in Q.coefficients:
    print(c)

# %% [markdown]
# On a full run, deflation trades counting tests on the degree-d
# polynomial for tests on lower-degree factors.  The degree-weighted test
# cost is the sum of the degrees of the polynomials the tests ran on.

# %%
roi = Box.from_bounds(-150, 150, -150, 150)
eps = Fraction(1, 2**53)
B = bernoulli(64)
plain = solve_lcp(B, roi, eps)
defl = cluster_with_deflation(bernoulli(64), roi, eps, 8)
print("clusters:", len(plain), len(defl))
print("degree cost plain  :", plain.stats.degree_cost)
print("degree cost deflate:", defl.stats.degree_cost)
print("degrees of the deflated factors:", defl.stats.degrees)
print("refinement precisions used:", sorted(set(defl.stats.refine_precisions)))
