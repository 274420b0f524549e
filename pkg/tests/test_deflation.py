import random
from fractions import Fraction

import pytest
from flint import acb, arb

from rootclusters import deflation
from rootclusters.benchmarks import bernoulli, mandelbrot, oracle_roots
from rootclusters.clustering import Cluster, solve_lcp
from rootclusters.deflation import (
    DeflatedOracle,
    DeflationError,
    PowerSumVector,
    cluster_with_deflation,
    coeffs_to_power_sums,
    oracle_for_q,
    power_sums_to_coeffs,
)
from rootclusters.geometry import Box, Disc, discs_intersect
from rootclusters.numerics import working_precision
from rootclusters.polynomial import ExactPolynomial

from lcp_check import lcp_violations
from lcp_corpus import random_case
from test_counting import from_roots

EPS = Fraction(1, 2**53)


def frac_ball(q: Fraction):
    with working_precision(300):
        return acb(arb(q.numerator) / q.denominator)


def test_power_sum_examples():
    ps = coeffs_to_power_sums(ExactPolynomial([2, -3, 1]), 2, 53)
    assert ps[0].contains(acb(3)) and ps[1].contains(acb(5))
    zero = coeffs_to_power_sums(ExactPolynomial([0, 0, 0, 0, 1]), 3, 53)
    assert all(v.contains(acb(0)) for v in zero.values)
    b2 = coeffs_to_power_sums(bernoulli(2), 2, 80)
    assert b2[0].contains(acb(1)) and b2[1].overlaps(frac_ball(Fraction(2, 3)))
    assert b2.precision() >= 80
    with pytest.raises(ValueError):
        coeffs_to_power_sums(ExactPolynomial([2, -3, 1]), 3, 53)


def test_power_sums_to_coeffs_examples():
    Q, Lp = power_sums_to_coeffs(PowerSumVector((acb(3), acb(5))), 53, 2)
    assert [Q[k].contains(acb(v)) for k, v in enumerate([2, -3, 1])] == [True] * 3
    Z, _ = power_sums_to_coeffs(PowerSumVector(tuple(acb(0) for _ in range(5))), 53, 5)
    assert Z.degree == 5 and all(Z[k].contains(acb(0)) for k in range(5))
    with pytest.raises(ValueError):
        power_sums_to_coeffs(PowerSumVector((acb(3),)), 53, 2)
    with pytest.raises(ValueError):
        PowerSumVector(())


def test_round_trip_with_inexact_balls():
    rng = random.Random(4)
    for _ in range(20):
        d = 8
        c = [rng.randint(-10, 10) for _ in range(d)] + [1]
        ps = coeffs_to_power_sums(ExactPolynomial(c), d, 53)
        # blur every power sum by 2^-70
        blurred = PowerSumVector(tuple(v + acb(arb(0, 2.0**-70), arb(0, 2.0**-70)) for v in ps.values))
        Q, Lp = power_sums_to_coeffs(blurred, 70, d)
        assert all(Q[k].contains(acb(c[k])) for k in range(d + 1))
        # L' is honest: every radius is at most 2^-L'
        assert Q.max_radius_log2() <= -Lp
        assert 0 < Lp < 70


def test_power_sum_additivity():
    rng = random.Random(9)
    S1 = [(Fraction(rng.randint(-9, 9), 4), Fraction(rng.randint(-9, 9), 4)) for _ in range(4)]
    S2 = [(Fraction(rng.randint(-9, 9), 4), Fraction(rng.randint(-9, 9), 4)) for _ in range(3)]
    n = 3
    a = coeffs_to_power_sums(from_roots(S1 + S2), n, 60)
    b = coeffs_to_power_sums(from_roots(S1), n, 60)
    c = coeffs_to_power_sums(from_roots(S2), n, 60)
    assert all(a[i].overlaps(b[i] + c[i]) for i in range(n))


def test_oracle_for_q_examples():
    P = ExactPolynomial([-1, 0, 1])
    Q = oracle_for_q(P, [Cluster(Disc((1, 0), Fraction(1, 8)), 1)], 53)
    assert Q.degree == 1 and Q[0].contains(acb(1)) and Q[1].contains(acb(1))
    assert Q.max_radius_log2() <= -53
    # every root removed
    one = oracle_for_q(P, [Cluster(Disc((0, 0), Fraction(3, 2)), 2)], 53)
    assert one.degree == 0 and one[0].contains(acb(1))
    with pytest.raises(ValueError):
        oracle_for_q(P, [Cluster(Disc((0, 0), 2), 3)], 53)


def test_deflated_oracle_degree_and_ladder():
    roots = [(Fraction(k, 4), Fraction(k % 3, 2)) for k in range(-3, 5)]
    P = from_roots(roots)
    found = solve_lcp(P, Box((0, 0), 8), Fraction(1, 2**20), real_symmetry="off")
    assert len(found) == 8
    C = list(found)[:3]
    ctx = deflation.DeflationContext(P)
    Q = DeflatedOracle(P, C, ctx)
    assert Q.degree == P.degree - 3
    A = Q.approximate(53)
    assert A.degree == 5 and A.max_radius_log2() <= -53
    # Q vanishes exactly at the roots outside C
    kept = [z for z in roots if not any(K.disc.contains_point(z) for K in C)]
    assert len(kept) == 5
    got = oracle_roots(A, prec=128)
    for a, b in kept:
        z = complex(float(a), float(b))
        assert min(abs(r.value - z) for r in got) < 1e-12
    ladder = ctx.stats.refine_precisions
    assert ladder and all(L % 53 == 0 and (L // 53) & (L // 53 - 1) == 0 for L in ladder)


def test_deflation_error_guard(monkeypatch):
    P = ExactPolynomial([-6, 11, -6, 1])
    monkeypatch.setattr(deflation, "_MAX_DOUBLINGS", 0)
    with pytest.raises(DeflationError) as info:
        oracle_for_q(P, [Cluster(Disc((3, 0), Fraction(1, 8)), 1)], 53)
    assert info.value.cluster is not None


def test_triple_root():
    P = ExactPolynomial([0, 0, 0, 1])
    for n in (1, 2, 5):
        res = cluster_with_deflation(P, Box((0, 0), 4), EPS, n)
        assert len(res) == 1 and res[0].multiplicity == 3


@pytest.mark.parametrize("seed", [1, 2, 5, 9, 16, 21])
def test_deflation_matches_plain(seed):
    coeffs, _, roi = random_case(seed)
    P = ExactPolynomial(coeffs)
    roots = oracle_roots(P)
    plain = solve_lcp(P, roi, EPS)
    defl = cluster_with_deflation(ExactPolynomial(coeffs), roi, EPS, max(1, P.degree // 8))
    assert not lcp_violations(defl, roots, roi, EPS)
    assert plain.total_multiplicity == defl.total_multiplicity
    for K in plain:
        assert any(discs_intersect(K.disc, J.disc) and K.multiplicity == J.multiplicity
                   for J in defl)
    degs = defl.stats.degrees
    assert degs[0] == P.degree and all(a > b for a, b in zip(degs, degs[1:]))


def test_mandelbrot_63_deflate():
    res = cluster_with_deflation(mandelbrot(63), Box.from_bounds(-10, 10, -10, 10), EPS, 7)
    assert len(res) == 63 and all(K.multiplicity == 1 for K in res)
    assert res.is_disjoint()
