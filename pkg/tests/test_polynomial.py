import math
import random
from fractions import Fraction

import pytest
from flint import acb, acb_poly, arb

from rootclusters.benchmarks import bernoulli, bernoulli_numbers, oracle_roots
from rootclusters.numerics import dyadic_to_arb, working_precision
from rootclusters.polynomial import (
    DensePolynomial,
    ExactPolynomial,
    PolynomialFormatError,
    approximate,
    evaluate,
    format_polynomial,
    graeffe,
    parse_polynomial,
    read_polynomial_file,
    taylor_shift_scale,
)


def dense(*coeffs):
    return DensePolynomial(tuple(acb(c) for c in coeffs))


def coeff_values(P):
    return [complex(c.real.mid(), c.imag.mid()) for c in P.coefficients]


def test_evaluate_examples():
    P = dense(-1, 0, 1)
    assert evaluate(P, acb(2)).contains(acb(3))
    assert evaluate(P, acb(1)).contains(acb(0))


def test_evaluate_against_exact_rationals():
    rng = random.Random(3)
    for _ in range(20):
        coeffs = [(Fraction(rng.randint(-99, 99), rng.randint(1, 9)),
                   Fraction(rng.randint(-99, 99), rng.randint(1, 9))) for _ in range(9)]
        E = ExactPolynomial(coeffs)
        z = (Fraction(rng.randint(-64, 64), 32), Fraction(rng.randint(-64, 64), 32))
        re, im = E(z)
        with working_precision(200):
            v = evaluate(E.approximate(150), acb(dyadic_to_arb(z[0]), dyadic_to_arb(z[1])))
            exact = acb(arb(re.numerator) / re.denominator, arb(im.numerator) / im.denominator)
        assert v.overlaps(exact)
        assert float(abs(v - exact).upper()) < 1e-30


def test_taylor_shift_scale_examples():
    P = dense(0, 0, 1)
    S = taylor_shift_scale(P, acb(1), arb(2))
    assert coeff_values(S) == [1, 4, 4]
    Q = dense(3, -2, 5, 1)
    assert DensePolynomial(taylor_shift_scale(Q, acb(0), arb(1)).coefficients).overlaps(Q)


def test_taylor_shift_scale_evaluation_and_composition():
    rng = random.Random(5)
    P = dense(*[complex(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(9)])
    c, r = acb(0.25, -0.5), arb(0.75)
    S = taylor_shift_scale(P, c, r)
    assert S.degree == P.degree
    for _ in range(20):
        z = acb(rng.uniform(-1, 1), rng.uniform(-1, 1))
        assert evaluate(S, z).overlaps(evaluate(P, c + r * z))
    # shift by c then by 0; scale by r1 then r2
    assert taylor_shift_scale(S, acb(0), arb(1)).overlaps(S)
    two = taylor_shift_scale(taylor_shift_scale(P, acb(0), arb(0.5)), acb(0), arb(3))
    assert two.overlaps(taylor_shift_scale(P, acb(0), arb(1.5)))


def test_graeffe_examples():
    assert coeff_values(graeffe(dense(-1, 1))) == [-1, 1]
    assert coeff_values(graeffe(dense(-2, 1))) == [-4, 1]
    assert coeff_values(graeffe(dense(-2, 0, 1))) == [4, -4, 1]


def test_graeffe_squares_roots():
    rng = random.Random(11)
    for d in range(1, 9):
        roots = [complex(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(d)]
        with working_precision(200):
            P = DensePolynomial.from_acb_poly(acb_poly.from_roots([acb(z) for z in roots]))
            G = graeffe(P)
        assert G.degree == d
        got = sorted((r.value for r in oracle_roots(G, prec=200) for _ in range(r.multiplicity)),
                     key=lambda z: (round(z.real, 6), round(z.imag, 6)))
        want = sorted((z * z for z in roots), key=lambda z: (round(z.real, 6), round(z.imag, 6)))
        assert len(got) == d
        # match greedily: every squared root has an oracle root within 2^-40
        pool = list(got)
        for w in want:
            k = min(range(len(pool)), key=lambda i: abs(pool[i] - w))
            assert abs(pool.pop(k) - w) < 2.0**-40 * max(1, abs(w))


def test_oracle_precision_and_nesting():
    E = bernoulli(4)
    A = approximate(E, 100)
    b = bernoulli_numbers(4)
    for k in range(5):
        exact = Fraction(math.comb(4, k)) * b[4 - k]
        assert A[k].real.rad() <= arb(2) ** -100
        with working_precision(300):
            assert A[k].real.contains(arb(exact.numerator) / exact.denominator)
    assert E.approximate(50).overlaps(E.approximate(200))
    # exact integers come back with zero radius
    assert ExactPolynomial([1, -2, 3]).approximate(10).max_radius_log2() == float("-inf")
    with pytest.raises(ValueError):
        E.approximate(0)


def test_degree_and_trailing_zeros():
    assert DensePolynomial((acb(1), acb(2), acb(0))).degree == 1
    assert ExactPolynomial([1, 0, 0]).degree == 0
    assert ExactPolynomial([(1, 0), (0, 1)]).is_real is False
    assert ExactPolynomial([1, Fraction(1, 3)]).is_real is True


def test_parse_round_trip(tmp_path):
    text = "degree 2\n1 0\n# comment\n-1/3 0.5\n2 -7/8\n"
    P = parse_polynomial(text.splitlines())
    assert P.coefficients == ((1, 0), (Fraction(-1, 3), Fraction(1, 2)), (2, Fraction(-7, 8)))
    f = tmp_path / "p.txt"
    f.write_text(format_polynomial(P.coefficients))
    assert read_polynomial_file(f).coefficients == P.coefficients


@pytest.mark.parametrize("text,line", [
    ("", 1),
    ("deg 2\n", 1),
    ("degree x\n", 1),
    ("degree 1\n1 0\n", 3),
    ("degree 1\n1 0\n2 0\n3 0\n", 4),
    ("degree 1\n1 0\nfoo 0\n", 3),
    ("degree 1\n1 0\n1\n", 3),
    ("degree 1\n1 0\n0 0\n", 3),
    ("degree 1\n1/0 0\n1 0\n", 2),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(PolynomialFormatError) as info:
        parse_polynomial(text.splitlines())
    assert info.value.line == line
    assert f"line {line}" in str(info.value)
