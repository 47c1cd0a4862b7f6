from fractions import Fraction
import random

import pytest

from hkit.core import Exponent, MonomialOrder, Ordering, TruncatedSeriesVector, leading_term
from hkit.division import (
    Diagram,
    artin_rees_lambda,
    check_chevalley_estimate,
    compare_diagrams,
    complement_basis,
    compute_diagram,
    hironaka_divide,
    membership_test,
    minimal_exponents,
    standard_basis,
)
from hkit.errors import DimensionMismatch, InsufficientTruncation, TruncationMismatch, ZeroDivisor

from helpers import check_division, leading_term_elimination, random_series, ser

E = Exponent


def random_instance(rng):
    n, p = rng.randint(1, 3), rng.randint(1, 2)
    D = rng.randint(0, 6)
    ord = MonomialOrder(n, p)
    F = random_series(rng, n, p, D, max_terms=8)
    divisors = [random_series(rng, n, p, D, max_terms=4, nonzero=True) for _ in range(rng.randint(1, 3))]
    return F, divisors, ord


class TestExamples:
    def test_scalar(self):
        ord = MonomialOrder(1)
        F = ser(1, 3, ((0,), 1), ((1,), 1), ((2,), 1))
        res = hironaka_divide(F, [ser(1, 3, ((1,), 1))], ord)
        assert res.quotients[0] == ser(1, 3, ((0,), 1), ((1,), 1))
        assert res.remainder == ser(1, 3, ((0,), 1))

    def test_two_divisors(self):
        ord = MonomialOrder(2)
        F = ser(2, 3, ((0, 0), 1), ((1, 0), 1), ((0, 1), 1), ((1, 1), 1))
        res = hironaka_divide(F, [ser(2, 3, ((1, 0), 1)), ser(2, 3, ((0, 1), 1))], ord)
        assert res.quotients == (ser(2, 3, ((0, 0), 1), ((0, 1), 1)), ser(2, 3, ((0, 0), 1)))
        assert res.remainder == ser(2, 3, ((0, 0), 1))

    def test_no_divisors(self):
        F = ser(1, 2, ((1,), 3))
        res = hironaka_divide(F, [], MonomialOrder(1))
        assert res.quotients == () and res.remainder == F

    def test_zero_divisor(self):
        with pytest.raises(ZeroDivisor):
            hironaka_divide(ser(1, 2, ((1,), 1)), [ser(1, 2, ((3,), 1))], MonomialOrder(1))

    def test_truncation_mismatch(self):
        with pytest.raises(TruncationMismatch):
            hironaka_divide(ser(1, 2, ((1,), 1)), [ser(1, 3, ((1,), 1))], MonomialOrder(1))

    def test_dims_mismatch(self):
        with pytest.raises(DimensionMismatch):
            hironaka_divide(ser(2, 2, ((1, 0), 1)), [ser(2, 2, ((1, 0), 1))], MonomialOrder(3))


def test_division_properties_and_uniqueness():
    rng = random.Random(99)
    for _ in range(300):
        F, divisors, ord = random_instance(rng)
        res = hironaka_divide(F, divisors, ord)
        check_division(F, divisors, ord, res)
        again = hironaka_divide(res.remainder, divisors, ord)
        assert all(Q.is_zero() for Q in again.quotients)
        assert again.remainder == res.remainder


def test_weighted_order_division():
    rng = random.Random(3)
    for _ in range(100):
        F, divisors, _ = random_instance(rng)
        w = [Fraction(rng.randint(1, 4), rng.randint(1, 3)) for _ in range(F.nvars)]
        ord = MonomialOrder(F.nvars, F.ncomp, w)
        check_division(F, divisors, ord, hironaka_divide(F, divisors, ord))


class TestDiagram:
    M = [ser(2, 6, ((2, 0), 1)), ser(2, 6, ((1, 1), 1))]

    def test_staircase(self):
        ord = MonomialOrder(2)
        N = compute_diagram(self.M, ord, 6)
        assert set(N.vertices) == {E((2, 0)), E((1, 1))}
        assert artin_rees_lambda(self.M, ord, 6) == 2
        comp = complement_basis(self.M, ord, 6, 2)
        assert set(comp) == {E((0, 0)), E((1, 0)), E((0, 1)), E((0, 2))}

    def test_complement_needs_truncation(self):
        with pytest.raises(InsufficientTruncation):
            complement_basis(self.M, MonomialOrder(2), 6, 7)

    def test_lambda_needs_headroom(self):
        M = [ser(2, 3, ((2, 0), 1)), ser(2, 3, ((1, 1), 1))]
        with pytest.raises(InsufficientTruncation):
            artin_rees_lambda(M, MonomialOrder(2), 3)

    def test_empty_module(self):
        N = compute_diagram([], MonomialOrder(2), 3)
        assert N.is_empty() and len(N.complement(2)) == 6
        assert artin_rees_lambda([], MonomialOrder(2), 3) == 0

    def test_region_closed_upward(self):
        rng = random.Random(8)
        for _ in range(30):
            gens = [random_series(rng, 2, 1, 4, nonzero=True) for _ in range(2)]
            ord = MonomialOrder(2)
            N = compute_diagram(gens, ord, 4)
            for e in ord.exponents(3):
                if e in N:
                    assert e.shift((1, 0)) in N and e.shift((0, 1)) in N

    def test_minimal_exponents(self):
        exps = [E((2, 0)), E((2, 1)), E((1, 1)), E((0, 3)), E((1, 3))]
        assert set(minimal_exponents(exps, MonomialOrder(2))) == {E((2, 0)), E((1, 1)), E((0, 3))}

    def test_diagram_validates_minimality(self):
        with pytest.raises(ValueError):
            Diagram(MonomialOrder(2), (E((1, 0)), E((2, 0))), 4)


def test_diagram_matches_sparse_elimination():
    rng = random.Random(17)
    for _ in range(60):
        n, p = rng.randint(1, 2), rng.randint(1, 2)
        D = rng.randint(1, 4)
        ord = MonomialOrder(n, p)
        gens = [random_series(rng, n, p, D, max_terms=4) for _ in range(rng.randint(1, 3))]
        gens = [g for g in gens if not g.is_zero()]
        N = compute_diagram(gens, ord, D)
        brute = leading_term_elimination(gens, ord, D)
        assert {e for e in ord.exponents(D) if e in N} == brute


class TestStandardBasis:
    def test_example(self):
        ord = MonomialOrder(2)
        M = [ser(2, 5, ((1, 0), 1), ((0, 2), 1))]
        assert standard_basis(M, ord, 5) == M
        ok, R = membership_test(ser(2, 5, ((1, 1), 1), ((0, 3), 1)), M, ord, 5)
        assert ok and R.is_zero()
        ok, R = membership_test(ser(2, 5, ((0, 2), 1)), M, ord, 5)
        assert not ok and R == ser(2, 5, ((0, 2), 1))

    def test_linear_generators(self):
        ord = MonomialOrder(2)
        M = [ser(2, 3, ((1, 0), 1)), ser(2, 3, ((1, 0), 1), ((0, 1), 1))]
        assert set(standard_basis(M, ord, 3)) == {ser(2, 3, ((1, 0), 1)), ser(2, 3, ((0, 1), 1))}

    def test_stable_under_recomputation(self):
        rng = random.Random(21)
        for _ in range(30):
            ord = MonomialOrder(2, rng.randint(1, 2))
            gens = [random_series(rng, 2, ord.ncomp, 4, nonzero=True) for _ in range(2)]
            B = standard_basis(gens, ord, 4)
            assert standard_basis(B, ord, 4) == B
            N = compute_diagram(gens, ord, 4)
            for psi, v in zip(B, N.vertices):
                assert leading_term(psi, ord) == (v, 1)
                assert all(e not in N for e in psi.support if e != v)

    def test_membership_soundness(self):
        rng = random.Random(4)
        for _ in range(40):
            ord = MonomialOrder(2)
            gens = [random_series(rng, 2, 1, 4, nonzero=True) for _ in range(2)]
            # a planted member: x^a g1 - 3 x^b g2
            G = TruncatedSeriesVector.zero(2, 1, 4)
            for g, c in zip(gens, (1, -3)):
                G = G + TruncatedSeriesVector.monomial(E((rng.randint(0, 1), rng.randint(0, 1))), 1, 4, c) * g
            ok, R = membership_test(G, gens, ord, 4)
            assert ok and R.is_zero()
            N = compute_diagram(gens, ord, 4)
            outside = N.complement(4)
            if outside:
                e = outside[0]
                ok, R = membership_test(TruncatedSeriesVector(2, 1, 4, {e: 1}), gens, ord, 4)
                assert not ok


def test_chevalley_estimate():
    ord = MonomialOrder(2)
    M = [ser(2, 8, ((2, 0), 1)), ser(2, 8, ((1, 1), 1))]
    for l in (1, 2, 3):
        assert check_chevalley_estimate(M, ord, 8, l)


def test_chevalley_estimate_truncation_guard():
    ord = MonomialOrder(2)
    M = [ser(2, 6, ((2, 0), 1)), ser(2, 6, ((1, 1), 1))]
    with pytest.raises(InsufficientTruncation):
        check_chevalley_estimate(M, ord, 6, 5)


def test_compare_diagrams():
    ord = MonomialOrder(2)
    a = Diagram(ord, (E((1, 0)),), 4)
    b = Diagram(ord, (E((1, 0)), E((0, 3))), 4)
    assert compare_diagrams(a, a) is Ordering.EQUAL
    assert compare_diagrams(b, a) is Ordering.LESS
    assert compare_diagrams(a, b) is Ordering.GREATER
    with pytest.raises(DimensionMismatch):
        compare_diagrams(a, Diagram(MonomialOrder(3), (), 4))
