from fractions import Fraction

import pytest

from hyperell.qpoly import QPoly
from hyperell.tuples import (AExpr, CycleType, ExprParseError, UTuple, all_aexprs, char_poly, decompose_a,
                             decompose_bc, exact_degree_count, genus0_reduce, mobius, orbit_count_poly,
                             parse_aexpr, parse_bcexpr, parse_tuple, partitions, set_partitions,
                             sigma_moment_poly)

q = QPoly.var()


def terms(comb):
    return {t.render(): Fraction(int(c.numerator), int(c.denominator)) for t, c in comb.items()}


def test_tuple_parse_and_invariants():
    t = parse_tuple("(2^1, 1^2, 1^1)")
    assert t.render() == "(2^1,1^2,1^1)"
    assert (t.weight, t.degree, t.parity, t.rflag) == (5, 4, 1, 1)
    assert t.degrees == (2, 1, 1)
    assert parse_tuple(t.render()) == t
    assert parse_tuple("()") == UTuple.of([])


@pytest.mark.parametrize("bad", ["(2^3)", "(0^1)", "2^1", "(2^1,", "(a^1)"])
def test_tuple_parse_errors(bad):
    with pytest.raises(ExprParseError):
        parse_tuple(bad)


def test_aexpr_parse():
    a = parse_aexpr("a1^2 a2")
    assert a.weight == 4
    assert a.slots == [1, 1, 2]
    assert parse_aexpr(a.render()) == a
    assert parse_aexpr("a2*a1^2") == a
    with pytest.raises(ExprParseError):
        parse_aexpr("b1")


def test_decompose_a2_squared():
    assert terms(decompose_a(parse_aexpr("a2^2"))) == {
        "(2^1,2^1)": 1, "(2^1,1^2)": 2, "(2^2)": 2, "(1^2,1^2)": 1, "(1^2)": 1}


def test_decompose_b1_squared_c2():
    assert terms(decompose_bc(parse_bcexpr("b1^2 c2"))) == {
        "(2^2,1^2,1^2)": Fraction(1, 8), "(2^2,1^1,1^1)": Fraction(1, 8),
        "(2^1,1^2,1^2)": Fraction(-1, 8), "(2^1,1^1,1^1)": Fraction(-1, 8),
        "(2^2,1^2)": Fraction(1, 4), "(2^1,1^2)": Fraction(-1, 4)}


def test_decomposition_is_linear_in_a1():
    # a trace is minus the character sum
    assert terms(decompose_a(parse_aexpr("a1"))) == {"(1^1)": -1}
    assert terms(decompose_a(AExpr.of([]))) == {"()": 1}


def test_set_partitions_are_bell_numbers():
    assert [sum(1 for _ in set_partitions(list(range(n)))) for n in range(7)] == [1, 1, 2, 5, 15, 52, 203]


def test_partitions_and_centralizers():
    assert [len(partitions(n)) for n in range(8)] == [1, 1, 2, 3, 5, 7, 11, 15]
    import math
    for n in range(1, 7):
        assert sum(Fraction(math.factorial(n), c.centralizer_size()) for c in partitions(n)) == math.factorial(n)


def test_mobius_and_exact_degree():
    assert [mobius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    assert exact_degree_count(1) == q + 1
    assert exact_degree_count(2) == q * q - q
    assert orbit_count_poly([1, 1]) == q * q + q


def test_char_poly():
    assert char_poly(UTuple.of([])) == QPoly.const(1)
    assert char_poly(parse_tuple("(2^1,1^2,1^1)")) == q ** 3 - q ** 2 - q + 1


def test_genus0_reduce_odd_weight_vanishes():
    assert not list(genus0_reduce(parse_tuple("(2^1,1^1)")).items())


def test_sigma_moment_poly_identity_cycle():
    # one fixed point: the trivial permutation contributes a0 times the point count
    poly = sigma_moment_poly(CycleType((1,)))
    assert set(poly) <= {AExpr.of([]), parse_aexpr("a1")}


def test_all_aexprs_counts():
    # monomials in a_1..a_w of weight <= w
    assert len(all_aexprs(3)) == 1 + 1 + 2 + 3
