import itertools
from fractions import Fraction

import pytest

from hyperell.curves import (Budget, brute_a, brute_fixed_points, brute_u, count_candidates, enumerate_Pg,
                             equivalence_class_probe, group_order)
from hyperell.field import BudgetExceeded, gf_q
from hyperell.tuples import CycleType, parse_aexpr, parse_tuple


@pytest.mark.parametrize("q,g", [(3, 1), (5, 0), (2, 1), (4, 0)])
def test_point_count_matches_trace(q, g):
    F = gf_q(q)
    for curve in itertools.islice(enumerate_Pg(F, g), 40):
        for m in (1, 2):
            assert curve.count_points(m) == q ** m + 1 - curve.trace(m)


@pytest.mark.parametrize("q,g", [(3, 1), (3, 2), (5, 1), (2, 1), (2, 2), (4, 1)])
def test_mass_of_representatives(q, g):
    # the weighted count of all curves is q^(2g-1) once g >= 1
    assert brute_a(parse_aexpr("a0"), gf_q(q), g) == q ** (2 * g - 1)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_genus_zero_mass_depends_on_characteristic(q):
    expected = Fraction(1, q) if q % 2 == 0 else Fraction(q, q * q - 1)
    assert brute_a(parse_aexpr("a0"), gf_q(q), 0) == expected


@pytest.mark.parametrize("q,g,expr", [(3, 2, "a1^2"), (3, 2, "a2"), (5, 1, "a1^4"), (2, 2, "a1^2"), (2, 1, "a2^2")])
def test_brute_force_agrees_with_recursion(engine, q, g, expr):
    parity = "even" if q % 2 == 0 else "odd"
    assert brute_a(parse_aexpr(expr), gf_q(q), g) == engine.a_value(parse_aexpr(expr), g, parity)(q)


@pytest.mark.parametrize("q,g,tup", [(3, 1, "(1^2,1^1,1^1)"), (3, 2, "(2^1)"), (2, 1, "(1^1,1^1)")])
def test_brute_u_agrees_with_recursion(fresh_engine, q, g, tup):
    parity = "even" if q % 2 == 0 else "odd"
    t = parse_tuple(tup)
    assert brute_u(t, gf_q(q), g) == fresh_engine.u_value(t, g, parity)(q)


def test_fixed_points_agree_with_recursion(engine):
    sigma = CycleType((2, 1))
    assert brute_fixed_points(gf_q(3), 2, sigma) == engine.fixed_point_poly(2, sigma, "odd")(3)


def test_group_orders():
    assert group_order(3, 2, "odd") == 24 * 2
    assert group_order(2, 1, "even") == 6 * 1 * 8


def test_budget_is_enforced():
    assert count_candidates(5, 4, "odd") > 1000
    with pytest.raises(BudgetExceeded):
        brute_a(parse_aexpr("a1"), gf_q(5), 4, budget=Budget(max_curves=1000))


@pytest.mark.parametrize("g", [0, 1])
def test_equivalence_class_probe_characteristic_two(g):
    rep = equivalence_class_probe(gf_q(2), g)
    assert rep.ok
    assert rep.vz_cover and rep.vz_disjoint and rep.reform_ok


def test_probe_needs_characteristic_two():
    with pytest.raises(ValueError):
        equivalence_class_probe(gf_q(3), 0)
