import json

import pytest

from hyperell import verify
from hyperell.engine import DEN, ENGINE_VERSION, Engine, GenusOneTable, NotPolynomial, UnsupportedBaseCase
from hyperell.symmetric import character
from hyperell.qpoly import QPoly, QRat, parse_qrat
from hyperell.tuples import AExpr, CycleType, UTuple, orbit_count_poly, parse_aexpr, parse_tuple

q = QPoly.var()


def test_empty_tuple_counts_all_curves(fresh_engine):
    for g in range(1, 6):
        for parity in ("odd", "even"):
            assert fresh_engine.u_value(UTuple.of([]), g, parity) == QRat(q ** (2 * g - 1))


def test_genus_minus_one_is_the_orbit_count(fresh_engine):
    for text in ["(1^2)", "(2^1,1^2)", "(3^2,1^1,1^1)"]:
        t = parse_tuple(text)
        assert fresh_engine.u_value(t, -1, "odd") == QRat(orbit_count_poly(t.degrees), DEN)


def test_odd_weight_vanishes(fresh_engine):
    assert fresh_engine.u_value(parse_tuple("(2^1,1^1)"), 4, "odd").is_zero()
    assert fresh_engine.a_value(parse_aexpr("a1 a2"), 3, "even").is_zero()


@pytest.mark.parametrize("g", range(0, 8))
def test_three_squared_points(fresh_engine, g):
    t = parse_tuple("(1^2,1^2,1^2)")
    assert fresh_engine.u_value(t, g, "odd") == verify.u_111_squared_odd(g)
    assert fresh_engine.u_value(t, g, "even") == verify.u_111_squared_even(g)


@pytest.mark.parametrize("g", range(1, 9))
def test_a1_squared_a2(fresh_engine, g):
    assert fresh_engine.a_value(parse_aexpr("a1^2 a2"), g, "odd") == verify.a1_2_a2_odd(g)


def test_a6_needs_the_corrected_sign(engine):
    a6 = parse_aexpr("a6")
    for g in range(0, 8):
        assert engine.a_value(a6, g, "odd") == verify.a6_odd_formula(g)
    assert engine.a_value(a6, 1, "odd") == QRat(q - 1)
    assert verify.a6_odd_formula(0, mod3_sign=+1) != QRat.of(0)


def test_genus_one_rejects_mixed_exponents(engine):
    with pytest.raises(UnsupportedBaseCase):
        engine.genus1_u(parse_tuple("(3^2,2^1,1^1)"), "odd")


def test_missing_table_entry_is_unsupported():
    table = GenusOneTable({}, (3, 5), 1, 0, 7)
    with pytest.raises(UnsupportedBaseCase):
        table[parse_aexpr("a6")]
    assert table[parse_aexpr("a1 a6")] == QPoly()


def test_a_values_are_polynomials_for_small_weight(fresh_engine):
    for text in ["a2", "a1^2", "a1^2 a2", "a2^2", "a4"]:
        for g in range(1, 7):
            assert fresh_engine.a_value(parse_aexpr(text), g, "odd").is_poly()


def test_parity_difference_for_a1_sixth(engine):
    e = parse_aexpr("a1^6")
    diff = engine.a_value(e, 5, "even") - engine.a_value(e, 5, "odd")
    assert diff == QRat(225 - 75 * q)


def test_closed_form_matches_recursion(fresh_engine):
    t = parse_tuple("(6^1)")
    cf = fresh_engine.closed_form(t, "odd")
    assert cf.period == 6
    assert cf.g_min == -1
    for g in range(-1, 40):
        assert cf(g) == fresh_engine.u_value(t, g, "odd")
    assert fresh_engine.recursion_certificate(t, "odd", cf)


def test_window_recursion(fresh_engine):
    t = parse_tuple("(1^2,1^1,1^1)")
    for g in range(fresh_engine.window_start(t), 20):
        assert fresh_engine.window_residual(t, g, "odd").is_zero()


def test_fixed_points_of_the_identity_are_the_point_count(fresh_engine):
    # n = 1: every point of every curve is fixed
    poly = fresh_engine.fixed_point_poly(3, CycleType((1,)), "odd")
    expected = fresh_engine.a_value(AExpr.of([]), 3, "odd") * (q + 1) - fresh_engine.a_value(parse_aexpr("a1"), 3, "odd")
    assert QRat(poly) == expected


@pytest.mark.parametrize("n", [2, 3, 4])
def test_character_transform_inverts(engine, n):
    table = engine.fixed_point_table(2, n, "odd")
    schur = engine.character_transform(2, n, "odd")
    for c, fixed in table.items():
        back = QPoly()
        for lam, poly in schur.items():
            back = back + poly * character(lam, c)
        assert back == fixed


def test_not_polynomial_guard():
    eng = Engine()
    eng._seq[(UTuple.of([]), "odd")] = [QPoly(), QPoly.const(1), QPoly.const(1)]
    with pytest.raises(NotPolynomial):
        eng.a_value(AExpr.of([]), 1, "odd")


def test_cache_round_trip(tmp_path, fresh_engine):
    eng = Engine(cache_dir=tmp_path, genus1_table=GenusOneTable({}, (3,), 1, 0, 7))
    t = parse_tuple("(2^1,1^2)")
    want = eng.u_value(t, 6, "even")
    eng.save()
    lines = (tmp_path / "u_values.jsonl").read_text().splitlines()
    assert lines == sorted(lines)
    again = Engine(cache_dir=tmp_path)
    assert again._seq[(t, "even")]
    assert again.u_value(t, 6, "even") == want


def test_cache_discarded_on_version_change(tmp_path):
    eng = Engine(cache_dir=tmp_path)
    eng.u_value(parse_tuple("(1^2)"), 3, "odd")
    eng.save()
    path = tmp_path / "u_values.jsonl"
    recs = [json.loads(line) for line in path.read_text().splitlines()]
    for r in recs:
        r["engine_version"] = ENGINE_VERSION + "-old"
        r["value"] = "12345"
    path.write_text("\n".join(json.dumps(r) for r in recs) + "\n")
    fresh = Engine(cache_dir=tmp_path)
    assert not fresh._seq
    assert fresh.u_value(parse_tuple("(1^2)"), 3, "odd") != parse_qrat("12345")


def test_bad_parity(fresh_engine):
    with pytest.raises(ValueError):
        fresh_engine.u_value(UTuple.of([]), 1, "three")
