from fractions import Fraction

import pytest

from hyperell.qpoly import (ClosedForm, InterpolationError, ParseError, QPoly, QRat, SingularSystem,
                            interpolate_poly, parse_qrat, qpow, solve_linear)

q = QPoly.var()


def test_arithmetic_and_evaluation():
    p = (q + 1) * (q - 1)
    assert p == q * q - 1
    assert p.degree == 2
    assert p(3) == 8
    assert (p - p).is_zero()
    assert QPoly.monomial(3, 2)(2) == 16


def test_divmod_and_gcd():
    a = (q - 1) ** 2 * (q + 2)
    b = (q - 1) * (q + 5)
    quo, rem = a.divmod(b)
    assert quo * b + rem == a
    assert a.gcd(b) == q - 1
    assert a.exact_div(q - 1) == (q - 1) * (q + 2)


def test_integrality():
    assert (q * q + 3).is_integral()
    half = QPoly([Fraction(1, 2), 1])
    assert not half.is_integral()
    assert half.content_denominator() == 2


def test_rational_canonical_form():
    r = QRat(q * q - 1, q - 1)
    assert r.is_poly()
    assert r.as_poly() == q + 1
    assert QRat(q, q * q - q) == QRat(QPoly.const(1), q - 1)
    assert QRat(q, q * q - 1)(3) == Fraction(3, 8)


def test_rational_ops():
    x = QRat(q, q + 1)
    assert x * x.inverse() == QRat.of(1)
    assert (x + x - x) == x
    assert qpow(-2) * qpow(3) == QRat(q)


@pytest.mark.parametrize("text", ["q^2 - 1", "(q)/(q^2 - 1)", "-3/2*q^3 + q", "1", "0", "(q^4 + 1)/(q^3 - q)"])
def test_parse_render_round_trip(text):
    r = parse_qrat(text)
    assert parse_qrat(r.render()) == r


def test_parse_errors():
    for bad in ["q^", "(q + 1", "x + 1", "1/0"]:
        with pytest.raises((ParseError, ZeroDivisionError)):
            parse_qrat(bad)


def test_solve_linear():
    sol = solve_linear([[1, 2], [3, 4]], [5, 6])
    assert sol == [QRat.of(-4), QRat.of(Fraction(9, 2))]
    with pytest.raises(SingularSystem):
        solve_linear([[1, 2], [2, 4]], [1, 2])


def test_interpolation_with_held_out_points():
    samples = [(x, x ** 3 - 2 * x + 7) for x in range(1, 8)]
    assert interpolate_poly(samples, 3, 2) == q ** 3 - 2 * q + 7
    with pytest.raises(InterpolationError):
        interpolate_poly([(x, 2 ** x) for x in range(8)], 3, 2)


def test_closed_form_evaluation():
    # q^(2g) + (q if g even else g)
    cf = ClosedForm(geometric=QRat.of(1), period=2, residue_polys=((QRat(q),), (QRat.of(0), QRat.of(1))), g_min=0)
    assert cf(2) == QRat(q ** 4 + q)
    assert cf(3) == QRat(q ** 6 + 3)
    assert "mod 2" in cf.render()
    with pytest.raises(ValueError):
        cf(-1)
