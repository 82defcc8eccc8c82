from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hopfcert.exact import (Cyclotomic, cyclotomic_polynomial, euler_phi, format_rational,
                            parse_rational, rational_arith)

rationals = st.fractions(max_denominator=50).filter(lambda r: abs(r.numerator) < 10 ** 6)
orders = st.sampled_from([1, 2, 3, 4, 5, 6, 8, 9, 12])


def test_rational_examples():
    assert rational_arith(Fraction(15), Fraction(4), "div") == Fraction(15, 4)
    assert format_rational(Fraction(15, 4)) == "15/4"
    assert format_rational(Fraction(8, 2)) == "4"
    assert parse_rational("-3773/4") == Fraction(-3773, 4)
    with pytest.raises(ZeroDivisionError):
        rational_arith(Fraction(1), Fraction(0), "div")
    with pytest.raises(ValueError):
        rational_arith(Fraction(1), Fraction(1), "pow")


@given(rationals, rationals)
def test_format_roundtrip(a, b):
    r = rational_arith(a, b, "add")
    assert parse_rational(format_rational(r)) == r


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(6) == (1, -1, 1)
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)
    assert [euler_phi(n) for n in (1, 7, 9, 12)] == [1, 6, 6, 4]


@pytest.mark.parametrize("n", [2, 3, 4, 5, 8, 9, 12])
def test_roots_of_unity(n):
    z = Cyclotomic.zeta(n)
    assert z ** n == 1
    assert all(z ** k != 1 for k in range(1, n))
    assert sum((z ** k for k in range(n)), Cyclotomic(n)) == 0
    assert z.inv() == z ** (n - 1)


def _cyc(n):
    phi = euler_phi(n)
    return st.lists(rationals, min_size=phi, max_size=phi).map(lambda c: Cyclotomic(n, c))


@given(orders.flatmap(lambda n: st.tuples(_cyc(n), _cyc(n), _cyc(n))))
def test_field_axioms(abc):
    a, b, c = abc
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a - a == 0
    if not a.is_zero():
        assert a * a.inv() == 1
        assert (b / a) * a == b


def test_rational_part_and_mismatch():
    assert (Cyclotomic.zeta(4) ** 2).rational_part() == -1
    assert Cyclotomic.zeta(3).rational_part() is None
    with pytest.raises(ValueError):
        Cyclotomic.zeta(3) + Cyclotomic.zeta(4)
    with pytest.raises(ZeroDivisionError):
        Cyclotomic(5).inv()
