import numpy as np
import pytest
from hypothesis import given, strategies as st

from hopfcert.field import (FieldError, canonical_modulus, field_arith, field_create, frobenius,
                            is_prime, square_root)
from hopfcert.groups import sz_theta

SIZES = [(2, 1), (3, 1), (5, 1), (7, 1), (13, 1), (2, 2), (2, 3), (3, 2), (2, 5)]


def schoolbook(F, a, b):
    """Product of codes by polynomial multiplication and long division, no tables."""
    p, m = F.p, F.m
    da = [(a // p ** i) % p for i in range(m)]
    db = [(b // p ** i) % p for i in range(m)]
    prod = [0] * (2 * m - 1)
    for i, x in enumerate(da):
        for j, y in enumerate(db):
            prod[i + j] = (prod[i + j] + x * y) % p
    mod = F.modulus
    for top in range(len(prod) - 1, m - 1, -1):
        c = prod[top]
        if c:
            for k in range(m + 1):
                prod[top - m + k] = (prod[top - m + k] - c * mod[k]) % p
    return sum(prod[i] * p ** i for i in range(m))


@pytest.mark.parametrize("p,m", SIZES)
def test_tables_match_schoolbook(p, m):
    F = field_create(p, m)
    for a in range(F.q):
        for b in range(F.q):
            assert F.mul[a, b] == schoolbook(F, a, b)


def test_modulus_convention():
    assert canonical_modulus(2, 2) == (1, 1, 1)
    assert canonical_modulus(2, 3) == (1, 1, 0, 1)
    assert canonical_modulus(3, 2) == (1, 0, 1)
    assert canonical_modulus(2, 5) == (1, 0, 1, 0, 0, 1)


def elements(p, m):
    F = field_create(p, m)
    return st.integers(0, F.q - 1).map(F.element)


@pytest.mark.parametrize("p,m", SIZES)
def test_field_axioms(p, m):
    @given(elements(p, m), elements(p, m), elements(p, m))
    def check(a, b, c):
        F = a.field
        assert a + b == b + a and a * b == b * a
        assert (a + b) + c == a + (b + c) and (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + F.zero == a and a * F.one == a and a + (-a) == F.zero
        if not a.is_zero():
            assert a * a.inverse() == F.one
            assert a ** (F.q - 1) == F.one
    check()


@pytest.mark.parametrize("p,m", SIZES)
def test_frobenius(p, m):
    F = field_create(p, m)
    for x in F.elements():
        assert frobenius(x, 1) == x ** p
        assert frobenius(x, m) == x
    a, b = F.element(F.q - 1), F.gen
    assert frobenius(a + b, 1) == frobenius(a, 1) + frobenius(b, 1)


@pytest.mark.parametrize("p,m", [(3, 1), (5, 1), (13, 1), (3, 2), (2, 3)])
def test_square_root(p, m):
    F = field_create(p, m)
    squares = {(x * x).code for x in F.elements()}
    for x in F.elements():
        r = square_root(x)
        assert (r is not None) == (x.code in squares)
        if r is not None:
            assert r * r == x


def test_theta_identities():
    for m in (3, 5):
        F = field_create(2, m)
        for c in range(F.q):
            # theta^2 is the Frobenius x -> x^2
            assert sz_theta(F, sz_theta(F, c)) == F.mul[c, c]
        images = {int(F.mul[a, sz_theta(F, a)]) for a in range(1, F.q)}
        assert images == set(range(1, F.q))
        assert {c for c in range(F.q) if sz_theta(F, c) == c} == {0, 1}


def test_errors():
    with pytest.raises(FieldError):
        field_create(6)
    with pytest.raises(FieldError):
        field_create(2, 13)
    F, G = field_create(5), field_create(7)
    with pytest.raises(FieldError):
        field_arith(F.one, G.one, "add")
    with pytest.raises(ZeroDivisionError):
        F.zero.inverse()
    assert field_create(5) is F
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_least_nonsquare():
    assert field_create(7).least_nonsquare().code == 3
    assert field_create(13).least_nonsquare().code == 2
    assert field_create(2, 3).least_nonsquare() is None
