"""Exact rationals and cyclotomic numbers.

Rationals are :class:`fractions.Fraction` (always reduced, positive
denominator).  Cyclotomic numbers live in Q(zeta_n) and are stored as
coefficient vectors of length phi(n) modulo the n-th cyclotomic polynomial.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

Rational = Fraction

__all__ = [
    "Rational",
    "Cyclotomic",
    "rational_arith",
    "format_rational",
    "parse_rational",
    "cyclotomic_polynomial",
    "euler_phi",
]


def rational_arith(a: Fraction, b: Fraction, op: str) -> Fraction:
    a, b = Fraction(a), Fraction(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b == 0:
            raise ZeroDivisionError("rational division by zero")
        return a / b
    raise ValueError(f"unknown rational op {op!r}")


def format_rational(r) -> str:
    """``"num/den"``, with the denominator omitted when it is 1."""
    return str(Fraction(r))


def parse_rational(s: str) -> Fraction:
    return Fraction(s)


def euler_phi(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if gcd(k, n) == 1)


# -- integer / rational polynomial helpers (constant term first) ------------

def _trim(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_divmod(num: Sequence, den: Sequence) -> tuple[list, list]:
    num = [Fraction(x) for x in num]
    den = _trim([Fraction(x) for x in den])
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    num = _trim(num)
    if len(num) < len(den):
        return [], num
    quot = [Fraction(0)] * (len(num) - len(den) + 1)
    lead = den[-1]
    for shift in range(len(num) - len(den), -1, -1):
        c = num[shift + len(den) - 1] / lead
        quot[shift] = c
        if c:
            for i, d in enumerate(den):
                num[shift + i] -= c * d
    return _trim(quot), _trim(num[: len(den) - 1])


def _poly_mul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Phi_n as integer coefficients, constant term first.

    Computed as (x^n - 1) divided by Phi_d for every proper divisor d of n.
    """
    if n < 1:
        raise ValueError("cyclotomic order must be positive")
    poly: list = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            q, r = _poly_divmod(poly, cyclotomic_polynomial(d))
            assert not r
            poly = q
    return tuple(int(c) for c in poly)


class Cyclotomic:
    """Element of Q(zeta_n), immutable."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Iterable = ()):
        phi = len(cyclotomic_polynomial(order)) - 1
        c = [Fraction(x) for x in coeffs]
        if len(c) > phi:
            c = _reduce(c, order)
        c += [Fraction(0)] * (phi - len(c))
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", tuple(c))

    def __setattr__(self, name, value):
        raise AttributeError("Cyclotomic is immutable")

    @classmethod
    def zeta(cls, n: int, k: int = 1) -> "Cyclotomic":
        k %= n
        return cls(n, [0] * k + [1])

    @classmethod
    def from_rational(cls, n: int, r) -> "Cyclotomic":
        return cls(n, [r])

    @classmethod
    def from_power_counts(cls, n: int, counts: Sequence, scale=1) -> "Cyclotomic":
        """sum_k counts[k] * zeta_n^k, times ``scale``."""
        scale = Fraction(scale)
        return cls(n, [scale * c for c in counts])

    def _coerce(self, other) -> "Cyclotomic":
        if isinstance(other, Cyclotomic):
            if other.order != self.order:
                raise ValueError(
                    f"cyclotomic order mismatch: {self.order} vs {other.order}")
            return other
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.order, [other])
        return NotImplemented

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Cyclotomic(self.order, [other])
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Cyclotomic(self.order, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.order, [-a for a in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.order, [a * other for a in self.coeffs])
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Cyclotomic(self.order, _reduce(_poly_mul(self.coeffs, o.coeffs), self.order))

    __rmul__ = __mul__

    def inv(self) -> "Cyclotomic":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero cyclotomic")
        # extended Euclid in Q[x] against Phi_n
        r0, r1 = list(cyclotomic_polynomial(self.order)), _trim(list(self.coeffs))
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, r
            qs = _poly_mul(q, s1)
            width = max(len(s0), len(qs))
            s_new = [(s0[i] if i < len(s0) else 0) - (qs[i] if i < len(qs) else 0)
                     for i in range(width)]
            s0, s1 = s1, _trim(s_new)
        c = r1[0]
        return Cyclotomic(self.order, _reduce([x / c for x in s1], self.order))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("cyclotomic division by zero")
            return self * (Fraction(1) / Fraction(other))
        return self * self._coerce(other).inv()

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        result = Cyclotomic(self.order, [1])
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def rational_part(self):
        """The value as a Fraction if it lies in Q, else None."""
        if any(self.coeffs[1:]):
            return None
        return self.coeffs[0]

    def __repr__(self):
        terms = [f"{c}*z^{k}" if k else f"{c}" for k, c in enumerate(self.coeffs) if c]
        return f"Cyclotomic({self.order}: {' + '.join(terms) or '0'})"


def _reduce(c: Sequence, n: int) -> list:
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    c = [Fraction(x) for x in c]
    # Phi_n is monic with integer coefficients
    for top in range(len(c) - 1, deg - 1, -1):
        lead = c[top]
        if lead:
            base = top - deg
            for i in range(deg + 1):
                c[base + i] -= lead * phi[i]
    return c[:deg] + [Fraction(0)] * max(0, deg - len(c))
