"""GF(p^m) in a deterministic polynomial basis.

An element is identified by its *code*: the integer whose base-p digits,
least significant first, are the coefficients of its polynomial
representative.  The modulus is the monic irreducible of degree m whose
coefficient vector, read as a base-p integer with the constant term as the
least significant digit, is smallest.  This is not the Conway convention.

Arithmetic is table driven (numpy integer arrays), so the same field object
serves scalar :class:`FieldElement` arithmetic and vectorized matrix code.
"""
from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Optional

import numpy as np

__all__ = [
    "FieldError",
    "FiniteField",
    "FieldElement",
    "field_create",
    "field_arith",
    "frobenius",
    "square_root",
    "is_prime",
    "DEFAULT_FIELD_BOUND",
]

DEFAULT_FIELD_BOUND = 4096


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _polymod_p(a: list[int], b: list[int], p: int) -> list[int]:
    """Remainder of a by monic-or-not b over GF(p); constant term first."""
    a = [x % p for x in a]
    while a and a[-1] == 0:
        a.pop()
    inv_lead = pow(b[-1], p - 2, p)
    db = len(b) - 1
    while len(a) - 1 >= db and a:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - db
        for i, x in enumerate(b):
            a[shift + i] = (a[shift + i] - c * x) % p
        while a and a[-1] == 0:
            a.pop()
    return a


def _is_irreducible(poly: list[int], p: int) -> bool:
    m = len(poly) - 1
    if m == 1:
        return True
    for d in range(1, m // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _polymod_p(poly, list(low) + [1], p):
                return False
    return True


def canonical_modulus(p: int, m: int) -> tuple[int, ...]:
    if m == 1:
        return (0, 1)
    # enumerate in increasing base-p value (constant term least significant)
    for value in range(p ** m):
        low = [(value // p ** i) % p for i in range(m)]
        if low[0] == 0:
            continue
        poly = low + [1]
        if _is_irreducible(poly, p):
            return tuple(poly)
    raise FieldError(f"no irreducible polynomial of degree {m} over GF({p})")


class FiniteField:
    """GF(p^m); immutable after construction.  Use :func:`field_create`."""

    def __init__(self, p: int, m: int, bound: int = DEFAULT_FIELD_BOUND):
        if not is_prime(p):
            raise FieldError(f"{p} is not prime")
        if m < 1:
            raise FieldError("extension degree must be >= 1")
        q = p ** m
        if q > bound:
            raise FieldError(f"field size {q} exceeds bound {bound}")
        self.p, self.m, self.q = p, m, q
        self.modulus = canonical_modulus(p, m)
        self._build_tables()

    # -- construction -----------------------------------------------------
    def _build_tables(self):
        p, m, q = self.p, self.m, self.q
        codes = np.arange(q, dtype=np.int64)
        digits = np.stack([(codes // p ** i) % p for i in range(m)], axis=1)
        weights = p ** np.arange(m, dtype=np.int64)
        self.digits = digits
        self.add = (((digits[:, None, :] + digits[None, :, :]) % p) @ weights).astype(np.int64)
        self.neg = (((-digits) % p) @ weights).astype(np.int64)

        # x * element, as a code map, for building powers of a primitive root
        def mul_poly(a: int, b: int) -> int:
            da = [(a // p ** i) % p for i in range(m)]
            db = [(b // p ** i) % p for i in range(m)]
            prod = [0] * (2 * m - 1)
            for i, x in enumerate(da):
                if x:
                    for j, y in enumerate(db):
                        prod[i + j] += x * y
            r = _polymod_p(prod, list(self.modulus), p) if m > 1 else [prod[0] % p]
            return sum(c * p ** i for i, c in enumerate(r))

        self._mul_poly = mul_poly
        # primitive element of least code
        gen = None
        for cand in range(1, q):
            x, order = cand, 1
            while x != 1:
                x = mul_poly(x, cand)
                order += 1
            if order == q - 1:
                gen = cand
                break
        assert gen is not None
        self.primitive = gen
        exp = np.zeros(q - 1, dtype=np.int64)
        x = 1
        for i in range(q - 1):
            exp[i] = x
            x = mul_poly(x, gen)
        log = np.full(q, -1, dtype=np.int64)
        log[exp] = np.arange(q - 1)
        self.exp, self.log = exp, log
        mul = np.zeros((q, q), dtype=np.int64)
        nz = codes[1:]
        mul[1:, 1:] = exp[(log[nz][:, None] + log[nz][None, :]) % (q - 1)]
        self.mul = mul
        inv = np.zeros(q, dtype=np.int64)
        inv[nz] = exp[(-log[nz]) % (q - 1)]
        self.inv = inv
        self.frob = exp[(log[nz] * p) % (q - 1)]
        self.frob = np.concatenate([[0], self.frob]).astype(np.int64)

    # -- element access ---------------------------------------------------
    def __call__(self, value) -> "FieldElement":
        """Field element from a code-bearing element, or an integer taken mod p."""
        if isinstance(value, FieldElement):
            if value.field is not self:
                raise FieldError("element belongs to a different field")
            return value
        return FieldElement(self, int(value) % self.p)

    def element(self, code: int) -> "FieldElement":
        if not 0 <= code < self.q:
            raise FieldError(f"code {code} out of range for GF({self.q})")
        return FieldElement(self, int(code))

    def elements(self):
        return [FieldElement(self, c) for c in range(self.q)]

    @property
    def zero(self):
        return FieldElement(self, 0)

    @property
    def one(self):
        return FieldElement(self, 1)

    @property
    def gen(self):
        """The polynomial variable x (code p); for a prime field, 1."""
        return FieldElement(self, self.p if self.m > 1 else 1 % self.p)

    def from_int(self, n: int) -> int:
        """Code of the prime-field image of an integer."""
        return int(n) % self.p

    def frobenius_code(self, code: int, k: int = 1) -> int:
        for _ in range(k % self.m if self.m else 0):
            code = int(self.frob[code])
        return code

    def is_square_code(self, code: int) -> bool:
        return code == 0 or self.p == 2 or self.log[code] % 2 == 0

    def least_nonsquare(self) -> Optional["FieldElement"]:
        for c in range(1, self.q):
            if not self.is_square_code(c):
                return self.element(c)
        return None

    def prime_subfield_codes(self) -> range:
        return range(self.p)

    def descriptor(self) -> dict:
        return {"p": self.p, "m": self.m, "modulus": list(self.modulus)}

    def __repr__(self):
        return f"GF({self.p}^{self.m})"

    def __reduce__(self):
        return (field_create, (self.p, self.m))


@lru_cache(maxsize=None)
def _field(p: int, m: int) -> FiniteField:
    return FiniteField(p, m, bound=max(DEFAULT_FIELD_BOUND, p ** m))


def field_create(p: int, m: int = 1, bound: int = DEFAULT_FIELD_BOUND) -> FiniteField:
    """Canonical GF(p^m).  Fields are interned, so ``is`` identifies them."""
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if m < 1:
        raise FieldError("extension degree must be >= 1")
    if p ** m > bound:
        raise FieldError(f"field size {p ** m} exceeds bound {bound}")
    return _field(p, m)


class FieldElement:
    __slots__ = ("field", "code")

    def __init__(self, field: FiniteField, code: int):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "code", code)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise FieldError("field mismatch")
            return other.code
        if isinstance(other, int):
            return int(other) % self.field.p
        return NotImplemented

    def __add__(self, other):
        c = self._other(other)
        if c is NotImplemented:
            return c
        return FieldElement(self.field, int(self.field.add[self.code, c]))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, int(self.field.neg[self.code]))

    def __sub__(self, other):
        c = self._other(other)
        if c is NotImplemented:
            return c
        return FieldElement(self.field, int(self.field.add[self.code, self.field.neg[c]]))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        c = self._other(other)
        if c is NotImplemented:
            return c
        return FieldElement(self.field, int(self.field.mul[self.code, c]))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.code == 0:
            raise ZeroDivisionError("inverse of zero in " + repr(self.field))
        return FieldElement(self.field, int(self.field.inv[self.code]))

    def __truediv__(self, other):
        c = self._other(other)
        if c is NotImplemented:
            return c
        return self * FieldElement(self.field, c).inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if self.code == 0:
            if k < 0:
                raise ZeroDivisionError("inverse of zero")
            return FieldElement(self.field, 1 if k == 0 else 0)
        f = self.field
        return FieldElement(f, int(f.exp[(int(f.log[self.code]) * k) % (f.q - 1)]))

    def frobenius(self, k: int = 1) -> "FieldElement":
        return FieldElement(self.field, self.field.frobenius_code(self.code, k))

    def sqrt(self) -> Optional["FieldElement"]:
        return square_root(self)

    def is_zero(self) -> bool:
        return self.code == 0

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field is other.field and self.code == other.code
        if isinstance(other, int):
            return self.code == other % self.field.p and self.code < self.field.p
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.m, self.code))

    def __int__(self):
        return self.code

    def __index__(self):
        return self.code

    def __repr__(self):
        return f"{self.field!r}[{self.code}]"


def field_arith(x: FieldElement, y: Optional[FieldElement], op: str, k: int = 0) -> FieldElement:
    if y is not None and y.field is not x.field:
        raise FieldError("field mismatch")
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "inv":
        return x.inverse()
    if op == "neg":
        return -x
    if op == "pow":
        return x ** k
    raise ValueError(f"unknown field op {op!r}")


def frobenius(x: FieldElement, k: int) -> FieldElement:
    """x^(p^k)."""
    return x.frobenius(k)


def square_root(x: FieldElement) -> Optional[FieldElement]:
    """A square root of x (the one of smaller code), or None."""
    f = x.field
    if x.code == 0:
        return f.zero
    if not f.is_square_code(x.code):
        return None
    if f.p == 2:
        # squaring is the Frobenius; its inverse is Frobenius^(m-1)
        return x.frobenius(f.m - 1)
    half = int(f.log[x.code]) // 2
    r1 = int(f.exp[half])
    r2 = int(f.neg[r1])
    return f.element(min(r1, r2))
