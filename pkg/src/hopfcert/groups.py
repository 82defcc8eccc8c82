"""Matrix groups over GF(q): enumeration, dense indexing and predicates.

A group is stored as a 2-d array of entry codes (one row per element,
row-major entries) sorted by the element key.  The key reads the code
sequence as a base-q numeral, first entry most significant, so sorting by
key is lexicographic order on code sequences.  Dense indices follow that
order.  All products are computed on batches of matrices with the field's
lookup tables and mapped back to indices by binary search.
"""
from __future__ import annotations

import hashlib
import itertools
import os
import struct
from math import gcd
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .field import FieldElement, FiniteField, field_create, is_prime

__all__ = [
    "GroupError",
    "BoundExceeded",
    "CacheIntegrityError",
    "InvariantViolation",
    "MatOps",
    "Matrix",
    "GroupElement",
    "FiniteGroup",
    "Subgroup",
    "build_group",
    "expected_order",
    "element_order",
    "jordan_type",
    "in_P",
    "double_cosets",
    "conjugate_subgroup_orbit",
    "parse_prime_power",
    "DEFAULT_BOUND",
]

DEFAULT_BOUND = 2_000_000
FAMILIES = ("SL2", "PSL2", "SL3", "Sz")
_DIM = {"SL2": 2, "PSL2": 2, "SL3": 3, "Sz": 4}


class GroupError(ValueError):
    pass


class BoundExceeded(GroupError):
    pass


class InvariantViolation(RuntimeError):
    """A computed structure contradicts a fact that must hold."""


class CacheIntegrityError(InvariantViolation):
    pass


def parse_prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise GroupError(f"{q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            break
    if not is_prime(p):
        raise GroupError(f"{q} is not a prime power")
    m, r = 0, q
    while r % p == 0:
        r //= p
        m += 1
    if r != 1:
        raise GroupError(f"{q} is not a prime power")
    return p, m


def normalize_family(family: str) -> str:
    table = {f.lower(): f for f in FAMILIES}
    table.update({"sz": "Sz", "2b2": "Sz", "suzuki": "Sz"})
    try:
        return table[family.lower()]
    except KeyError:
        raise GroupError(f"unknown family {family!r}") from None


def expected_order(family: str, q: int) -> int:
    family = normalize_family(family)
    if family == "SL2":
        return q * (q * q - 1)
    if family == "PSL2":
        return q * (q * q - 1) // gcd(2, q - 1)
    if family == "SL3":
        return q ** 3 * (q * q - 1) * (q ** 3 - 1)
    return q * q * (q - 1) * (q * q + 1)


# -- vectorized matrix arithmetic -------------------------------------------

class MatOps:
    """Batched d x d matrix arithmetic over one field, on code arrays."""

    def __init__(self, field: FiniteField, dim: int):
        self.F, self.d = field, dim
        self.prime = field.m == 1
        self.char2 = field.p == 2
        self._mul_flat = np.ascontiguousarray(field.mul.ravel())
        self._add_flat = np.ascontiguousarray(field.add.ravel())

    def add(self, a, b):
        if self.prime:
            return (a.astype(np.int64) + b) % self.F.p
        if self.char2:
            return np.bitwise_xor(a.astype(np.int64), b)
        return self._add_flat.take(np.asarray(a, dtype=np.int64) * self.F.q + b)

    def mulf(self, a, b):
        if self.prime:
            return (a.astype(np.int64) * b) % self.F.p
        return self._mul_flat.take(np.asarray(a, dtype=np.int64) * self.F.q + b)

    def neg(self, a):
        return self.F.neg[a]

    def matmul(self, A, B):
        """A, B of shape (..., d, d) code arrays; broadcasting allowed."""
        A = np.asarray(A)
        B = np.asarray(B)
        if self.prime:
            return (A.astype(np.int64) @ B.astype(np.int64)) % self.F.p
        d = self.d
        shape = np.broadcast_shapes(A.shape, B.shape)
        A = np.broadcast_to(A, shape)
        B = np.broadcast_to(B, shape)
        # entries as contiguous planes
        a = [[np.ascontiguousarray(A[..., i, k], dtype=np.int64) * self.F.q for k in range(d)]
             for i in range(d)]
        b = [[np.ascontiguousarray(B[..., k, j], dtype=np.int64) for j in range(d)] for k in range(d)]
        out = np.empty(shape, dtype=np.int64)
        mf = self._mul_flat
        for i in range(d):
            for j in range(d):
                acc = mf.take(a[i][0] + b[0][j])
                for k in range(1, d):
                    term = mf.take(a[i][k] + b[k][j])
                    if self.char2:
                        np.bitwise_xor(acc, term, out=acc)
                    else:
                        acc = self._add_flat.take(acc * self.F.q + term)
                out[..., i, j] = acc
        return out

    def det(self, A):
        """Leibniz determinant of (..., k, k) code arrays."""
        A = np.asarray(A)
        k = A.shape[-1]
        if k == 1:
            return A[..., 0, 0].astype(np.int64)
        total = None
        for perm in itertools.permutations(range(k)):
            term = A[..., 0, perm[0]].astype(np.int64)
            for r in range(1, k):
                term = self.mulf(term, A[..., r, perm[r]])
            inversions = sum(1 for i in range(k) for j in range(i + 1, k) if perm[i] > perm[j])
            if inversions % 2:
                term = self.neg(term)
            total = term if total is None else self.add(total, term)
        return total

    def inverse(self, A):
        """Inverse of determinant-one matrices via the adjugate."""
        A = np.asarray(A)
        d = self.d
        out = np.zeros(A.shape, dtype=np.int64)
        rows = list(range(d))
        for i in range(d):
            for j in range(d):
                keep_r = [r for r in rows if r != i]
                keep_c = [c for c in rows if c != j]
                minor = A[..., keep_r, :][..., :, keep_c]
                c = self.det(minor)
                if (i + j) % 2:
                    c = self.neg(c)
                out[..., j, i] = c
        return out

    def trace(self, A):
        A = np.asarray(A)
        t = A[..., 0, 0].astype(np.int64)
        for i in range(1, self.d):
            t = self.add(t, A[..., i, i])
        return t

    def identity(self):
        return np.eye(self.d, dtype=np.int64)


class Matrix:
    """A single d x d matrix over a finite field, entries as codes."""

    __slots__ = ("field", "dim", "codes")

    def __init__(self, field: FiniteField, dim: int, codes: Sequence[int]):
        codes = tuple(int(c) for c in codes)
        if len(codes) != dim * dim:
            raise GroupError("wrong number of matrix entries")
        if any(not 0 <= c < field.q for c in codes):
            raise GroupError("entry code out of range")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "codes", codes)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def from_elements(cls, rows: Sequence[Sequence]) -> "Matrix":
        flat = [x for r in rows for x in r]
        field = next(x.field for x in flat if isinstance(x, FieldElement))
        return cls(field, len(rows), [field(x).code for x in flat])

    @classmethod
    def from_ints(cls, field: FiniteField, rows: Sequence[Sequence[int]]) -> "Matrix":
        """Entries given as integers, read in the prime field (negatives allowed)."""
        return cls(field, len(rows), [field.from_int(x) for r in rows for x in r])

    @classmethod
    def identity(cls, field: FiniteField, dim: int) -> "Matrix":
        return cls(field, dim, np.eye(dim, dtype=np.int64).ravel())

    def array(self) -> np.ndarray:
        return np.array(self.codes, dtype=np.int64).reshape(self.dim, self.dim)

    def entry(self, i: int, j: int) -> FieldElement:
        return self.field.element(self.codes[i * self.dim + j])

    def _ops(self):
        return MatOps(self.field, self.dim)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return Matrix(self.field, self.dim, self._ops().matmul(self.array(), other.array()).ravel())

    __mul__ = __matmul__

    def inverse(self) -> "Matrix":
        ops = self._ops()
        det = int(ops.det(self.array()))
        if det == 0:
            raise ZeroDivisionError("singular matrix")
        adj = ops.inverse(self.array())
        dinv = int(self.field.inv[det])
        return Matrix(self.field, self.dim, ops.mulf(adj, dinv).ravel())

    def det(self) -> FieldElement:
        return self.field.element(int(self._ops().det(self.array())))

    def trace(self) -> FieldElement:
        return self.field.element(int(self._ops().trace(self.array())))

    def neg(self) -> "Matrix":
        return Matrix(self.field, self.dim, [int(self.field.neg[c]) for c in self.codes])

    def transpose(self) -> "Matrix":
        return Matrix(self.field, self.dim, self.array().T.ravel())

    def rank_minus_identity(self) -> int:
        a = self.array()
        f = self.field
        for i in range(self.dim):
            a[i, i] = f.add[a[i, i], f.neg[1]]
        return _rank(a, f)

    def to_json(self) -> dict:
        return {"dim": self.dim, "entries": list(self.codes)}

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.field is other.field and self.codes == other.codes

    def __hash__(self):
        return hash(self.codes)

    def __repr__(self):
        rows = [" ".join(str(c) for c in self.codes[i * self.dim:(i + 1) * self.dim])
                for i in range(self.dim)]
        return "Matrix(" + "; ".join(rows) + ")"


def _rank(a: np.ndarray, f: FiniteField) -> int:
    a = a.copy()
    n_rows, n_cols = a.shape
    rank = 0
    for col in range(n_cols):
        pivot = next((r for r in range(rank, n_rows) if a[r, col] != 0), None)
        if pivot is None:
            continue
        a[[rank, pivot]] = a[[pivot, rank]]
        inv = f.inv[a[rank, col]]
        a[rank] = f.mul[inv, a[rank]]
        for r in range(n_rows):
            if r != rank and a[r, col] != 0:
                factor = f.neg[a[r, col]]
                a[r] = f.add[a[r], f.mul[factor, a[rank]]]
        rank += 1
    return rank


# -- the group object --------------------------------------------------------

class FiniteGroup:
    """A fully enumerated matrix group with dense indexing.

    ``elements[i]`` is the row-major code vector of element i; for PSL2 it
    is the canonical representative of {A, -A}.
    """

    def __init__(self, family: str, q: int, elements: np.ndarray, projective: bool = False):
        self.family = normalize_family(family)
        self.q = q
        p, m = parse_prime_power(q)
        self.field = field_create(p, m, bound=max(q, 4096))
        self.dim = _DIM[self.family]
        self.projective = projective
        self.ops = MatOps(self.field, self.dim)
        self._wide = q ** (self.dim * self.dim) >= 2 ** 63
        self.elements = np.ascontiguousarray(elements, dtype=np.uint8 if q < 256 else np.uint16)
        self.keys = self.key(self.elements)
        if np.any(self.keys[1:] <= self.keys[:-1]):
            raise InvariantViolation("elements not strictly sorted by key")
        self.order = len(self.elements)
        self._inv = None
        self._orders = None
        self._in_p = None
        self.identity_index = self.index_of(self.ops.identity().reshape(1, -1))[0]

    # keys and lookup
    def key(self, flat: np.ndarray) -> np.ndarray:
        flat = np.asarray(flat)
        if self._wide:
            # fixed-width big-endian bytes sort like the base-q numeral
            return np.ascontiguousarray(flat.astype(">u2")).view(
                np.dtype((np.void, 2 * flat.shape[1]))).ravel()
        k = np.zeros(flat.shape[0], dtype=np.int64)
        for c in range(flat.shape[1]):
            k = k * self.q + flat[:, c]
        return k

    def canonicalize(self, mats: np.ndarray) -> np.ndarray:
        """Flatten (n, d, d) or (n, d*d) codes, projecting to {A, -A} for PSL2."""
        flat = np.asarray(mats, dtype=np.int64).reshape(-1, self.dim * self.dim)
        if not self.projective:
            return flat
        neg = self.field.neg[flat]
        ka, kb = self.key(flat), self.key(neg)
        return np.where((kb < ka)[:, None], neg, flat)

    def lookup(self, mats: np.ndarray) -> np.ndarray:
        """Dense indices, -1 for matrices not in the group."""
        flat = self.canonicalize(mats)
        k = self.key(flat)
        pos = np.searchsorted(self.keys, k)
        pos = np.minimum(pos, self.order - 1)
        found = self.keys[pos] == k
        return np.where(found, pos, -1)

    def index_of(self, mats) -> np.ndarray:
        idx = self.lookup(mats)
        if np.any(idx < 0):
            raise GroupError("matrix not in group")
        return idx

    def index_of_matrix(self, m: Matrix) -> int:
        return int(self.index_of(m.array().reshape(1, -1))[0])

    def mats(self, idx) -> np.ndarray:
        idx = np.asarray(idx)
        return self.elements[idx].reshape(idx.shape + (self.dim, self.dim)).astype(np.int64)

    def matrix(self, i: int) -> Matrix:
        return Matrix(self.field, self.dim, self.elements[int(i)])

    def element(self, i: int) -> "GroupElement":
        return GroupElement(self, int(i))

    def __len__(self):
        return self.order

    # arithmetic on dense indices
    def mul(self, a, b) -> np.ndarray:
        """Products a[i]*b[i] (broadcasting), as dense indices."""
        a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
        prod = self.ops.matmul(self.mats(a), self.mats(b))
        return self.index_of(prod.reshape(-1, self.dim * self.dim)).reshape(a.shape)

    def mul_chain(self, *idx) -> np.ndarray:
        arrs = np.broadcast_arrays(*[np.asarray(i) for i in idx])
        acc = self.mats(arrs[0])
        for a in arrs[1:]:
            acc = self.ops.matmul(acc, self.mats(a))
        return self.index_of(acc.reshape(-1, self.dim * self.dim)).reshape(arrs[0].shape)

    @property
    def inverses(self) -> np.ndarray:
        if self._inv is None:
            inv_m = self.ops.inverse(self.mats(np.arange(self.order)))
            self._inv = self.index_of(inv_m.reshape(self.order, -1))
        return self._inv

    def inv(self, a):
        return self.inverses[np.asarray(a)]

    def conj(self, g, x):
        """g x g^{-1} as dense indices."""
        g, x = np.broadcast_arrays(np.asarray(g), np.asarray(x))
        return self.mul_chain(g, x, self.inverses[g])

    def power(self, a, k: int):
        a = np.asarray(a)
        result = np.full(a.shape, self.identity_index)
        base = a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    # element invariants
    @property
    def element_orders(self) -> np.ndarray:
        if self._orders is None:
            self._orders = _orders_of(self, np.arange(self.order))
        return self._orders

    def trace_codes(self, idx=None) -> np.ndarray:
        idx = np.arange(self.order) if idx is None else np.asarray(idx)
        return self.ops.trace(self.mats(idx))

    @property
    def in_p_mask(self) -> np.ndarray:
        if self._in_p is None:
            self._in_p = _in_p_mask(self, np.arange(self.order))
        return self._in_p

    def descriptor(self) -> dict:
        return {"family": self.family, "q": self.q, "order": self.order,
                "field": self.field.descriptor(), "projective": self.projective}

    def __repr__(self):
        return f"{self.family}({self.q})[order {self.order}]"


class GroupElement:
    __slots__ = ("group", "index")

    def __init__(self, group: FiniteGroup, index: int):
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "index", int(index))

    def __setattr__(self, name, value):
        raise AttributeError("GroupElement is immutable")

    @property
    def matrix(self) -> Matrix:
        return self.group.matrix(self.index)

    @property
    def projective(self) -> bool:
        return self.group.projective

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.group, int(self.group.mul(self.index, other.index)))

    def inverse(self) -> "GroupElement":
        return GroupElement(self.group, int(self.group.inverses[self.index]))

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return GroupElement(self.group, int(self.group.power(self.index, k)))

    def __eq__(self, other):
        return isinstance(other, GroupElement) and other.group is self.group and other.index == self.index

    def __hash__(self):
        return hash((id(self.group), self.index))

    def __repr__(self):
        return f"<{self.group.family}({self.group.q}) #{self.index} {self.matrix!r}>"


class Subgroup:
    def __init__(self, parent: FiniteGroup, members: Iterable[int], generators: Sequence[int] = (),
                 label: str = ""):
        self.parent = parent
        self.members = np.unique(np.asarray(list(members), dtype=np.int64))
        self.generators = [int(g) for g in generators]
        self.label = label
        self._set = None
        if parent.identity_index not in self.member_set:
            raise GroupError("subgroup does not contain the identity")

    @classmethod
    def generated(cls, parent: FiniteGroup, generators: Sequence[int], label: str = "") -> "Subgroup":
        gens = np.asarray(sorted(set(int(g) for g in generators)), dtype=np.int64)
        known = {parent.identity_index}
        frontier = np.array([parent.identity_index])
        while len(frontier) and len(gens):
            prods = parent.mul(frontier[:, None], gens[None, :]).ravel()
            new = np.setdiff1d(np.unique(prods), np.fromiter(known, dtype=np.int64))
            known.update(int(x) for x in new)
            frontier = new
        return cls(parent, known, generators, label)

    @property
    def member_set(self) -> frozenset:
        if self._set is None:
            self._set = frozenset(int(x) for x in self.members)
        return self._set

    @property
    def order(self) -> int:
        return len(self.members)

    def __len__(self):
        return self.order

    def __contains__(self, g) -> bool:
        return int(g) in self.member_set

    def contains_mask(self, idx) -> np.ndarray:
        return np.isin(np.asarray(idx), self.members)

    def is_closed(self) -> bool:
        prods = self.parent.mul(self.members[:, None], self.members[None, :])
        return bool(np.all(np.isin(prods, self.members))
                    and np.all(np.isin(self.parent.inverses[self.members], self.members)))

    def is_abelian(self) -> bool:
        a = self.parent.mul(self.members[:, None], self.members[None, :])
        return bool(np.array_equal(a, a.T))

    def conjugate(self, g: int, label: str = "") -> "Subgroup":
        conj = self.parent.conj(np.full(self.order, int(g)), self.members)
        gens = [int(x) for x in self.parent.conj(np.full(len(self.generators), int(g)),
                                                 np.asarray(self.generators, dtype=np.int64))]
        return Subgroup(self.parent, conj, gens, label or self.label)

    def key(self) -> tuple:
        return tuple(int(x) for x in self.members)

    def to_json(self) -> dict:
        return {"label": self.label, "order": self.order, "members": [int(x) for x in self.members]}

    def __eq__(self, other):
        return isinstance(other, Subgroup) and other.parent is self.parent and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Subgroup({self.label or '?'}, order {self.order} in {self.parent!r})"


# -- enumeration -------------------------------------------------------------

def _sort_unique(G_key, flat: np.ndarray) -> np.ndarray:
    keys = G_key(flat)
    _, first = np.unique(keys, return_index=True)
    return flat[first]


class _KeyHelper:
    """Key computation without a finished group object."""

    def __init__(self, q: int, dim: int):
        self.q, self.dim = q, dim
        self.wide = q ** (dim * dim) >= 2 ** 63

    def __call__(self, flat):
        flat = np.asarray(flat)
        if self.wide:
            return np.ascontiguousarray(flat.astype(">u2")).view(
                np.dtype((np.void, 2 * flat.shape[1]))).ravel()
        k = np.zeros(flat.shape[0], dtype=np.int64)
        for c in range(flat.shape[1]):
            k = k * self.q + flat[:, c]
        return k


def _enumerate_sl2(F: FiniteField) -> np.ndarray:
    q = F.q
    codes = np.arange(q)
    out = []
    # a != 0: d = (1 + b c) / a
    a, b, c = np.meshgrid(codes[1:], codes, codes, indexing="ij")
    a, b, c = a.ravel(), b.ravel(), c.ravel()
    d = F.mul[F.add[1, F.mul[b, c]], F.inv[a]]
    out.append(np.stack([a, b, c, d], axis=1))
    # a = 0: b c = -1, d free
    b, d = np.meshgrid(codes[1:], codes, indexing="ij")
    b, d = b.ravel(), d.ravel()
    c = F.neg[F.inv[b]]
    out.append(np.stack([np.zeros_like(b), b, c, d], axis=1))
    return np.concatenate(out).astype(np.int64)


def _closure(F: FiniteField, dim: int, gens: Sequence[np.ndarray], limit: int) -> np.ndarray:
    ops = MatOps(F, dim)
    keyf = _KeyHelper(F.q, dim)
    gens = np.stack([np.asarray(g, dtype=np.int64).reshape(dim, dim) for g in gens])
    ident = np.eye(dim, dtype=np.int64).reshape(1, -1)
    known_flat = [ident]
    known_keys = keyf(ident)
    frontier = ident
    while len(frontier):
        prods = ops.matmul(frontier.reshape(-1, 1, dim, dim), gens[None]).reshape(-1, dim * dim)
        k = keyf(prods)
        k, first = np.unique(k, return_index=True)
        prods = prods[first]
        fresh = ~np.isin(k, known_keys)
        frontier = prods[fresh]
        if len(frontier):
            known_flat.append(frontier)
            known_keys = np.concatenate([known_keys, k[fresh]])
            if len(known_keys) > limit:
                raise BoundExceeded(f"closure exceeded {limit} elements")
    flat = np.concatenate(known_flat)
    return flat[np.argsort(keyf(flat), kind="stable")]


def transvection(F: FiniteField, dim: int, i: int, j: int, t: int) -> np.ndarray:
    m = np.eye(dim, dtype=np.int64)
    m[i, j] = t
    return m


def sz_theta(F: FiniteField, code: int) -> int:
    """theta = Frobenius^(n+1) on GF(2^(2n+1))."""
    n = (F.m - 1) // 2
    return F.frobenius_code(code, n + 1)


def sz_theta_inv(F: FiniteField, code: int) -> int:
    n = (F.m - 1) // 2
    return F.frobenius_code(code, n)


def sz_u(F: FiniteField, a: int, b: int) -> np.ndarray:
    th = lambda x: sz_theta(F, x)
    add, mul = F.add, F.mul
    ta = th(a)
    r20 = add[mul[a, ta], b]
    r30 = add[add[mul[mul[a, a], ta], mul[a, b]], th(b)]
    return np.array([[1, 0, 0, 0],
                     [a, 1, 0, 0],
                     [r20, ta, 1, 0],
                     [r30, b, a, 1]], dtype=np.int64)


def sz_t(F: FiniteField, kappa: int) -> np.ndarray:
    a1 = sz_theta_inv(F, int(F.mul[kappa, sz_theta(F, kappa)]))
    a2 = sz_theta_inv(F, kappa)
    return np.diag([a1, a2, int(F.inv[a2]), int(F.inv[a1])]).astype(np.int64)


def sz_tau() -> np.ndarray:
    return np.fliplr(np.eye(4, dtype=np.int64))


def _basis_codes(F: FiniteField) -> list[int]:
    return [F.p ** k for k in range(F.m)]


def _generators(family: str, F: FiniteField) -> list[np.ndarray]:
    if family == "SL3":
        gens = []
        for t in _basis_codes(F):
            for i, j in [(0, 1), (1, 2), (1, 0), (2, 1)]:
                gens.append(transvection(F, 3, i, j, t))
        return gens
    if family == "Sz":
        gens = [sz_u(F, a, 0) for a in _basis_codes(F)]
        gens += [sz_u(F, 0, b) for b in _basis_codes(F)]
        gens.append(sz_t(F, F.primitive))
        gens.append(sz_tau())
        return gens
    raise GroupError(f"no generator set for {family}")


# -- disk cache --------------------------------------------------------------

_MAGIC = b"HOPFCERT-GROUP\x00\x01"


def cache_dir() -> Optional[Path]:
    env = os.environ.get("HOPFCERT_CACHE_DIR")
    if env is not None:
        return Path(env) if env else None
    return Path.home() / ".cache" / "hopfcert"


def _cache_path(directory: Path, family: str, F: FiniteField) -> Path:
    mod = "".join(str(c) for c in F.modulus)
    return directory / f"{family}_{F.q}_{F.p}_{F.m}_{mod}.grp"


def _header(family: str, F: FiniteField, order: int, dim: int, projective: bool) -> bytes:
    fam = family.encode().ljust(8, b"\x00")
    mod = list(F.modulus) + [0] * (8 - len(F.modulus))
    return _MAGIC + fam + struct.pack("<IIIQBB", F.q, F.p, F.m, order, dim, int(projective)) \
        + struct.pack("<8I", *mod)


def save_cache(path: Path, family: str, F: FiniteField, elements: np.ndarray, projective: bool):
    dim = int(round(elements.shape[1] ** 0.5))
    payload = np.ascontiguousarray(elements, dtype="<u2").tobytes()
    data = _header(family, F, len(elements), dim, projective) + hashlib.sha256(payload).digest() + payload
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_bytes(data)
    tmp.replace(path)


def load_cache(path: Path, family: str, F: FiniteField, projective: bool) -> np.ndarray:
    raw = path.read_bytes()
    dim = _DIM[family]
    order = expected_order(family, F.q)
    head = _header(family, F, order, dim, projective)
    if raw[:len(head)] != head:
        raise CacheIntegrityError(f"cache header mismatch in {path}")
    digest = raw[len(head):len(head) + 32]
    payload = raw[len(head) + 32:]
    if hashlib.sha256(payload).digest() != digest:
        raise CacheIntegrityError(f"cache checksum mismatch in {path}")
    arr = np.frombuffer(payload, dtype="<u2")
    if arr.size != order * dim * dim:
        raise CacheIntegrityError(f"cache payload size mismatch in {path}")
    return arr.reshape(order, dim * dim).astype(np.int64)


# -- construction ------------------------------------------------------------

_GROUPS: dict = {}


def default_bound() -> int:
    env = os.environ.get("HOPFCERT_BOUND")
    return int(env) if env else DEFAULT_BOUND


def build_group(family: str, q: int, bound: Optional[int] = None, use_cache: bool = True,
                allow_large: bool = False) -> FiniteGroup:
    """Enumerate one of SL2, PSL2, SL3, Sz over GF(q).

    Groups are memoized in-process; with ``use_cache`` they are also stored on
    disk (see :func:`cache_dir`).  A corrupted cache file raises
    :class:`CacheIntegrityError` rather than being rebuilt silently.
    """
    family = normalize_family(family)
    p, m = parse_prime_power(q)
    if family == "Sz" and (p != 2 or m % 2 == 0 or m < 3):
        raise GroupError("Sz requires q = 2^(2n+1) with n >= 1")
    bound = default_bound() if bound is None else bound
    order = expected_order(family, q)
    if order > bound and not allow_large:
        raise BoundExceeded(f"|{family}({q})| = {order} exceeds bound {bound}")
    memo = (family, q)
    if memo in _GROUPS:
        return _GROUPS[memo]
    F = field_create(p, m, bound=max(q, 4096))
    projective = family == "PSL2"
    directory = cache_dir() if use_cache else None
    path = _cache_path(directory, family, F) if directory is not None else None
    if path is not None and path.exists():
        flat = load_cache(path, family, F, projective)
    else:
        flat = _enumerate(family, F, order)
        if path is not None:
            save_cache(path, family, F, flat, projective)
    G = FiniteGroup(family, q, flat, projective=projective)
    if G.order != order:
        raise InvariantViolation(f"enumerated {G.order} elements, expected {order}")
    _GROUPS[memo] = G
    return G


def _enumerate(family: str, F: FiniteField, order: int) -> np.ndarray:
    keyf = _KeyHelper(F.q, _DIM[family])
    if family == "SL2":
        flat = _enumerate_sl2(F)
    elif family == "PSL2":
        flat = _enumerate_sl2(F)
        neg = F.neg[flat]
        flat = np.where((keyf(neg) < keyf(flat))[:, None], neg, flat)
    else:
        flat = _closure(F, _DIM[family], _generators(family, F), limit=order)
    flat = _sort_unique(keyf, flat)
    if len(flat) != order:
        raise InvariantViolation(f"{family}({F.q}): enumerated {len(flat)} elements, expected {order}")
    return flat


def clear_memo():
    _GROUPS.clear()


# -- element predicates -------------------------------------------------------

def _is_identity(G: FiniteGroup, mats: np.ndarray) -> np.ndarray:
    eye = np.eye(G.dim, dtype=np.int64)
    hit = np.all(mats == eye, axis=(-2, -1))
    if G.projective:
        hit |= np.all(mats == G.field.neg[eye], axis=(-2, -1))
    return hit


def _orders_of(G: FiniteGroup, idx: np.ndarray) -> np.ndarray:
    base = G.mats(idx)
    cur = base.copy()
    orders = np.zeros(len(idx), dtype=np.int64)
    active = np.arange(len(idx))
    k = 1
    while len(active):
        done = _is_identity(G, cur)
        orders[active[done]] = k
        keep = ~done
        active, cur, base = active[keep], cur[keep], base[keep]
        cur = G.ops.matmul(cur, base)
        k += 1
        if k > G.order + 1:
            raise InvariantViolation("element order exceeds group order")
    return orders


def element_order(g: GroupElement) -> int:
    G = g.group
    if G._orders is not None:
        return int(G._orders[g.index])
    return int(_orders_of(G, np.array([g.index]))[0])


def jordan_type(u: GroupElement) -> tuple:
    G = u.group
    if G.dim != 3:
        raise GroupError("Jordan type is defined here for SL3 only")
    if not in_P(u):
        raise GroupError("element is not unipotent")
    r = u.matrix.rank_minus_identity()
    return {0: (1,), 1: (2, 1), 2: (3,)}[r]


def _in_p_mask(G: FiniteGroup, idx: np.ndarray) -> np.ndarray:
    F = G.field
    mats = G.mats(idx)
    if G.family in ("SL2", "PSL2"):
        tr = G.ops.trace(mats)
        two = F.from_int(2)
        hit = tr == two
        if G.projective:
            hit |= tr == F.neg[two]
        return hit
    if G.family == "SL3":
        ops = G.ops
        three = F.from_int(3)
        tr = ops.trace(mats)
        # sum of principal 2x2 minors
        s = None
        for i, j in [(0, 1), (0, 2), (1, 2)]:
            minor = ops.det(mats[..., [i, j], :][..., :, [i, j]])
            s = minor if s is None else ops.add(s, minor)
        return (tr == three) & (s == three)
    # Sz: 2-elements have order dividing 4
    orders = G.element_orders[idx] if G._orders is not None else _orders_of(G, idx)
    return np.isin(orders, (1, 2, 4))


def in_P(g: GroupElement) -> bool:
    G = g.group
    if G._in_p is not None:
        return bool(G._in_p[g.index])
    return bool(_in_p_mask(G, np.array([g.index]))[0])


# -- cosets and orbits ---------------------------------------------------------

def double_cosets(M: Subgroup) -> list[np.ndarray]:
    G = M.parent
    assigned = np.full(G.order, -1, dtype=np.int64)
    cosets = []
    mm = M.members
    for g in range(G.order):
        if assigned[g] >= 0:
            continue
        coset = np.unique(G.mul_chain(mm[:, None], np.full((len(mm), len(mm)), g), mm[None, :]))
        assigned[coset] = len(cosets)
        cosets.append(coset)
    return cosets


def double_coset(M: Subgroup, g: int) -> np.ndarray:
    G = M.parent
    mm = M.members
    return np.unique(G.mul_chain(mm[:, None], np.full((len(mm), len(mm)), int(g)), mm[None, :]))


def conjugate_subgroup_orbit(M: Subgroup, acting: Optional[np.ndarray] = None) -> list[Subgroup]:
    """Distinct conjugates g M g^-1, sorted by member tuple."""
    G = M.parent
    acting = np.arange(G.order) if acting is None else np.asarray(acting)
    conj = G.conj(acting[:, None], M.members[None, :])
    conj.sort(axis=1)
    uniq = np.unique(conj, axis=0)
    return [Subgroup(G, row, label=M.label) for row in uniq]


def normalizer_order(M: Subgroup) -> int:
    G = M.parent
    conj = G.conj(np.arange(G.order)[:, None], M.members[None, :])
    return int(np.sum(np.all(np.isin(conj, M.members), axis=1)))
