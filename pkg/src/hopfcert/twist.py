"""Small-scale verifier for the twist Omega_{M, omega} and the coproduct of c_tau.

Everything here is computed in the group basis of KG^{(x)k}, with
coefficients in Q(zeta_N), N the exponent of M.  Nothing from this module is
used by :func:`hopfcert.obstruction.certify`; it exists to check, on small
cases, that the twisted coproduct of c_tau really produces y_chi.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Callable, Optional

import numpy as np

from .catalog import invariant_factors, trivially_meets
from .characters import ClassFunction
from .exact import Cyclotomic
from .groups import FiniteGroup, GroupError, Subgroup, double_coset

__all__ = [
    "TwistError",
    "TensorVector",
    "PairedDecomposition",
    "Twist",
    "paired_decomposition",
    "standard_cocycle",
    "second_cocycle",
    "corrupted_cocycle",
    "trivial_cocycle",
    "build_twist",
    "idempotents",
    "verify_idempotents",
    "verify_twist_axioms",
    "coproduct_c_tau",
    "verify_prop_key",
    "TWIST_BOUND",
]

TWIST_BOUND = 16


class TwistError(GroupError):
    pass


class TensorVector:
    """Sparse element of KG^{(x)rank}: keys are tuples of element indices."""

    def __init__(self, group: FiniteGroup, rank: int, order: int, coeffs: Optional[dict] = None):
        self.group = group
        self.rank = rank
        self.order = order  # cyclotomic order of the coefficients
        self.coeffs = {}
        for k, v in (coeffs or {}).items():
            v = _cyc(order, v)
            if v:
                self.coeffs[tuple(int(x) for x in k)] = v

    @classmethod
    def one(cls, group: FiniteGroup, rank: int, order: int) -> "TensorVector":
        return cls(group, rank, order, {(group.identity_index,) * rank: 1})

    def __add__(self, other: "TensorVector") -> "TensorVector":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return TensorVector(self.group, self.rank, self.order, out)

    def __sub__(self, other: "TensorVector") -> "TensorVector":
        return self + other.scale(-1)

    def scale(self, c) -> "TensorVector":
        return TensorVector(self.group, self.rank, self.order,
                            {k: v * c for k, v in self.coeffs.items()})

    def __mul__(self, other: "TensorVector") -> "TensorVector":
        if other.rank != self.rank or other.group is not self.group:
            raise TwistError("tensor rank or group mismatch")
        if not self.coeffs or not other.coeffs:
            return TensorVector(self.group, self.rank, self.order)
        a = np.array(list(self.coeffs), dtype=np.int64)
        b = np.array(list(other.coeffs), dtype=np.int64)
        # componentwise products, shape (|a|, |b|, rank)
        prod = np.stack([self.group.mul(a[:, None, r], b[None, :, r]) for r in range(self.rank)],
                        axis=-1)
        ca, cb = list(self.coeffs.values()), list(other.coeffs.values())
        out: dict = {}
        for i, x in enumerate(ca):
            row = prod[i]
            for j, y in enumerate(cb):
                key = tuple(row[j].tolist())
                v = x * y
                out[key] = out[key] + v if key in out else v
        return TensorVector(self.group, self.rank, self.order, out)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, TensorVector) and (self - other).is_zero()

    def support(self) -> set:
        return set(self.coeffs)

    def __repr__(self):
        return f"TensorVector(rank {self.rank}, {len(self.coeffs)} terms)"


def _cyc(order: int, v) -> Cyclotomic:
    return v if isinstance(v, Cyclotomic) else Cyclotomic.from_rational(order, Fraction(v))


def _delta_left(T: TensorVector) -> TensorVector:
    """(Delta (x) id) on a rank-2 tensor."""
    return TensorVector(T.group, 3, T.order, {(a, a, b): c for (a, b), c in T.coeffs.items()})


def _delta_right(T: TensorVector) -> TensorVector:
    return TensorVector(T.group, 3, T.order, {(a, b, b): c for (a, b), c in T.coeffs.items()})


def _pad_left(T: TensorVector) -> TensorVector:
    """1 (x) T."""
    e = T.group.identity_index
    return TensorVector(T.group, 3, T.order, {(e,) + k: c for k, c in T.coeffs.items()})


def _pad_right(T: TensorVector) -> TensorVector:
    e = T.group.identity_index
    return TensorVector(T.group, 3, T.order, {k + (e,): c for k, c in T.coeffs.items()})


def _counit_left(T: TensorVector) -> TensorVector:
    out: dict = {}
    for (a, b), c in T.coeffs.items():
        out[(b,)] = out[(b,)] + c if (b,) in out else c
    return TensorVector(T.group, 1, T.order, out)


def _counit_right(T: TensorVector) -> TensorVector:
    out: dict = {}
    for (a, b), c in T.coeffs.items():
        out[(a,)] = out[(a,)] + c if (a,) in out else c
    return TensorVector(T.group, 1, T.order, out)


# -- decomposition of M ---------------------------------------------------------

@dataclass
class PairedDecomposition:
    """Generators g_1..g_2k of M with orders (e_1, e_1, ..., e_k, e_k).

    ``coords[i]`` is the exponent vector of ``M.members[i]``.
    """
    generators: tuple
    orders: tuple
    coords: dict = field(repr=False)

    @property
    def exponent(self) -> int:
        return lcm(*self.orders) if self.orders else 1

    def characters(self) -> list:
        return list(itertools.product(*(range(d) for d in self.orders)))


def _span(G: FiniteGroup, gens: list, orders: list) -> dict:
    """exponent vector -> element for the product map; may have collisions."""
    out = {}
    for exps in itertools.product(*(range(d) for d in orders)):
        x = G.identity_index
        for g, k in zip(gens, exps):
            x = int(G.mul(x, G.power(g, k)))
        out[exps] = x
    return out


def paired_decomposition(M: Subgroup) -> PairedDecomposition:
    """A basis realising M = C_e1 x C_e1 x ... by backtracking over elements."""
    if M.order > TWIST_BOUND:
        raise TwistError(f"|M| = {M.order} exceeds the twist verifier bound {TWIST_BOUND}")
    if not M.is_abelian():
        raise TwistError("M is not abelian")
    G = M.parent
    factors = sorted(invariant_factors(M), reverse=True)
    if len(factors) % 2 or any(factors[i] != factors[i + 1] for i in range(0, len(factors), 2)):
        raise TwistError(f"M has unpaired invariant factors {tuple(factors)}")
    orders = G.element_orders[M.members]
    members = [int(x) for x in M.members]

    def extend(chosen: list, seen: set):
        k = len(chosen)
        if k == len(factors):
            return chosen
        for g, o in zip(members, orders):
            if o != factors[k]:
                continue
            # g must meet the span of the previous generators trivially
            powers = {int(G.power(g, j)) for j in range(1, factors[k])}
            if powers & seen:
                continue
            new_seen = set(seen)
            for s in list(seen) + [G.identity_index]:
                for j in range(1, factors[k]):
                    new_seen.add(int(G.mul(s, G.power(g, j))))
            got = extend(chosen + [g], new_seen)
            if got:
                return got
        return None

    gens = extend([], {G.identity_index})
    if gens is None:
        raise TwistError("no paired basis found")
    span = _span(G, gens, factors)
    if len(set(span.values())) != M.order:
        raise TwistError("basis does not generate M freely")
    coords = {x: c for c, x in span.items()}
    return PairedDecomposition(tuple(gens), tuple(factors), coords)


# -- cocycles on the character group ---------------------------------------------
# A cocycle is a function (a, b) -> Cyclotomic on exponent vectors of characters.

def standard_cocycle(dec: PairedDecomposition, k: int = 1) -> Callable:
    """omega((a,b),(c,d)) = zeta_e^(k b c) on each paired factor."""
    N = dec.exponent
    pairs = [(i, dec.orders[i]) for i in range(0, len(dec.orders), 2)]

    def omega(x, y):
        s = sum(k * x[i + 1] * y[i] * (N // e) for i, e in pairs)
        return Cyclotomic.zeta(N, s)
    return omega


def trivial_cocycle(dec: PairedDecomposition) -> Callable:
    N = dec.exponent
    return lambda x, y: Cyclotomic.from_rational(N, 1)


def second_cocycle(dec: PairedDecomposition) -> Callable:
    """The inverse standard pairing times a rational coboundary df(x, y) = f(x) f(y) / f(xy).

    Both factors are nondegenerate-compatible; the product is a normalized
    cocycle whose values are not all roots of unity, so it is numerically far
    from the standard one.
    """
    base = standard_cocycle(dec, -1)
    orders = dec.orders

    def f(x):
        return Fraction(1) if not any(x) else Fraction(2 + sum(x))

    def omega(x, y):
        xy = tuple((a + b) % d for a, b, d in zip(x, y, orders))
        return base(x, y) * (f(x) * f(y) / f(xy))
    return omega


def corrupted_cocycle(omega: Callable, where: tuple) -> Callable:
    """omega with the single value at ``where`` negated."""
    def bad(x, y):
        v = omega(x, y)
        return -v if (tuple(x), tuple(y)) == where else v
    return bad


# -- the twist --------------------------------------------------------------------

@dataclass
class Twist:
    M: Subgroup
    decomposition: PairedDecomposition
    omega: dict  # (a, b) -> Cyclotomic, a and b exponent vectors
    idempotents: dict  # a -> TensorVector of rank 1
    Omega: TensorVector
    Omega_inv: TensorVector

    @property
    def order(self) -> int:
        return self.decomposition.exponent


def _char_value(dec: PairedDecomposition, a, v: int) -> int:
    """Exponent s with phi_a(v) = zeta_N^s."""
    N = dec.exponent
    c = dec.coords[int(v)]
    return sum(ai * ci * (N // d) for ai, ci, d in zip(a, c, dec.orders)) % N


def idempotents(M: Subgroup, dec: PairedDecomposition) -> dict:
    """e_phi = (1/|M|) sum_v phi(v^-1) v for each character phi."""
    G = M.parent
    N = dec.exponent
    n = M.order
    out = {}
    for a in dec.characters():
        coeffs = {}
        for v in M.members:
            s = _char_value(dec, a, int(G.inverses[v]))
            coeffs[(int(v),)] = Cyclotomic.zeta(N, s) / n
        out[a] = TensorVector(G, 1, N, coeffs)
    return out


def verify_idempotents(M: Subgroup, e: dict) -> bool:
    """Sum of the e_phi is 1 and e_phi e_psi = delta e_phi, exhaustively."""
    G = M.parent
    keys = list(e)
    N = e[keys[0]].order
    total = TensorVector(G, 1, N)
    for a in keys:
        total = total + e[a]
    if total != TensorVector.one(G, 1, N):
        return False
    for a in keys:
        for b in keys:
            prod = e[a] * e[b]
            if a == b and prod != e[a]:
                return False
            if a != b and not prod.is_zero():
                return False
    return True


def build_twist(M: Subgroup, dec: Optional[PairedDecomposition] = None,
                omega: Optional[Callable] = None) -> Twist:
    """Omega = sum omega(phi, psi) e_phi (x) e_psi, and its inverse."""
    dec = paired_decomposition(M) if dec is None else dec
    omega = standard_cocycle(dec) if omega is None else omega
    G = M.parent
    N = dec.exponent
    e = idempotents(M, dec)
    chars = dec.characters()
    table = {(a, b): _cyc(N, omega(a, b)) for a in chars for b in chars}
    Om: dict = {}
    Om_inv: dict = {}
    for (a, b), w in table.items():
        w_inv = w.inv()
        for (x,), cx in e[a].coeffs.items():
            for (y,), cy in e[b].coeffs.items():
                c = cx * cy
                Om[(x, y)] = Om[(x, y)] + w * c if (x, y) in Om else w * c
                Om_inv[(x, y)] = Om_inv[(x, y)] + w_inv * c if (x, y) in Om_inv else w_inv * c
    return Twist(M, dec, table, e, TensorVector(G, 2, N, Om), TensorVector(G, 2, N, Om_inv))


def verify_twist_axioms(tw: Twist) -> bool:
    """Both twist equations in KM^{(x)3}, the counit conditions and Omega Omega^-1 = 1."""
    Om = tw.Omega
    G, N = Om.group, Om.order
    lhs = _pad_left(Om) * _delta_right(Om)
    rhs = _pad_right(Om) * _delta_left(Om)
    if lhs != rhs:
        return False
    one = TensorVector.one(G, 1, N)
    if _counit_left(Om) != one or _counit_right(Om) != one:
        return False
    return Om * tw.Omega_inv == TensorVector.one(G, 2, N)


# -- Delta_Omega(c_tau) --------------------------------------------------------------

def _c_tau(M: Subgroup, tau: int, N: int) -> TensorVector:
    """c_tau = |M| e_eps tau e_eps = (1/|M|) sum_{u,v} u tau v, as a rank-1 vector."""
    G = M.parent
    n = M.order
    out: dict = {}
    for u in M.members:
        for v in M.members:
            g = int(G.mul_chain(u, tau, v))
            out[(g,)] = out.get((g,), 0) + Fraction(1, n)
    return TensorVector(G, 1, N, out)


def coproduct_c_tau(tw: Twist, tau: int) -> tuple[TensorVector, TensorVector]:
    """(c_tau, Omega Delta(c_tau) Omega^-1)."""
    c = _c_tau(tw.M, tau, tw.order)
    delta = TensorVector(c.group, 2, c.order, {(g, g): v for (g,), v in c.coeffs.items()})
    return c, tw.Omega * delta * tw.Omega_inv


def _chi_id(chi: ClassFunction, T: TensorVector) -> dict:
    """(chi (x) id)(T) as {g: coefficient}."""
    out: dict = {}
    for (a, b), c in T.coeffs.items():
        val = int(chi.values[a])
        if val:
            out[b] = out[b] + c * val if b in out else c * val
    return {k: v for k, v in out.items() if v}


@dataclass
class PropKeyReport:
    identity_holds: bool
    counit: Fraction
    support_ok: bool
    image: dict = field(repr=False)

    @property
    def ok(self) -> bool:
        return self.identity_holds and self.support_ok


def verify_prop_key(M: Subgroup, tau: int, chi: ClassFunction,
                    omega: Optional[Callable] = None,
                    dec: Optional[PairedDecomposition] = None) -> PropKeyReport:
    """Check (chi (x) id) Delta_Omega(c_tau) = (1/|M|) sum over M tau M of chi(g) g.

    The right-hand side is built here from the double coset directly, not
    through :func:`hopfcert.obstruction.compute_y`, so the two stay independent.
    """
    if not trivially_meets(M, tau):
        raise TwistError("M and tau M tau^-1 meet nontrivially")
    tw = build_twist(M, dec, omega)
    c, D = coproduct_c_tau(tw, tau)
    counit = sum((v for v in c.coeffs.values()), Cyclotomic.from_rational(tw.order, 0))
    coset = {int(g) for g in double_coset(M, tau)}
    support_ok = all(a in coset and b in coset for a, b in D.coeffs)
    lhs = _chi_id(chi, D)
    n = M.order
    rhs = {g: Cyclotomic.from_rational(tw.order, Fraction(int(chi.values[g]), n))
           for g in coset if chi.values[g]}
    holds = lhs == rhs
    return PropKeyReport(holds, counit.rational_part(), support_ok, lhs)
