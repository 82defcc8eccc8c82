"""Class functions on enumerated groups.

The induced character Ind_U^G(1) is computed by brute-force counting,
chi(u) = #{g : g u g^-1 in U} / |U|, and spread over the group through the
same conjugation table.  The other class functions used for PSL2 are given
by their printed values, keyed by element order.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .groups import FiniteGroup, GroupError, InvariantViolation, Subgroup, normalize_family

__all__ = [
    "CharacterError",
    "ClassFunction",
    "FiberDecomposition",
    "induced_character",
    "closed_form_character",
    "closed_form_table",
    "special_character",
    "fibers",
    "m_c_set",
    "character_for",
]

KINDS = ("induced_sylow", "phi_q1", "phi_5", "phi_7")


class CharacterError(GroupError):
    pass


class ClassFunction:
    """Integer-valued class function stored densely by element index.

    ``values`` is an int64 array; all class functions needed here take
    integer values, and :meth:`value` returns a Fraction for uniformity.
    """

    def __init__(self, group: FiniteGroup, values: np.ndarray, kind: str):
        self.group = group
        self.values = np.asarray(values, dtype=np.int64)
        self.kind = kind
        if self.values.shape != (group.order,):
            raise CharacterError("class function has the wrong length")

    def value(self, g: int) -> Fraction:
        return Fraction(int(self.values[int(g)]))

    def __call__(self, idx):
        return self.values[np.asarray(idx)]

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.values)

    def total(self) -> int:
        return int(self.values.sum())

    def dump(self) -> dict:
        fib = fibers(self)
        return {
            "kind": self.kind,
            "values": [str(int(v)) for v in self.values],
            "fibers": [{"value": str(v), "size": int(len(ix))} for v, ix in fib.fibers],
        }

    def __repr__(self):
        return f"ClassFunction({self.kind} on {self.group!r})"


def induced_character(G: FiniteGroup, U: Subgroup, chunk: int = 1 << 18) -> ClassFunction:
    """Ind_U^G(1) by counting, plus a class-function consistency check."""
    members = U.members
    n_u = len(members)
    counts = np.zeros(n_u, dtype=np.int64)
    label = np.full(G.order, -1, dtype=np.int64)
    rows = max(1, chunk // n_u)
    for start in range(0, G.order, rows):
        g = np.arange(start, min(G.order, start + rows))
        w = G.conj(g[:, None], members[None, :])
        counts += np.isin(w, members).sum(axis=0)
        # w = g u g^-1 shares the class of u; keep one label per element
        flat_w = w.ravel()
        flat_u = np.broadcast_to(np.arange(n_u), w.shape).ravel()
        prev = label[flat_w]
        label[flat_w] = np.where(prev >= 0, prev, flat_u)
    if np.any(counts % n_u):
        raise InvariantViolation("induced-character count not divisible by |U|")
    chi_u = counts // n_u
    values = np.where(label >= 0, chi_u[np.maximum(label, 0)], 0)
    # spot-check that each conjugate g u g^-1 carries chi(u)
    rng = np.random.default_rng(0)
    g = rng.integers(0, G.order, 4096)
    u = rng.integers(0, n_u, 4096)
    if np.any(values[G.conj(g, members[u])] != chi_u[u]):
        raise InvariantViolation("induced character is not constant on conjugacy classes")
    if values[G.identity_index] * n_u != G.order:
        raise InvariantViolation("chi(1) != [G:U]")
    return ClassFunction(G, values, "induced_sylow")


def closed_form_table(family: str, q: int) -> dict:
    """Nonzero values of Ind_U^G(1) as printed, keyed by element type."""
    family = normalize_family(family)
    if family == "SL2":
        return {"identity": q * q - 1, "unipotent": q - 1}
    if family == "PSL2":
        if q % 2 == 0:
            return {"identity": q * q - 1, "unipotent": q - 1}
        return {"identity": (q * q - 1) // 2, "unipotent": (q - 1) // 2}
    if family == "SL3":
        return {(1,): (q ** 3 - 1) * (q * q - 1), (2, 1): (2 * q + 1) * (q - 1) ** 2, (3,): (q - 1) ** 2}
    return {"identity": (q - 1) * (q * q + 1), "unipotent": q - 1}


def closed_form_character(G: FiniteGroup) -> ClassFunction:
    """The printed value table, spread over G by element type."""
    table = closed_form_table(G.family, G.q)
    P = G.in_p_mask
    values = np.zeros(G.order, dtype=np.int64)
    if G.family == "SL3":
        from .groups import _rank
        idx = np.flatnonzero(P)
        F = G.field
        one = np.eye(3, dtype=np.int64)
        for i in idx:
            a = G.mats(i)
            a = F.add[a, F.neg[one]]
            r = _rank(a, F)
            values[i] = table[{0: (1,), 1: (2, 1), 2: (3,)}[r]]
    else:
        values[P] = table["unipotent"]
        values[G.identity_index] = table["identity"]
    return ClassFunction(G, values, "closed_form")


def special_character(kind: str, G: FiniteGroup) -> ClassFunction:
    if G.family != "PSL2":
        raise CharacterError(f"{kind} is defined on PSL2 only")
    q, p = G.q, G.field.p
    orders = G.element_orders
    if kind == "phi_q1":
        if q % 4 != 1:
            raise CharacterError("phi_q1 needs q = 1 mod 4")
        values = np.where(orders == p, (q + 1) // 2, 0)
        values[G.identity_index] = (1 - q * q) // 2
    elif kind in ("phi_5", "phi_7"):
        need = int(kind[-1])
        if q != need:
            raise CharacterError(f"{kind} needs PSL2({need})")
        table = {1: 15, 5: 0, 2: -1, 3: 0} if need == 5 else {1: 14, 7: 0, 3: -1, 4: 0, 2: 2}
        if not set(np.unique(orders)) <= set(table):
            raise InvariantViolation("unexpected element order")
        values = np.vectorize(table.__getitem__)(orders)
    else:
        raise CharacterError(f"unknown character kind {kind!r}")
    return ClassFunction(G, values.astype(np.int64), kind)


def character_for(setup) -> ClassFunction:
    """The class function named by an ObstructionSetup."""
    G = setup.group
    if setup.character_kind == "induced_sylow":
        from .catalog import sylow_subgroup
        return induced_character(G, sylow_subgroup(G))
    return special_character(setup.character_kind, G)


@dataclass
class FiberDecomposition:
    fibers: list  # (Fraction value, index array), identity fiber first

    def values(self) -> list:
        return [v for v, _ in self.fibers]


def fibers(chi: ClassFunction) -> FiberDecomposition:
    G = chi.group
    e = G.identity_index
    out = []
    first = int(chi.values[e])
    for v in sorted(set(int(x) for x in np.unique(chi.values)) - {0},
                    key=lambda v: (v != first, v)):
        out.append((Fraction(v), np.flatnonzero(chi.values == v)))
    if first == 0:
        out.insert(0, (Fraction(0), np.array([e])))
    return FiberDecomposition(out)


def m_c_set(M: Subgroup, tau: int, C: np.ndarray) -> np.ndarray:
    """{v in M : tau v in C}."""
    G = M.parent
    tv = G.mul(np.full(M.order, int(tau)), M.members)
    return M.members[np.isin(tv, C)]
