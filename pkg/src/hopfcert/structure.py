"""Structural counts used as cross-checks: centralizers, Z(U), tori, automorphisms."""
from __future__ import annotations

from typing import Optional

import numpy as np

from .catalog import CatalogError, _span, klein_generators, sylow_subgroup
from .field import FiniteField
from .groups import FiniteGroup, Subgroup, _rank, sz_u

__all__ = [
    "centralizer",
    "transporter",
    "rank_one_count",
    "center_of",
    "exponent_of",
    "split_torus",
    "nonsplit_torus",
    "theta_sl3",
    "nonsplit_conjugate",
    "klein_group",
    "e_subspaces",
    "circle_counts",
    "sz_z_u",
]


def centralizer(G: FiniteGroup, g: int) -> np.ndarray:
    allg = np.arange(G.order)
    return allg[G.mul(allg, g) == G.mul(g, allg)]


def transporter(G: FiniteGroup, g: int, U: Subgroup) -> np.ndarray:
    """{h in G : h g h^-1 in U}."""
    allg = np.arange(G.order)
    return allg[U.contains_mask(G.conj(allg, np.full(G.order, g)))]


def rank_one_count(G: FiniteGroup, U: Optional[Subgroup] = None) -> int:
    """#{w in U : rank(w - 1) = 1} for SL3."""
    if G.family != "SL3":
        raise CatalogError("rank counts are for SL3")
    U = sylow_subgroup(G) if U is None else U
    F = G.field
    minus_one = F.neg[np.eye(3, dtype=np.int64)]
    return sum(1 for w in U.members if _rank(F.add[G.mats(w), minus_one], F) == 1)


def center_of(M: Subgroup) -> Subgroup:
    G = M.parent
    m = M.members
    comm = G.mul(m[:, None], m[None, :]) == G.mul(m[None, :], m[:, None])
    return Subgroup(G, m[comm.all(axis=1)], label=f"Z({M.label})")


def exponent_of(M: Subgroup) -> int:
    from math import lcm
    return lcm(*(int(o) for o in M.parent.element_orders[M.members]))


def split_torus(G: FiniteGroup) -> Subgroup:
    """{diag(t, t^-1)} in SL2 / PSL2."""
    F = G.field
    mats = np.array([[t, 0, 0, int(F.inv[t])] for t in range(1, G.q)])
    return Subgroup(G, np.unique(G.index_of(mats)), label="T")


def nonsplit_torus(G: FiniteGroup) -> Subgroup:
    """d'(a + b zeta) = (a b; eps b a) with zeta^2 = eps the least non-square."""
    F = G.field
    if G.q % 2 == 0:
        raise CatalogError("the non-split torus is built for odd q")
    eps = F.least_nonsquare().code
    mats = []
    for a in range(G.q):
        for b in range(G.q):
            eb = int(F.mul[eps, b])
            det = int(F.add[F.mul[a, a], F.neg[F.mul[b, eb]]])
            if det == 1:
                mats.append([a, b, eb, a])
    return Subgroup(G, np.unique(G.index_of(np.array(mats))), label="T'")


def theta_sl3(G: FiniteGroup, idx) -> np.ndarray:
    """A -> J (A^-1)^t J^-1 with J the antidiagonal permutation."""
    if G.family != "SL3":
        raise CatalogError("Theta is defined on SL3")
    inv = G.mats(G.inverses[np.asarray(idx)])
    a = inv.reshape(-1, 3, 3).transpose(0, 2, 1)
    # J X J^-1 reverses rows and columns
    out = a[:, ::-1, ::-1].reshape(-1, 9)
    return G.index_of(out)


def klein_group(G: FiniteGroup, x: int, y: int) -> tuple:
    r, s = klein_generators(G, x, y)
    return tuple(sorted({G.identity_index, r, s, int(G.mul(r, s))}))


def nonsplit_conjugate(G: FiniteGroup, a: int, b: int, x: int, y: int) -> tuple[tuple, tuple]:
    """Conjugate of M_(x,y) by pi(a b; -b a), and M at the predicted parameter."""
    F = G.field
    d = int(G.index_of(np.array([[a, b, int(F.neg[b]), a]]))[0])
    K = klein_group(G, x, y)
    conj = tuple(sorted(int(v) for v in G.conj(np.full(4, d), np.array(K))))
    a2b2 = int(F.add[F.mul[a, a], F.neg[F.mul[b, b]]])
    two_ab = int(F.mul[F.from_int(2), F.mul[a, b]])
    nx = int(F.add[F.mul[a2b2, x], F.mul[two_ab, y]])
    ny = int(F.add[F.mul[a2b2, y], F.neg[F.mul[two_ab, x]]])
    return conj, klein_group(G, nx, ny)


def e_subspaces(F: FiniteField, limit: int = 4096) -> list[tuple]:
    """GF(p)-subspaces E of GF(q) of even dimension containing 1, as sorted code tuples."""
    found = set()
    frontier = {tuple(_span(F, [1]))}
    while frontier:
        nxt = set()
        for E in frontier:
            Es = set(E)
            for v in range(F.q):
                if v in Es:
                    continue
                mults = [int(F.mul[F.from_int(k), v]) for k in range(F.p)]
                nxt.add(tuple(sorted({int(F.add[e, m]) for e in E for m in mults})))
        frontier = nxt
        for W in nxt:
            n, dim = len(W), 0
            while n > 1:
                n //= F.p
                dim += 1
            if dim % 2 == 0:
                found.add(W)
        if len(found) > limit:
            raise CatalogError(f"more than {limit} subspaces")
    return sorted(found, key=lambda W: (len(W), W))


def circle_counts(primes) -> dict:
    from .catalog import solve_circle
    from .field import field_create
    return {p: len(solve_circle(field_create(p))) for p in primes}


def sz_z_u(G: FiniteGroup) -> Subgroup:
    """{u(0, b)} by construction, for comparing with the computed center."""
    mats = np.array([sz_u(G.field, 0, b).ravel() for b in range(G.q)])
    return Subgroup(G, G.index_of(mats), label="u(0,b)")
