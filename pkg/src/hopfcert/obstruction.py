"""The element y_chi, the value chi(y_chi^2) and the certificate.

Three routes to chi(y_chi^2) are kept deliberately separate:

* ``chi_y2_direct`` squares y in the group algebra by sparse convolution;
* ``chi_y2_quadloop`` sums chi(tau u'u) chi(tau v'v) chi(tau u'v tau v'u)
  over M^4;
* ``chi_y2_fiber`` groups the sum by the level sets of chi and the sets
  M_C = {v in M : tau v in C}.

A certificate is issued only when the three agree.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional

import numpy as np

from .catalog import ObstructionSetup, trivially_meets
from .characters import ClassFunction, character_for, fibers, m_c_set
from .exact import format_rational
from .groups import (BoundExceeded, FiniteGroup, GroupError, InvariantViolation, Subgroup,
                     double_coset)

__all__ = [
    "ObstructionError",
    "MethodDisagreement",
    "GroupAlgebraVector",
    "ObstructionCertificate",
    "compute_y",
    "chi_y2_direct",
    "chi_y2_quadloop",
    "chi_y2_fiber",
    "closed_form_value",
    "certify",
    "identity_quadruples",
    "QUADLOOP_BOUND",
]

QUADLOOP_BOUND = 10 ** 8


class ObstructionError(GroupError):
    pass


class MethodDisagreement(InvariantViolation):
    pass


class GroupAlgebraVector:
    """Sparse combination of group elements; zero coefficients are dropped."""

    def __init__(self, group: FiniteGroup, coeffs: Optional[dict] = None):
        self.group = group
        self.coeffs = {int(k): v for k, v in (coeffs or {}).items() if v != 0}

    @classmethod
    def basis(cls, group: FiniteGroup, g: int, c=1) -> "GroupAlgebraVector":
        return cls(group, {int(g): Fraction(c)})

    def support(self) -> np.ndarray:
        return np.array(sorted(self.coeffs), dtype=np.int64)

    def __add__(self, other: "GroupAlgebraVector") -> "GroupAlgebraVector":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return GroupAlgebraVector(self.group, out)

    def scale(self, c) -> "GroupAlgebraVector":
        return GroupAlgebraVector(self.group, {k: c * v for k, v in self.coeffs.items()})

    def __mul__(self, other: "GroupAlgebraVector") -> "GroupAlgebraVector":
        if other.group is not self.group:
            raise ObstructionError("group mismatch")
        a_idx = np.array(list(self.coeffs), dtype=np.int64)
        b_idx = np.array(list(other.coeffs), dtype=np.int64)
        if not len(a_idx) or not len(b_idx):
            return GroupAlgebraVector(self.group)
        prod = self.group.mul(a_idx[:, None], b_idx[None, :])
        a_c = [self.coeffs[int(k)] for k in a_idx]
        b_c = [other.coeffs[int(k)] for k in b_idx]
        out: dict = {}
        for i, ca in enumerate(a_c):
            row = prod[i]
            for j, cb in enumerate(b_c):
                k = int(row[j])
                out[k] = out.get(k, 0) + ca * cb
        return GroupAlgebraVector(self.group, out)

    def evaluate(self, chi: ClassFunction):
        return sum((c * int(chi.values[k]) for k, c in self.coeffs.items()), Fraction(0))

    def __eq__(self, other):
        return isinstance(other, GroupAlgebraVector) and other.group is self.group \
            and self.coeffs == other.coeffs

    def to_json(self) -> dict:
        return {str(k): format_rational(v) if isinstance(v, (int, Fraction)) else repr(v)
                for k, v in sorted(self.coeffs.items())}

    def __repr__(self):
        return f"GroupAlgebraVector({len(self.coeffs)} terms)"


def _require_trivial_meet(M: Subgroup, tau: int):
    if not trivially_meets(M, tau):
        raise ObstructionError("M and tau M tau^-1 meet nontrivially")


def compute_y(chi: ClassFunction, M: Subgroup, tau: int) -> GroupAlgebraVector:
    """y = (1/|M|) sum over the double coset M tau M of chi(g) g."""
    _require_trivial_meet(M, tau)
    coset = double_coset(M, tau)
    if len(coset) != M.order ** 2:
        raise InvariantViolation("|M tau M| != |M|^2")
    n = M.order
    return GroupAlgebraVector(chi.group, {int(g): Fraction(int(chi.values[g]), n) for g in coset})


def chi_y2_direct(chi: ClassFunction, y: GroupAlgebraVector) -> Fraction:
    return (y * y).evaluate(chi)


def chi_y2_quadloop(chi: ClassFunction, M: Subgroup, tau: int, bound: int = QUADLOOP_BOUND) -> Fraction:
    """(1/|M|^2) sum over u, u', v, v' of chi(tau u'u) chi(tau v'v) chi(tau u'v tau v'u)."""
    G = chi.group
    m = M.members
    n = len(m)
    if n ** 4 > bound:
        raise BoundExceeded(f"|M|^4 = {n ** 4} exceeds the quadruple-loop bound {bound}")
    # first two factors: pairs (u', u) with chi(tau u' u) != 0
    tu = G.mul_chain(np.full((n, n), tau), m[:, None], m[None, :])   # [u', u]
    first = chi.values[tu]
    pairs = np.argwhere(first != 0)
    if not len(pairs):
        return Fraction(0)
    up, u = m[pairs[:, 0]], m[pairs[:, 1]]
    vp, v = up, u  # the same index set serves (v', v)
    w = first[pairs[:, 0], pairs[:, 1]].astype(object)
    total = 0
    for i in range(len(pairs)):
        # tau u'_i v tau v' u_i for all admissible (v', v)
        prod = G.mul_chain(np.full(len(v), tau), np.full(len(v), up[i]), v,
                           np.full(len(v), tau), vp, np.full(len(v), u[i]))
        third = chi.values[prod].astype(object)
        total += int(w[i]) * int(np.dot(w, third))
    return Fraction(total, n * n)


def chi_y2_fiber(chi: ClassFunction, M: Subgroup, tau: int) -> Fraction:
    """(1/|M|) sum over fibers C, C' of chi(C) chi(C') sum chi(tau x x' v tau v^-1)."""
    G = chi.group
    fib = fibers(chi)
    parts = []
    for value, C in fib.fibers:
        mc = m_c_set(M, tau, C)
        if C.size == 1 and int(C[0]) == G.identity_index and len(mc):
            raise InvariantViolation("M_{1} is not empty")
        if len(mc):
            parts.append((value, mc))
    m = M.members
    # v tau v^-1 for all v, reused for every (x, x')
    vtv = G.mul_chain(m, np.full(len(m), tau), G.inverses[m])
    total = Fraction(0)
    for val, mc in parts:
        for val2, mc2 in parts:
            xx = G.mul(mc[:, None], mc2[None, :]).ravel()
            prod = G.mul_chain(np.full((len(xx), len(m)), tau), xx[:, None], vtv[None, :])
            total += val * val2 * int(chi.values[prod].sum())
    return total / M.order


# -- closed forms --------------------------------------------------------------

def _n_q(q: int) -> int:
    return (q + 1) // 2 if q % 4 == 1 else (q - 1) // 2


def closed_form_value(setup: ObstructionSetup) -> Optional[Fraction]:
    """The tabulated value for this setup, or None outside the tables."""
    if setup.flags.get("tau_override"):
        return None
    G, M = setup.group, setup.M
    q, p, n = G.q, G.field.p, M.order
    case = setup.case
    if case == "sl2_unipotent":
        if p == 2:
            return Fraction((q - 1) ** 3 * (q + 1), n)
        return Fraction((q - 1) ** 3, n)
    if case == "psl2_unipotent":
        extra = 6 if setup.flags["sqrt_minus4_in_E"] else 4
        return Fraction((q - 1) ** 3 * (q + extra), 4 * n)
    if case == "sl3_M1":
        if p == 2:
            return Fraction((q - 1) ** 6 * (2 * q + 1), q * q)
        return Fraction((q - 1) ** 6, q * q)
    if case == "sl3_M2":
        return Fraction((2 * q + 1) ** 2 * (q - 1) ** 6 * (4 * q - 1), q * q)
    if case == "sz_center":
        return Fraction((q - 1) ** 3 * (q * q + 1), n)
    if case == "psl2_klein_p3":
        return Fraction(_n_q(q) ** 3, 4)
    if case == "psl2_klein_p5":
        return Fraction(15, 4) if setup.flags["xy"] == (2, 0) else None
    if case == "psl2_klein_p7":
        return Fraction(1, 4) if setup.flags["xy"] == (2, 3) else None
    if case == "psl2_klein_large_p":
        x, y = setup.flags["xy"]
        if x * y:
            return Fraction(_n_q(q) ** 3, 4)
        # the xy = 0 branch: one of tau s, tau rs squares to 1
        return Fraction((p + 1) ** 3 * (2 - p), 32)
    return None


# -- certificate ------------------------------------------------------------------

@dataclass
class ObstructionCertificate:
    setup: dict
    value: Fraction
    methods: dict
    closed_form: Optional[Fraction]
    M_order: int
    reduced_denominator: int = field(init=False)
    gcd_with_M: int = field(init=False)
    methods_agreement: bool = field(init=False)
    conclusion: str = field(init=False)

    def __post_init__(self):
        self.reduced_denominator = self.value.denominator
        self.gcd_with_M = gcd(self.reduced_denominator, self.M_order)
        self.methods_agreement = len(set(self.methods.values())) == 1
        obstructed = self.gcd_with_M > 1 and self.methods_agreement
        self.conclusion = "obstructed" if obstructed else "inconclusive"

    @property
    def closed_form_agrees(self) -> Optional[bool]:
        return None if self.closed_form is None else self.closed_form == self.value

    def to_json(self) -> dict:
        return {
            "setup": self.setup,
            "value": format_rational(self.value),
            "reduced_denominator": self.reduced_denominator,
            "denominator_gcd_with_M": self.gcd_with_M,
            "methods": {k: format_rational(v) for k, v in sorted(self.methods.items())},
            "methods_agree": self.methods_agreement,
            "closed_form": None if self.closed_form is None else format_rational(self.closed_form),
            "closed_form_agrees": self.closed_form_agrees,
            "conclusion": self.conclusion,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


def certify(setup: ObstructionSetup, chi: Optional[ClassFunction] = None) -> ObstructionCertificate:
    chi = character_for(setup) if chi is None else chi
    M, tau = setup.M, setup.tau
    y = compute_y(chi, M, tau)
    methods = {
        "direct": chi_y2_direct(chi, y),
        "quadloop": chi_y2_quadloop(chi, M, tau),
        "fiber": chi_y2_fiber(chi, M, tau),
    }
    if len(set(methods.values())) != 1:
        raise MethodDisagreement(
            "methods disagree: " + ", ".join(f"{k}={format_rational(v)}" for k, v in methods.items()))
    value = methods["direct"]
    return ObstructionCertificate(setup.summary(), value, methods, closed_form_value(setup), M.order)


def identity_quadruples(M: Subgroup, tau: int) -> tuple[set, set]:
    """Quadruples (u', v, v', u) with tau u'v tau v'u = 1, and those predicted.

    The prediction is: u'v = 1 and v'u = 1 and tau = tau^-1.
    """
    G = M.parent
    m = M.members
    n = len(m)
    e = G.identity_index
    grid = np.stack(np.meshgrid(np.arange(n), np.arange(n), np.arange(n), np.arange(n),
                                indexing="ij"), axis=-1).reshape(-1, 4)
    up, v, vp, u = (m[grid[:, k]] for k in range(4))
    t = np.full(len(grid), tau)
    prod = G.mul_chain(t, up, v, t, vp, u)
    found = {tuple(int(x) for x in row) for row in grid[prod == e]}
    involutive = int(G.inverses[tau]) == int(tau)
    pred = set()
    if involutive:
        pu = G.mul(up, v) == e
        pv = G.mul(vp, u) == e
        pred = {tuple(int(x) for x in row) for row in grid[pu & pv]}
    return found, pred
