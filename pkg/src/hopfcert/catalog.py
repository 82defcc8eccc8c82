"""Named subgroups, the element tau, and the Klein four-subgroup census.

Subgroup specs are short strings, optionally prefixed by a family:

    sl2:E=1,g        unipotent group indexed by the GF(p)-span of {1, g}
    sl2:U            the whole Sylow p-subgroup (also for psl2)
    sl3:L1, sl3:L3   L_j = <g2, g3 g1^j>, and L_p = <g2, g1> (also M1, M2)
    sz:Z2x2          rank-2 elementary subgroup of Z(U)
    psl2:klein:x=2,y=0   <r, s> with s = pi(x y; y -x)

Field elements in specs are written as ``g`` (the polynomial variable),
``g^k``, a bare integer (read in the prime field) or ``#c`` (a raw code).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from math import gcd, log
from typing import Optional

import numpy as np

from .field import FiniteField
from .groups import (FiniteGroup, GroupError, InvariantViolation, Matrix, Subgroup, build_group,
                     normalize_family, sz_tau, sz_u)

__all__ = [
    "CatalogError",
    "CaseNotCovered",
    "CentralTypeWitness",
    "ObstructionSetup",
    "sylow_subgroup",
    "invariant_factors",
    "is_central_type",
    "parse_spec",
    "named_M",
    "choose_tau",
    "pick_lambda",
    "solve_circle",
    "klein_subgroups",
    "classify_klein",
    "make_setup",
]


class CatalogError(GroupError):
    pass


class CaseNotCovered(CatalogError):
    """The requested setup lies outside the tabulated cases."""


# -- Sylow subgroups -----------------------------------------------------------

def sylow_subgroup(G: FiniteGroup) -> Subgroup:
    F, q = G.field, G.q
    if G.family in ("SL2", "PSL2"):
        mats = np.array([[1, a, 0, 1] for a in range(q)])
    elif G.family == "SL3":
        mats = np.array([[1, a, b, 0, 1, c, 0, 0, 1]
                         for a in range(q) for b in range(q) for c in range(q)])
    else:
        mats = np.array([sz_u(F, a, b).ravel() for a in range(q) for b in range(q)])
    return Subgroup(G, G.index_of(mats), label="U")


def torus_generators(G: FiniteGroup) -> list[int]:
    """Diagonal elements normalizing the standard Sylow subgroup."""
    F = G.field
    w = F.primitive
    if G.family in ("SL2", "PSL2"):
        m = np.array([[w, 0, 0, int(F.inv[w])]])
    elif G.family == "SL3":
        m = np.array([[w, 0, 0, 0, int(F.inv[w]), 0, 0, 0, 1],
                      [1, 0, 0, 0, w, 0, 0, 0, int(F.inv[w])]])
    else:
        from .groups import sz_t
        m = sz_t(F, w).reshape(1, -1)
    return [int(i) for i in G.index_of(m)]


# -- central type --------------------------------------------------------------

@dataclass(frozen=True)
class CentralTypeWitness:
    invariant_factors: tuple
    paired: bool

    @property
    def half(self) -> tuple:
        """Invariant factors of E when M = E x E."""
        if not self.paired:
            return ()
        return tuple(self.invariant_factors[::2])


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def invariant_factors(M: Subgroup) -> tuple:
    """Invariant factors d1 | d2 | ... of an abelian subgroup.

    For each prime r, the counts N_j = #{x : x^(r^j) = 1} give the number of
    cyclic r-factors of order at least r^j as log_r(N_j / N_(j-1)).
    """
    if not M.is_abelian():
        raise CatalogError("invariant factors requested for a non-abelian subgroup")
    G = M.parent
    n = M.order
    primary: dict[int, list[int]] = {}
    for r in _prime_factors(n):
        counts = [1]
        j = 1
        while counts[-1] < n and r ** j <= n:
            hits = int(np.sum(G.power(M.members, r ** j) == G.identity_index))
            counts.append(hits)
            if hits == counts[-2] and j > 1:
                break
            j += 1
        at_least = []
        for j in range(1, len(counts)):
            ratio = counts[j] // counts[j - 1]
            at_least.append(round(log(ratio, r)) if ratio > 1 else 0)
        # number with exponent exactly j = at_least[j-1] - at_least[j]
        exps = []
        for j in range(len(at_least)):
            nxt = at_least[j + 1] if j + 1 < len(at_least) else 0
            exps += [j + 1] * (at_least[j] - nxt)
        primary[r] = sorted(exps, reverse=True)
    width = max((len(v) for v in primary.values()), default=0)
    factors = []
    for i in range(width):
        d = 1
        for r, exps in primary.items():
            if i < len(exps):
                d *= r ** exps[i]
        factors.append(d)
    return tuple(sorted(factors))


def is_central_type(M: Subgroup) -> CentralTypeWitness:
    inv = invariant_factors(M)
    paired = len(inv) % 2 == 0 and all(inv[i] == inv[i + 1] for i in range(0, len(inv), 2))
    return CentralTypeWitness(inv, paired)


# -- spec parsing ----------------------------------------------------------------

@dataclass(frozen=True)
class MSpec:
    kind: str               # additive, heisenberg, sz_center, klein
    family: Optional[str]
    basis: tuple = ()       # field element tokens for additive
    whole: bool = False
    j: Optional[str] = None  # L index, or "p"
    rank: int = 0
    xy: Optional[tuple] = None


def _field_token(F: FiniteField, tok: str) -> int:
    tok = tok.strip()
    if tok.startswith("#"):
        return F.element(int(tok[1:])).code
    m = re.fullmatch(r"g(?:\^?(\d+))?", tok)
    if m:
        k = int(m.group(1)) if m.group(1) else 1
        return (F.gen ** k).code
    if re.fullmatch(r"-?\d+", tok):
        return F.from_int(int(tok))
    raise CatalogError(f"cannot parse field element {tok!r}")


def parse_spec(text: str, family: Optional[str] = None) -> MSpec:
    s = text.strip()
    parts = s.split(":")
    fam = None
    if parts[0].lower() in ("sl2", "psl2", "sl3", "sz"):
        fam = normalize_family(parts[0])
        parts = parts[1:]
    if family is not None:
        family = normalize_family(family)
        if fam is not None and fam != family and not {fam, family} <= {"SL2", "PSL2"}:
            raise CatalogError(f"spec family {fam} does not match {family}")
        fam = family
    body = ":".join(parts)
    low = body.lower()
    if low == "u" or low == "e=all":
        return MSpec("additive", fam, whole=True)
    if low.startswith("e="):
        toks = tuple(t for t in body[2:].split(",") if t.strip())
        if not toks:
            raise CatalogError("empty E basis")
        return MSpec("additive", fam, basis=toks)
    m = re.fullmatch(r"l(\d+|p)", low)
    if m:
        return MSpec("heisenberg", fam, j=m.group(1))
    if low in ("m1", "m2"):
        return MSpec("heisenberg", fam, j=low)
    m = re.fullmatch(r"z2((?:x2)+)|z2\^(\d+)", low)
    if m:
        rank = (m.group(1).count("x2") + 1) if m.group(1) else int(m.group(2))
        return MSpec("sz_center", fam, rank=rank)
    if low.startswith("klein"):
        rest = body[5:].lstrip(":")
        xy = None
        if rest:
            kv = dict(item.split("=", 1) for item in rest.split(",") if "=" in item)
            if set(kv) != {"x", "y"}:
                raise CatalogError(f"klein spec needs x= and y=, got {rest!r}")
            xy = (kv["x"].strip(), kv["y"].strip())
        return MSpec("klein", fam, xy=xy)
    raise CatalogError(f"unrecognized subgroup spec {text!r}")


# -- named subgroups ---------------------------------------------------------------

def _span(F: FiniteField, basis: list[int]) -> list[int]:
    span = {0}
    for b in basis:
        new = set(span)
        for s in span:
            x = s
            for _ in range(F.p - 1):
                x = int(F.add[x, b])
                new.add(x)
        span = new
    return sorted(span)


def _additive_M(G: FiniteGroup, spec: MSpec) -> Subgroup:
    F = G.field
    if spec.whole:
        basis = [F.p ** k for k in range(F.m)]
        label = "U"
    else:
        basis = [_field_token(F, t) for t in spec.basis]
        label = "E=" + ",".join(spec.basis)
    E = _span(F, basis)
    if len(E) != F.p ** len(basis):
        raise CatalogError("E basis is not linearly independent over the prime field")
    if 1 not in E:
        raise CatalogError("E must contain 1")
    if len(basis) % 2:
        raise CatalogError(f"E has odd dimension {len(basis)}; M would not be of central type")
    mats = np.array([[1, a, 0, 1] for a in E])
    M = Subgroup(G, G.index_of(mats), G.index_of(mats[[E.index(b) for b in basis]]), label)
    M.E = E
    return M


def heisenberg_generators(G: FiniteGroup) -> tuple[int, int, int]:
    def e(i, j):
        m = np.eye(3, dtype=np.int64)
        m[i, j] = 1
        return m.reshape(1, -1)
    return tuple(int(G.index_of(e(i, j))[0]) for i, j in [(0, 1), (0, 2), (1, 2)])


def _unipotent_family_M(G: FiniteGroup, which: str) -> Subgroup:
    """M1 = {(1 a b; 0 1 0; 0 0 1)} and M2 = {(1 a b; 0 1 a; 0 0 1)} over GF(q)."""
    q = G.q
    if which == "m2" and G.field.p == 2:
        raise CaseNotCovered("M2 is only considered for odd p")
    mats = []
    for a in range(q):
        for b in range(q):
            mats.append([1, a, b, 0, 1, a if which == "m2" else 0, 0, 0, 1])
    M = Subgroup(G, G.index_of(np.array(mats)), label=which.upper())
    M.heisenberg_index = None
    M.family_label = which.upper()
    return M


def _heisenberg_M(G: FiniteGroup, spec: MSpec) -> Subgroup:
    j = spec.j
    if j in ("m1", "m2"):
        M = _unipotent_family_M(G, j)
        if G.field.m == 1:
            M.heisenberg_index = G.q if j == "m1" else 1
        return M
    if G.field.m != 1:
        raise CaseNotCovered("L_j subgroups are catalogued for prime q only")
    p = G.q
    j = p if j == "p" else int(j)
    valid = {0, 2} if p == 2 else set(range(p + 1))
    if j not in valid:
        raise CatalogError(f"L{j} is not a central-type subgroup of U for p = {p}")
    g1, g2, g3 = heisenberg_generators(G)
    if j == p:
        h = g1
    else:
        h = int(G.mul(g3, G.power(g1, j)))
    M = Subgroup.generated(G, [g2, h], label=f"L{j}")
    M.heisenberg_index = j
    M.family_label = "M1" if j == p else ("M2" if j == 1 and p != 2 else None)
    return M


def _sz_center_M(G: FiniteGroup, spec: MSpec) -> Subgroup:
    F = G.field
    if spec.rank % 2 or spec.rank < 2:
        raise CatalogError("Sz central subgroup needs an even positive rank")
    if spec.rank > F.m:
        raise CatalogError(f"rank {spec.rank} exceeds dim Z(U) = {F.m}")
    basis = [F.p ** k for k in range(spec.rank)]
    span = _span(F, basis)
    mats = np.array([sz_u(F, 0, b).ravel() for b in span])
    gens = np.array([sz_u(F, 0, b).ravel() for b in basis])
    return Subgroup(G, G.index_of(mats), G.index_of(gens), label="Z2^%d" % spec.rank)


def klein_generators(G: FiniteGroup, x: int, y: int) -> tuple[int, int]:
    F = G.field
    lhs = int(F.add[F.mul[x, x], F.mul[y, y]])
    if lhs != int(F.neg[1]):
        raise CatalogError(f"x^2 + y^2 != -1 for codes (x, y) = ({x}, {y})")
    r = G.index_of(np.array([[0, 1, int(F.neg[1]), 0]]))[0]
    s = G.index_of(np.array([[x, y, y, int(F.neg[x])]]))[0]
    return int(r), int(s)


def default_klein_xy(F: FiniteField) -> tuple[int, int]:
    p = F.p
    if p == 3:
        return (1, 1)
    if p == 5:
        return (2, 0)
    if p == 7:
        return (2, 3)
    for x, y in solve_circle(F):
        if x and y:
            return (x, y)
    raise CatalogError("no circle solution with xy != 0")


def _klein_M(G: FiniteGroup, spec: MSpec) -> Subgroup:
    if G.family != "PSL2" or G.q % 2 == 0:
        raise CatalogError("Klein subgroups are catalogued in PSL2(q), q odd")
    F = G.field
    if spec.xy is None:
        x, y = default_klein_xy(F)
    else:
        x, y = (_field_token(F, t) for t in spec.xy)
    r, s = klein_generators(G, x, y)
    M = Subgroup.generated(G, [r, s], label=f"klein(x={x},y={y})")
    if M.order != 4:
        raise CatalogError("r and s do not generate a Klein four-group")
    M.xy = (x, y)
    M.r, M.s = r, s
    return M


def named_M(G: FiniteGroup, spec) -> Subgroup:
    if isinstance(spec, str):
        spec = parse_spec(spec, G.family)
    fam = G.family
    if spec.kind == "additive":
        if fam not in ("SL2", "PSL2"):
            raise CatalogError(f"additive subgroups need SL2 or PSL2, not {fam}")
        M = _additive_M(G, spec)
    elif spec.kind == "heisenberg":
        if fam != "SL3":
            raise CatalogError("L_j subgroups live in SL3")
        M = _heisenberg_M(G, spec)
    elif spec.kind == "sz_center":
        if fam != "Sz":
            raise CatalogError("central subgroups Z2^k live in Sz")
        M = _sz_center_M(G, spec)
    else:
        M = _klein_M(G, spec)
    w = is_central_type(M)
    if not w.paired:
        raise CatalogError(f"{M.label} has invariant factors {w.invariant_factors}; not of central type")
    M.witness = w
    return M


# -- tau and lambda --------------------------------------------------------------

def trivially_meets(M: Subgroup, tau: int) -> bool:
    """M and tau M tau^-1 intersect in the identity only."""
    G = M.parent
    conj = G.conj(np.full(M.order, tau), M.members)
    common = np.intersect1d(conj, M.members)
    return len(common) == 1 and int(common[0]) == G.identity_index


def pick_lambda(F: FiniteField, x: int, y: int) -> int:
    """Least code lambda in GF(p)^x with lambda, lambda x, lambda y not +-2."""
    if F.m != 1:
        raise CatalogError("pick_lambda works over a prime field")
    bad = {F.from_int(2), F.from_int(-2)}
    for lam in range(1, F.p):
        vals = {lam, int(F.mul[lam, x]), int(F.mul[lam, y])}
        if not vals & bad:
            return lam
    raise CaseNotCovered(f"no admissible lambda over GF({F.p}) for (x, y) = ({x}, {y})")


def solve_circle(F: FiniteField) -> list[tuple[int, int]]:
    """All (x, y) in the prime field with x^2 + y^2 = -1, sorted by codes."""
    p = F.p
    if p == 2:
        raise CatalogError("circle solutions are counted for odd p")
    minus1 = p - 1
    sols = [(x, y) for x in range(p) for y in range(p) if (x * x + y * y) % p == minus1]
    expected = p + 1 if p % 4 == 3 else p - 1
    if len(sols) != expected:
        raise InvariantViolation(f"circle count {len(sols)} != {expected}")
    return sols


def choose_tau(G: FiniteGroup, M: Subgroup, case: str, lam: Optional[int] = None) -> int:
    F = G.field
    neg1 = int(F.neg[1])
    if case in ("sl2_unipotent", "psl2_unipotent"):
        m = [0, neg1, 1, 0]
    elif case == "sl3_M1":
        m = [0, 1, 0, 0, 0, 1, 1, 0, 0]
    elif case.startswith("sl3_"):
        m = [0, 0, neg1, 0, 1, 0, 1, 0, 0]
    elif case == "sz_center":
        m = sz_tau().ravel()
    elif case.startswith("psl2_klein"):
        m = [1, 0, lam, 1]
    else:
        raise CaseNotCovered(f"no tau for case {case}")
    tau = int(G.index_of(np.array([m]))[0])
    if not trivially_meets(M, tau):
        raise CatalogError(f"M and tau M tau^-1 meet nontrivially for case {case}")
    return tau


# -- Klein four-subgroups -----------------------------------------------------------

def involutions(G: FiniteGroup) -> np.ndarray:
    return np.flatnonzero(G.element_orders == 2)


def klein_subgroups(G: FiniteGroup) -> list[tuple]:
    """All Klein four-subgroups, as sorted member tuples."""
    inv = involutions(G)
    ab = G.mul(inv[:, None], inv[None, :])
    ba = ab.T
    commuting = (ab == ba) & (inv[:, None] != inv[None, :])
    seen = set()
    e = G.identity_index
    for i, j in zip(*np.nonzero(np.triu(commuting))):
        seen.add(tuple(sorted((e, int(inv[i]), int(inv[j]), int(ab[i, j])))))
    return sorted(seen)


def classify_klein(G: FiniteGroup) -> dict:
    if G.family != "PSL2" or G.q % 2 == 0:
        raise CatalogError("Klein classification needs PSL2(q) with q odd")
    kleins = klein_subgroups(G)
    remaining = set(kleins)
    reps, sizes = [], []
    for K in kleins:
        if K not in remaining:
            continue
        conj = G.conj(np.arange(G.order)[:, None], np.asarray(K)[None, :])
        conj.sort(axis=1)
        orbit = {tuple(int(v) for v in row) for row in np.unique(conj, axis=0)}
        remaining -= orbit
        reps.append(K)
        sizes.append(len(orbit))
    F = G.field
    hbar = int(G.index_of(np.array([[0, 1, int(F.neg[1]), 0]]))[0])
    containing = [K for K in kleins if hbar in K]
    return {
        "class_count": len(reps),
        "representatives": [Subgroup(G, K, label=f"klein#{n}") for n, K in enumerate(reps)],
        "orbit_sizes": sizes,
        "klein_count": len(kleins),
        "containing_hbar": len(containing),
    }


# -- setups ----------------------------------------------------------------------

@dataclass
class ObstructionSetup:
    group: FiniteGroup
    M: Subgroup
    tau: int
    character_kind: str
    case: str
    flags: dict = field(default_factory=dict)

    def summary(self) -> dict:
        G = self.group
        return {
            "group": G.descriptor(),
            "M": {"label": self.M.label, "order": self.M.order,
                  "invariant_factors": list(self.M.witness.invariant_factors)},
            "tau": G.matrix(self.tau).to_json(),
            "character": self.character_kind,
            "case": self.case,
            "flags": {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(self.flags.items())},
        }


def _sqrt_minus4_in(F: FiniteField, E: list[int]) -> bool:
    m4 = F.from_int(-4)
    return any(int(F.mul[a, a]) == m4 for a in E)


def make_setup(family: str, q: int, spec: str, tau: Optional[int] = None,
               bound: Optional[int] = None) -> ObstructionSetup:
    """Group, M, tau and character kind for one tabulated case."""
    family = normalize_family(family)
    G = build_group(family, q, bound=bound)
    M = named_M(G, spec)
    F = G.field
    p = F.p
    flags: dict = {"p": p, "q": q}
    lam = None
    if family in ("SL2", "PSL2") and hasattr(M, "E"):
        if family == "PSL2" and p == 2:
            raise CaseNotCovered("PSL2(q) with q even coincides with SL2(q); use sl2")
        case = "sl2_unipotent" if family == "SL2" else "psl2_unipotent"
        kind = "induced_sylow"
        if family == "PSL2":
            flags["sqrt_minus4_in_E"] = _sqrt_minus4_in(F, M.E)
    elif family == "SL3":
        if M.family_label == "M1":
            case = "sl3_M1"
        elif M.family_label == "M2":
            case = "sl3_M2"
        else:
            case = f"sl3_L{M.heisenberg_index}"
        kind = "induced_sylow"
    elif family == "Sz":
        case, kind = "sz_center", "induced_sylow"
    else:
        x, y = M.xy
        flags["xy"] = (x, y)
        if p == 3:
            if F.m == 1:
                raise CaseNotCovered("PSL2(3) is not simple; the p = 3 case needs q = 3^m, m > 1")
            lam = next(c for c in range(F.q) if c >= 3)
            case = "psl2_klein_p3"
            kind = "phi_q1" if q % 4 == 1 else "induced_sylow"
        elif p in (5, 7):
            if F.m != 1:
                raise CaseNotCovered(f"Klein case for p = {p} is tabulated over GF({p}) only")
            lam = 1
            case = f"psl2_klein_p{p}"
            kind = f"phi_{p}"
        else:
            if F.m != 1:
                raise CaseNotCovered("Klein case for p > 7 is tabulated over GF(p) only")
            lam = pick_lambda(F, x, y)
            case = "psl2_klein_large_p"
            kind = "phi_q1" if q % 4 == 1 else "induced_sylow"
        flags["lambda"] = lam
    if tau is None:
        tau = choose_tau(G, M, case, lam)
    else:
        if not trivially_meets(M, tau):
            raise CatalogError("tau override fails the trivial-intersection condition")
        flags["tau_override"] = True
    return ObstructionSetup(G, M, tau, kind, case, flags)
