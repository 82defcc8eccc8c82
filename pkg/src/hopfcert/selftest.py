"""The regression matrix behind ``hopfcert selftest``.

Each check is a module-level function returning a JSON-ready detail dict with
a boolean ``pass`` entry, so checks can be farmed out to worker processes and
merged back in a fixed order.  Expected values here are the frozen results of
independent derivations (closed forms instantiated by hand, printed values).
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from .catalog import classify_klein, make_setup, solve_circle, sylow_subgroup, torus_generators
from .characters import closed_form_character, induced_character
from .exact import format_rational
from .field import field_create
from .groups import Subgroup, build_group, sz_u
from .obstruction import certify, identity_quadruples

__all__ = ["CHECKS", "DEFAULT_MATRIX", "run_checks", "SZ32_CHECK"]


def check_character(family: str, q: int) -> dict:
    G = build_group(family, q)
    chi = induced_character(G, sylow_subgroup(G))
    ref = closed_form_character(G)
    agree = bool(np.array_equal(chi.values, ref.values))
    total = chi.total()
    support = bool(np.array_equal(chi.values != 0, G.in_p_mask))
    table = sorted({int(v) for v in np.unique(chi.values)} - {0}, reverse=True)
    return {"pass": agree and total == G.order and support,
            "closed_form_agrees": agree, "sum": total, "order": G.order,
            "support_is_P": support, "values": table}


def check_value(family: str, q: int, spec: str, expected: str) -> dict:
    setup = make_setup(family, q, spec)
    cert = certify(setup)
    want = Fraction(expected)
    ok = cert.value == want and cert.conclusion == "obstructed" and cert.methods_agreement
    if cert.closed_form is not None:
        ok = ok and cert.closed_form == cert.value
    return {"pass": bool(ok), "value": format_rational(cert.value), "expected": expected,
            "closed_form": None if cert.closed_form is None else format_rational(cert.closed_form),
            "conclusion": cert.conclusion}


def check_klein(q: int, classes: int, containing=None) -> dict:
    info = classify_klein(build_group("PSL2", q))
    ok = info["class_count"] == classes
    if containing is not None:
        ok = ok and info["containing_hbar"] == containing
    return {"pass": bool(ok), "class_count": info["class_count"],
            "containing_hbar": info["containing_hbar"], "orbit_sizes": info["orbit_sizes"]}


def check_sl3_counts() -> dict:
    from .structure import centralizer, rank_one_count
    G = build_group("SL3", 3)
    n = rank_one_count(G)
    u = int(G.index_of(np.array([[1, 0, 1, 0, 1, 0, 0, 0, 1]]))[0])
    c = len(centralizer(G, u))
    return {"pass": n == 14 and c == 54, "rank_one": n, "centralizer": c}


def check_sz_counts() -> dict:
    from .structure import center_of, exponent_of, sz_z_u
    G = build_group("Sz", 8)
    U = sylow_subgroup(G)
    Z = center_of(U)
    exp = exponent_of(U)
    invs = set(int(x) for x in U.members[G.element_orders[U.members] == 2])
    zset = set(int(x) for x in Z.members)
    ok = Z.order == 8 and exp == 4 and invs == zset - {G.identity_index} \
        and zset == set(int(x) for x in sz_z_u(G).members)
    return {"pass": bool(ok), "center": Z.order, "exponent": exp, "involutions": len(invs)}


def check_circles() -> dict:
    counts = {p: len(solve_circle(field_create(p))) for p in (5, 7, 13)}
    return {"pass": counts == {5: 4, 7: 8, 13: 12}, "counts": {str(k): v for k, v in counts.items()}}


def check_twist() -> dict:
    from .characters import special_character
    from .twist import (build_twist, corrupted_cocycle, paired_decomposition, second_cocycle,
                        standard_cocycle, verify_prop_key, verify_twist_axioms)
    out = {}
    for name, (fam, q, spec) in {"C2xC2": ("PSL2", 5, "klein:x=2,y=0"),
                                 "C3xC3": ("SL2", 9, "U")}.items():
        M = make_setup(fam, q, spec).M
        dec = paired_decomposition(M)
        std = standard_cocycle(dec)
        out[name] = {
            "standard": verify_twist_axioms(build_twist(M, dec, std)),
            "corrupted": verify_twist_axioms(build_twist(M, dec, corrupted_cocycle(std, _corner(dec)))),
        }
    s = make_setup("PSL2", 5, "klein:x=2,y=0")
    dec = paired_decomposition(s.M)
    chi = special_character("phi_5", s.group)
    r1 = verify_prop_key(s.M, s.tau, chi, standard_cocycle(dec), dec)
    r2 = verify_prop_key(s.M, s.tau, chi, second_cocycle(dec), dec)
    ok = all(v["standard"] and not v["corrupted"] for v in out.values()) \
        and r1.ok and r2.ok and r1.image == r2.image and r1.counit == s.M.order
    out["prop_key"] = r1.ok and r2.ok
    out["omega_independent"] = r1.image == r2.image
    out["counit"] = str(r1.counit)
    return {"pass": bool(ok), **out}


def _corner(dec) -> tuple:
    """A pair of nontrivial characters whose omega-value gets negated."""
    k = len(dec.orders)
    a = tuple(1 if i == 1 else 0 for i in range(k))
    b = tuple(1 if i == 0 else 0 for i in range(k))
    return (a, b)


def check_properties(seed: int = 0) -> dict:
    """Light versions of the property suites, all seeded."""
    rng = np.random.default_rng(seed)
    F = field_create(2, 3)
    from .groups import sz_theta
    theta2 = all(sz_theta(F, sz_theta(F, x)) == int(F.mul[x, x]) for x in range(F.q))
    phi = {int(F.mul[a, sz_theta(F, a)]) for a in range(1, F.q)}
    bij = phi == set(range(1, F.q))
    G = build_group("PSL2", 13)
    g, h = rng.integers(0, G.order, 2000), rng.integers(0, G.order, 2000)
    closure = bool((G.lookup(G.ops.matmul(G.mats(g), G.mats(h)).reshape(-1, 4)) >= 0).all())
    chi = induced_character(G, sylow_subgroup(G))
    conj_inv = bool(np.array_equal(chi.values[G.conj(h, g)], chi.values[g]))
    s = make_setup("SL2", 4, "U")
    found, pred = identity_quadruples(s.M, s.tau)
    ident = found == pred
    from .structure import nonsplit_conjugate
    P7 = build_group("PSL2", 7)
    conjf = all(c == p for a in range(7) for b in range(7) if (a * a + b * b) % 7 == 1
               for c, p in [nonsplit_conjugate(P7, a, b, *solve_circle(P7.field)[0])])
    res = {"theta_squared": theta2, "a_theta_a_bijective": bij, "closure": closure,
           "conjugation_invariance": conj_inv, "identity_criterion": ident, "conjugation_formula": conjf}
    return {"pass": all(res.values()), **res}


def check_sz32(workers: int = 1) -> dict:
    from .suzuki import sz_census
    c = sz_census(32, workers=workers, chi_points=((0, 1), (1, 0)))
    ok = c.order == 32 ** 2 * 31 * 1025 and c.distinct and c.closure_ok \
        and all(v == 31 for k, v in c.chi.items() if k != "1")
    return {"pass": bool(ok), **c.to_json()}


CHECKS = {f.__name__: f for f in (check_character, check_value, check_klein, check_sl3_counts,
                                  check_sz_counts, check_circles, check_twist, check_properties,
                                  check_sz32)}

# (criterion, label, check name, args)
DEFAULT_MATRIX = (
    [(1, f"character {f}({q})", "check_character", (f, q))
     for f, qs in (("SL2", (4, 5, 7, 8, 9)), ("PSL2", (5, 7, 9, 13)), ("SL3", (2, 3)), ("Sz", (8,)))
     for q in qs]
    + [(2, "PSL2(5) klein", "check_value", ("PSL2", 5, "klein:x=2,y=0", "15/4")),
       (2, "PSL2(7) klein", "check_value", ("PSL2", 7, "klein:x=2,y=3", "1/4"))]
    + [(3, f"{f}({q}) {spec}", "check_value", (f, q, spec, v)) for f, q, spec, v in (
        ("SL2", 4, "U", "135/4"), ("SL2", 8, "E=1,g", "3087/4"), ("SL2", 9, "U", "512/9"),
        ("PSL2", 9, "U", "640/3"), ("PSL2", 9, "klein", "125/4"), ("PSL2", 13, "klein", "343/4"),
        ("SL3", 3, "M1", "64/9"), ("SL3", 3, "M2", "34496/9"), ("Sz", 8, "Z2x2", "22295/4"))]
    + [(4, f"klein classes q={q}", "check_klein", (q, c, h))
       for q, c, h in ((5, 1, None), (7, 2, 2), (11, 1, 3), (13, 1, None), (17, 2, None))]
    + [(5, "SL3(3) counts", "check_sl3_counts", ()), (5, "Sz(8) counts", "check_sz_counts", ()),
       (5, "circle counts", "check_circles", ())]
    + [(6, "twist verifier", "check_twist", ())]
    + [(7, "property samples", "check_properties", ())]
)

SZ32_CHECK = (8, "Sz(32) census", "check_sz32", ())


def _run_one(item) -> dict:
    crit, label, name, args = item
    detail = CHECKS[name](*args)
    return {"criterion": crit, "label": label, **detail}


def run_checks(items, workers: int = 1) -> list[dict]:
    items = list(items)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_run_one, items))
    return [_run_one(it) for it in items]
