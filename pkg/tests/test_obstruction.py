from fractions import Fraction
from math import gcd

import numpy as np
import pytest

from hopfcert.catalog import make_setup, solve_circle, trivially_meets
from hopfcert.characters import character_for, special_character
from hopfcert.field import field_create
from hopfcert.groups import BoundExceeded, build_group, double_coset
from hopfcert.obstruction import (ObstructionCertificate, certify, chi_y2_direct, chi_y2_fiber,
                                  chi_y2_quadloop, compute_y, identity_quadruples)

# frozen from independent runs of the three methods and the closed forms
VALUES = [
    ("PSL2", 5, "klein:x=2,y=0", "15/4"),
    ("PSL2", 7, "klein:x=2,y=3", "1/4"),
    ("SL2", 4, "U", "135/4"),
    ("SL2", 8, "E=1,g", "3087/4"),
    ("SL2", 9, "U", "512/9"),
    ("SL2", 16, "E=1,g", "57375/4"),
    ("PSL2", 9, "U", "640/3"),
    ("PSL2", 25, "E=1,g", "107136/25"),
    ("PSL2", 9, "klein", "125/4"),
    ("PSL2", 11, "klein", "125/4"),
    ("PSL2", 13, "klein", "343/4"),
    ("PSL2", 17, "klein", "729/4"),
    ("PSL2", 27, "klein", "2197/4"),
    ("SL3", 2, "M1", "5/4"),
    ("SL3", 3, "M1", "64/9"),
    ("SL3", 3, "L3", "64/9"),
    ("SL3", 3, "M2", "34496/9"),
    ("Sz", 8, "Z2x2", "22295/4"),
]


@pytest.mark.parametrize("family,q,spec,value", VALUES)
def test_values_three_way(family, q, spec, value):
    s = make_setup(family, q, spec)
    cert = certify(s)
    assert set(cert.methods.values()) == {Fraction(value)}
    assert cert.value == Fraction(value)
    assert cert.closed_form == cert.value
    assert cert.gcd_with_M == gcd(cert.value.denominator, s.M.order) > 1
    assert cert.conclusion == "obstructed"


def test_psl2_9_unipotent_formula():
    # (q-1)^3 (q+6) / (4|M|) with sqrt(-4) in E = GF(9) and |M| = 9
    s = make_setup("PSL2", 9, "U")
    assert s.M.order == 9 and s.flags["sqrt_minus4_in_E"]
    assert certify(s).value == Fraction(8 ** 3 * 15, 4 * 9) == Fraction(640, 3)


@pytest.mark.parametrize("family,q,spec", [(f, q, s) for f, q, s, _ in VALUES])
def test_support_invariant(family, q, spec):
    s = make_setup(family, q, spec)
    y = compute_y(character_for(s), s.M, s.tau)
    coset = set(int(g) for g in double_coset(s.M, s.tau))
    assert len(coset) == s.M.order ** 2
    assert set(int(g) for g in y.support()) <= coset


@pytest.mark.parametrize("family,q,spec", [("SL2", 4, "U"), ("SL2", 9, "U"), ("PSL2", 7, "klein:x=2,y=3"),
                                           ("PSL2", 13, "klein"), ("SL3", 3, "M1"), ("Sz", 8, "Z2x2")])
def test_identity_criterion(family, q, spec):
    s = make_setup(family, q, spec)
    G = s.group
    found, predicted = identity_quadruples(s.M, s.tau)
    if int(G.inverses[s.tau]) == s.tau:
        assert found == predicted


def test_inconclusive_when_integral():
    # L0 with the M1 choice of tau yields an integer, so no certificate
    cert = certify(make_setup("SL3", 3, "L0"))
    assert cert.value == 8256
    assert cert.conclusion == "inconclusive"
    assert ObstructionCertificate({}, Fraction(7, 3), {"a": Fraction(7, 3)}, None, 4).conclusion == "inconclusive"
    assert ObstructionCertificate({}, Fraction(1), {"a": 1, "b": 2}, None, 4).conclusion == "inconclusive"


@pytest.mark.parametrize("p", [11, 13, 17, 19])
def test_large_p_vanishing(p):
    """For xy != 0 the chosen tau makes psi vanish on tau v and (tau v)^2, v != 1."""
    F = field_create(p)
    x, y = next((x, y) for x, y in solve_circle(F) if x * y)
    s = make_setup("PSL2", p, f"klein:x={x},y={y}")
    chi = character_for(s)
    G = s.group
    for v in s.M.members:
        if int(v) == G.identity_index:
            continue
        tv = int(G.mul(s.tau, v))
        assert chi.values[tv] == 0
        assert chi.values[int(G.mul(tv, tv))] == 0


@pytest.mark.parametrize("p", [13, 17])
def test_xy_zero_branch(p):
    F = field_create(p)
    for x, y in solve_circle(F):
        if x * y == 0:
            cert = certify(make_setup("PSL2", p, f"klein:x={x},y={y}"))
            assert cert.value == Fraction((p + 1) ** 3 * (2 - p), 32)
            assert cert.value in {Fraction((p + 1) ** 3, 32), Fraction((p + 1) ** 3 * (2 - p), 32)}
            assert cert.conclusion == "obstructed"


def test_xy_zero_at_p5_with_large_p_character():
    """Outside the p > 7 hypothesis the same recipe gives -27 for every lambda."""
    G = build_group("PSL2", 5)
    psi = special_character("phi_q1", G)
    s = make_setup("PSL2", 5, "klein:x=2,y=0")
    for lam in range(1, 5):
        tau = int(G.index_of(np.array([[1, 0, lam, 1]]))[0])
        if trivially_meets(s.M, tau):
            y = compute_y(psi, s.M, tau)
            assert chi_y2_direct(psi, y) == chi_y2_fiber(psi, s.M, tau) == Fraction(-27)


def test_quadloop_bound():
    s = make_setup("SL2", 9, "U")
    with pytest.raises(BoundExceeded):
        chi_y2_quadloop(character_for(s), s.M, s.tau, bound=100)


def test_certificate_json_has_no_floats():
    import json
    cert = certify(make_setup("Sz", 8, "Z2x2"))
    d = json.loads(cert.dumps())

    def walk(x):
        assert not isinstance(x, float)
        for v in (x.values() if isinstance(x, dict) else x if isinstance(x, list) else ()):
            walk(v)

    walk(d)
    assert d["value"] == "22295/4" and d["methods"]["quadloop"] == "22295/4"
