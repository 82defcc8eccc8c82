import numpy as np
import pytest

from hopfcert.catalog import make_setup, named_M, solve_circle, sylow_subgroup
from hopfcert.field import field_create
from hopfcert.groups import build_group
from hopfcert.structure import (center_of, centralizer, circle_counts, e_subspaces, exponent_of,
                                nonsplit_conjugate, nonsplit_torus, rank_one_count, split_torus,
                                sz_z_u, theta_sl3, transporter)


def test_sl3_counts():
    G = build_group("SL3", 3)
    assert rank_one_count(G) == 14
    u = int(G.index_of(np.array([[1, 0, 1, 0, 1, 0, 0, 0, 1]]))[0])
    assert len(centralizer(G, u)) == 54
    # w - 1 = [[0,a,b],[0,0,c],[0,0,0]] has rank 1 iff ac = 0: (2q - 1) q - 1 elements
    for q in (2, 3):
        assert rank_one_count(build_group("SL3", q)) == (2 * q - 1) * q - 1


def test_sz8_counts():
    G = build_group("Sz", 8)
    U = sylow_subgroup(G)
    Z = center_of(U)
    assert Z.order == 8 and exponent_of(U) == 4
    invs = {int(x) for x in U.members if G.element_orders[x] == 2}
    assert invs == {int(z) for z in Z.members} - {G.identity_index}
    assert {int(z) for z in Z.members} == {int(z) for z in sz_z_u(G).members}
    # g with g u(0,1) g^-1 in U is the Borel subgroup U T
    z = next(int(x) for x in Z.members if int(x) != G.identity_index)
    assert len(transporter(G, z, U)) == 64 * 7


@pytest.mark.parametrize("p", [2, 3])
def test_theta_maps_lp_to_l0(p):
    G = build_group("SL3", p)
    lp = named_M(G, "L2" if p == 2 else "Lp")
    l0 = named_M(G, "L0")
    image = np.sort(theta_sl3(G, lp.members))
    assert np.array_equal(image, np.sort(l0.members))
    # Theta is an automorphism
    a, b = 5, 17
    ab = int(G.mul(a, b))
    assert theta_sl3(G, [ab])[0] == G.mul(theta_sl3(G, [a])[0], theta_sl3(G, [b])[0])


@pytest.mark.parametrize("p", [7, 11, 13])
def test_conjugation_formula(p):
    G = build_group("PSL2", p)
    F = G.field
    x, y = solve_circle(F)[0]
    for a in range(p):
        for b in range(p):
            if (a * a + b * b) % p == 1:
                conj, pred = nonsplit_conjugate(G, a, b, x, y)
                assert conj == pred


@pytest.mark.parametrize("q", [5, 7, 9, 11, 13])
def test_torus_orders(q):
    G = build_group("PSL2", q)
    assert split_torus(G).order == (q - 1) // 2
    assert nonsplit_torus(G).order == (q + 1) // 2
    S = build_group("SL2", q)
    assert split_torus(S).order == q - 1 and nonsplit_torus(S).order == q + 1


def test_e_subspaces():
    counts = {(p, m): len(e_subspaces(field_create(p, m))) for p, m in
              [(3, 2), (5, 2), (2, 2), (2, 4), (3, 4), (5, 1)]}
    # even-dimensional subspaces through 1: Gaussian binomials [m-1, d-1]_p over d even
    assert counts == {(3, 2): 1, (5, 2): 1, (2, 2): 1, (2, 4): 1 + 7, (3, 4): 1 + 13, (5, 1): 0}


def test_circle_counts():
    assert circle_counts([5, 7, 13]) == {5: 4, 7: 8, 13: 12}
