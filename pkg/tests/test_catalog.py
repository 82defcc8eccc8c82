import numpy as np
import pytest

from hopfcert.catalog import (CaseNotCovered, CatalogError, classify_klein, invariant_factors,
                              is_central_type, klein_subgroups, make_setup, named_M, parse_spec,
                              pick_lambda, solve_circle, sylow_subgroup, trivially_meets)
from hopfcert.field import field_create
from hopfcert.groups import build_group

SETUPS = [("SL2", 4, "U"), ("SL2", 8, "E=1,g"), ("SL2", 9, "U"), ("PSL2", 9, "U"),
          ("PSL2", 5, "klein:x=2,y=0"), ("PSL2", 7, "klein:x=2,y=3"), ("PSL2", 9, "klein"),
          ("PSL2", 13, "klein"), ("SL3", 3, "M1"), ("SL3", 3, "M2"), ("SL3", 3, "L0"),
          ("Sz", 8, "Z2x2")]


def test_parse_spec():
    assert parse_spec("sl2:E=1,g").basis == ("1", "g")
    assert parse_spec("U").whole
    assert parse_spec("sl3:L1").j == "1"
    assert parse_spec("L3").j == "3"
    assert parse_spec("sz:Z2x2").rank == 2
    assert parse_spec("Z2^2").rank == 2
    assert parse_spec("psl2:klein:x=2,y=0").xy == ("2", "0")
    for bad in ("V", "klein:x=1", "E="):
        with pytest.raises(CatalogError):
            parse_spec(bad)
    with pytest.raises(CatalogError):
        parse_spec("sz:U", family="SL3")


@pytest.mark.parametrize("family,q,spec", SETUPS)
def test_setups_are_central_type_and_meet_trivially(family, q, spec):
    s = make_setup(family, q, spec)
    w = is_central_type(s.M)
    assert w.paired
    assert s.M.is_abelian() and s.M.is_closed()
    assert trivially_meets(s.M, s.tau)


def test_invariant_factors():
    expect = {("SL2", 4, "U"): (2, 2), ("SL2", 9, "U"): (3, 3), ("PSL2", 7, "klein:x=2,y=3"): (2, 2),
              ("SL3", 3, "M1"): (3, 3), ("Sz", 8, "Z2x2"): (2, 2)}
    for (f, q, spec), inv in expect.items():
        assert invariant_factors(make_setup(f, q, spec).M) == inv
    with pytest.raises(CatalogError):
        named_M(build_group("SL2", 5), "U")


def test_odd_dimension_rejected():
    with pytest.raises(CatalogError):
        make_setup("SL2", 5, "U")
    with pytest.raises(CatalogError):
        make_setup("SL2", 8, "E=1")


def test_not_covered():
    with pytest.raises(CaseNotCovered):
        make_setup("PSL2", 3, "klein")
    with pytest.raises(CaseNotCovered):
        make_setup("PSL2", 25, "klein", bound=10 ** 5)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 17, 19, 23, 29])
def test_circle_solution_counts(p):
    sols = solve_circle(field_create(p))
    assert all((x * x + y * y + 1) % p == 0 for x, y in sols)
    assert len(sols) == (p + 1 if p % 4 == 3 else p - 1)
    assert any(x * y == 0 for x, y in sols) == (p % 4 == 1)


@pytest.mark.parametrize("p", [11, 13, 17, 19, 23, 29, 31])
def test_lambda_choice(p):
    F = field_create(p)
    for x, y in solve_circle(F):
        lam = pick_lambda(F, x, y)
        bad = {2 % p, (-2) % p}
        assert lam % p != 0
        assert {lam % p, lam * x % p, lam * y % p}.isdisjoint(bad)


# PSL2(9) is A6, which has two classes of Klein four-subgroups
@pytest.mark.parametrize("q,classes", [(5, 1), (7, 2), (9, 2), (11, 1), (13, 1), (17, 2)])
def test_klein_classes(q, classes):
    info = classify_klein(build_group("PSL2", q))
    assert info["class_count"] == classes
    assert sum(info["orbit_sizes"]) == info["klein_count"]
    if q % 4 == 3:
        assert info["containing_hbar"] == (q + 1) // 4


def test_klein_subgroups_are_klein():
    G = build_group("PSL2", 7)
    for K in klein_subgroups(G):
        assert len(K) == 4
        assert sorted(int(o) for o in G.element_orders[list(K)]) == [1, 2, 2, 2]


def test_sylow_orders():
    for f, q, n in (("SL2", 9, 9), ("PSL2", 13, 13), ("SL3", 3, 27), ("Sz", 8, 64)):
        U = sylow_subgroup(build_group(f, q))
        assert U.order == n and U.is_closed()
