import numpy as np
import pytest

from hopfcert.catalog import sylow_subgroup
from hopfcert.characters import induced_character
from hopfcert.groups import GroupError, build_group, expected_order, sz_u
from hopfcert.suzuki import _pack, sz_census, sz_chi_at, sz_elements_chunks, sz_parts


def test_census_matches_closure_at_8():
    G = build_group("Sz", 8)
    chunks = np.concatenate(list(sz_elements_chunks(8)))
    assert len(chunks) == expected_order("Sz", 8)
    mine = {tuple(m.ravel()) for m in chunks}
    theirs = {tuple(int(v) for v in row) for row in G.elements}
    assert mine == theirs


def test_census_at_8():
    c = sz_census(8, samples=500)
    assert c.order == c.expected_order == 29120
    assert c.distinct and c.closure_ok
    assert c.chi == {"1": 455, "u(0,1)": 7, "u(1,0)": 7, "u(1,1)": 7}


def test_streamed_chi_matches_dense():
    G = build_group("Sz", 8)
    chi = induced_character(G, sylow_subgroup(G))
    F = G.field
    for a, b in [(0, 1), (1, 0), (3, 5), (7, 2)]:
        idx = int(G.index_of(sz_u(F, a, b).reshape(1, 16))[0])
        assert sz_chi_at(8, sz_u(F, a, b)) == chi.values[idx]


def test_chi_workers_agree():
    F = sz_parts(8)[0]
    x = sz_u(F, 1, 0)
    assert sz_chi_at(8, x, workers=2) == sz_chi_at(8, x, workers=1)


def test_pack_is_injective_on_sample():
    chunk = next(sz_elements_chunks(8))
    hi, lo = _pack(chunk, 8)
    assert len({(int(h), int(l)) for h, l in zip(hi, lo)}) == len(chunk)


def test_bad_q():
    with pytest.raises(GroupError):
        sz_parts(4)
    with pytest.raises(GroupError):
        sz_parts(2)


@pytest.mark.slow
def test_sz32(include_sz32):
    if not include_sz32:
        pytest.skip("Sz(32) census runs with --include-sz32 or HOPFCERT_SZ32=1")
    c = sz_census(32, chi_points=((0, 1), (1, 0)))
    assert c.order == 32 ** 2 * 31 * 1025 and c.distinct and c.closure_ok
    assert c.chi["u(0,1)"] == c.chi["u(1,0)"] == 31
