import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from math import comb

from modchain.basis import (
    MAX_SITES,
    SectorError,
    SiteMap,
    build_sector_basis,
    embed_product_state,
)

from conftest import sector_projector_states


def test_sector_sizes_binomial():
    for n in range(2, 21, 2):
        for n_up in (0, 1, n // 2, n):
            assert build_sector_basis(n, n_up).dim == comb(n, n_up)


def test_states_sorted_and_correct_popcount():
    b = build_sector_basis(10, 4)
    assert np.all(np.diff(b.states) > 0)
    for s in b.states:
        assert bin(int(s)).count("1") == 4


def test_states_match_full_space_filter():
    for n, n_up in ((6, 3), (8, 2), (9, 5)):
        b = build_sector_basis(n, n_up)
        np.testing.assert_array_equal(b.states, sector_projector_states(n, n_up))


def test_index_round_trip():
    b = build_sector_basis(12, 6)
    for i in range(0, b.dim, 37):
        assert b.index_of(int(b.states[i])) == i


def test_index_of_rejects_wrong_sector():
    b = build_sector_basis(6, 3)
    with pytest.raises(SectorError):
        b.index_of(0b000001)


def test_bad_arguments():
    with pytest.raises(SectorError):
        build_sector_basis(4, 5)
    with pytest.raises(SectorError):
        build_sector_basis(-1, 0)
    with pytest.raises(SectorError):
        build_sector_basis(MAX_SITES + 2, 1)


def test_site_map_mirror():
    m = SiteMap(4, 4)
    # left labels 1..4 -> sites 0..3; right labels 1..4 -> sites 7..4
    assert [m.left_site(k) for k in (1, 2, 3, 4)] == [0, 1, 2, 3]
    assert [m.right_site(k) for k in (1, 2, 3, 4)] == [7, 6, 5, 4]


def test_embed_product_state_against_kron():
    """Sector embedding == full-space kron with the right module bit-reversed."""
    rng = np.random.default_rng(7)
    nl = nr = 3
    bl = build_sector_basis(nl, 1)
    br = build_sector_basis(nr, 2)
    joint = build_sector_basis(nl + nr, 3)
    l = rng.normal(size=bl.dim) + 1j * rng.normal(size=bl.dim)
    r = rng.normal(size=br.dim) + 1j * rng.normal(size=br.dim)
    emb = embed_product_state(l, bl, r, br, joint)

    full = np.zeros(2 ** (nl + nr), complex)
    for jl, cl in enumerate(bl.states):
        for jr, cr in enumerate(br.states):
            # right label m sits at site (nl+nr) - m: reverse the bit pattern
            rrev = sum(
                ((int(cr) >> b) & 1) << (nr - 1 - b) for b in range(nr)
            )
            full[int(cl) | (rrev << nl)] += l[jl] * r[jr]
    lifted = np.zeros_like(full)
    lifted[joint.states] = emb
    np.testing.assert_allclose(lifted, full, atol=1e-14)


def test_embed_norm_preserved():
    bl = build_sector_basis(4, 2)
    joint = build_sector_basis(8, 4)
    v = np.ones(bl.dim) / np.sqrt(bl.dim)
    emb = embed_product_state(v, bl, v, bl, joint)
    assert np.linalg.norm(emb) == pytest.approx(1.0, abs=1e-14)


def test_embed_sector_mismatch():
    bl = build_sector_basis(4, 2)
    joint = build_sector_basis(8, 3)
    v = np.ones(bl.dim)
    with pytest.raises(SectorError):
        embed_product_state(v, bl, v, bl, joint)


@given(st.integers(2, 14), st.data())
@settings(max_examples=40, deadline=None)
def test_index_of_inverse_property(n, data):
    n_up = data.draw(st.integers(0, n))
    b = build_sector_basis(n, n_up)
    i = data.draw(st.integers(0, b.dim - 1))
    assert b.index_of(int(b.states[i])) == i
