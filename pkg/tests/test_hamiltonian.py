import numpy as np
import pytest

from modchain.basis import build_sector_basis
from modchain.hamiltonian import (
    ChainSpec,
    ModuleSpec,
    build_decoupled_hamiltonian,
    build_module_hamiltonian,
    build_total_hamiltonian,
)

from conftest import dense_xxz, sector_projector_states


def _sector_block(h_full, n, n_up):
    idx = sector_projector_states(n, n_up)
    return h_full[np.ix_(idx, idx)]


def _chain(n_half, j_prime, j_i, delta, j=1.0, factors=None):
    mod = ModuleSpec(n_half, j, j_prime, delta)
    return ChainSpec(mod, mod, j_i, bond_factors=factors)


@pytest.mark.parametrize("delta", [0.0, 0.5, 1.0, -1.0])
@pytest.mark.parametrize("n_half,n_up", [(4, 4), (4, 3), (4, 5)])
def test_total_hamiltonian_matches_dense_kron(n_half, n_up, delta):
    chain = _chain(n_half, 0.45, 0.8, delta)
    n = chain.n_sites
    basis = build_sector_basis(n, n_up)
    h = build_total_hamiltonian(chain, basis).dense()
    oracle = _sector_block(dense_xxz(n, chain.bond_strengths(), delta), n, n_up)
    np.testing.assert_allclose(h, oracle.real, atol=1e-12)


def test_module_hamiltonian_matches_dense_kron():
    spec = ModuleSpec(6, 1.0, 0.3, 0.7)
    basis = build_sector_basis(6, 3)
    h = build_module_hamiltonian(spec, basis).dense()
    oracle = _sector_block(dense_xxz(6, spec.bond_strengths(), 0.7), 6, 3)
    np.testing.assert_allclose(h, oracle.real, atol=1e-12)


def test_hermitian_and_real():
    chain = _chain(6, 0.2, 1.3, 0.9)
    basis = build_sector_basis(12, 6)
    m = build_total_hamiltonian(chain, basis).matrix
    d = (m - m.T).tocoo()
    assert len(d.data) == 0 or np.abs(d.data).max() < 1e-14


def test_xx_chain_zero_diagonal():
    chain = _chain(4, 0.5, 0.75, 0.0)
    basis = build_sector_basis(8, 4)
    h = build_total_hamiltonian(chain, basis)
    np.testing.assert_allclose(h.matrix.diagonal(), 0.0, atol=1e-14)


def test_bond_strength_layout():
    chain = _chain(4, 0.5, 0.75, 0.0, j=2.0)
    np.testing.assert_allclose(
        chain.bond_strengths(),
        2.0 * np.array([0.5, 1, 0.5, 0.75, 0.5, 1, 0.5]),
    )


def test_decoupled_is_total_minus_quench_bond():
    chain = _chain(4, 0.5, 0.75, 0.6)
    basis = build_sector_basis(8, 4)
    h_t = build_total_hamiltonian(chain, basis).dense()
    h_0 = build_decoupled_hamiltonian(chain, basis).dense()
    bonds = chain.bond_strengths().copy()
    bonds[3] = 0.0  # quench bond (N_L-1, N_L)
    oracle = _sector_block(dense_xxz(8, bonds, 0.6), 8, 4).real
    np.testing.assert_allclose(h_0, oracle, atol=1e-12)
    assert np.abs(h_t - h_0).max() > 0.1


def test_j_i_zero_means_no_coupling():
    chain = _chain(4, 0.5, 0.0, 0.3)
    basis = build_sector_basis(8, 4)
    h_t = build_total_hamiltonian(chain, basis).dense()
    h_0 = build_decoupled_hamiltonian(chain, basis).dense()
    np.testing.assert_allclose(h_t, h_0, atol=1e-14)


def test_bond_factors_identity_and_scaling():
    base = _chain(4, 0.5, 0.75, 0.4)
    ones = _chain(4, 0.5, 0.75, 0.4, factors=np.ones(7))
    np.testing.assert_allclose(base.bond_strengths(), ones.bond_strengths())
    f = np.linspace(0.9, 1.1, 7)
    pert = _chain(4, 0.5, 0.75, 0.4, factors=f)
    np.testing.assert_allclose(
        pert.bond_strengths(), base.bond_strengths() * f
    )


def test_spin_flip_symmetry():
    """[H, global flip] = 0: the complementary sector has the same spectrum."""
    chain = _chain(4, 0.35, 1.1, 0.8)
    up = build_sector_basis(8, 3)
    dn = build_sector_basis(8, 5)
    e_up = np.linalg.eigvalsh(build_total_hamiltonian(chain, up).dense())
    e_dn = np.linalg.eigvalsh(build_total_hamiltonian(chain, dn).dense())
    np.testing.assert_allclose(e_up, e_dn, atol=1e-12)


def test_apply_agrees_with_dense():
    chain = _chain(4, 0.5, 0.75, 0.5)
    basis = build_sector_basis(8, 4)
    h = build_total_hamiltonian(chain, basis)
    rng = np.random.default_rng(3)
    v = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    np.testing.assert_allclose(h.apply(v), h.dense() @ v, atol=1e-12)


def test_spec_validation():
    with pytest.raises(ValueError):
        ModuleSpec(5, 1.0, 0.5, 0.0)  # odd module
    with pytest.raises(ValueError):
        ModuleSpec(4, 1.0, -0.5, 0.0)
    with pytest.raises(ValueError):
        ModuleSpec(4, 1.0, 0.5, 1.5)
    ModuleSpec(4, 1.0, 0.5, 1.5, allow_delta_outside_xy=True)
    left = ModuleSpec(4, 1.0, 0.5, 0.0)
    with pytest.raises(ValueError):
        ChainSpec(left, ModuleSpec(4, 2.0, 0.5, 0.0), 0.75)  # unequal J
    with pytest.raises(ValueError):
        ChainSpec(left, left, -0.1)
    with pytest.raises(ValueError):
        ChainSpec(left, left, 0.75, bond_factors=np.ones(5))
