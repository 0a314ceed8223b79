import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modchain.basis import build_sector_basis
from modchain.entanglement import (
    BELL_BASIS,
    PairReducer,
    bell_decompose,
    binary_entropy,
    concurrence,
    entanglement_from_weights,
    reduced_two_qubit,
)

from conftest import dense_partial_trace_pair


def _sector_state(n, n_up, seed):
    basis = build_sector_basis(n, n_up)
    rng = np.random.default_rng(seed)
    v = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    return basis, v / np.linalg.norm(v)


def _lift(basis, v):
    full = np.zeros(2**basis.n_sites, complex)
    full[basis.states] = v
    return full


def test_bell_basis_unitary():
    np.testing.assert_allclose(
        BELL_BASIS.conj().T @ BELL_BASIS, np.eye(4), atol=1e-15
    )


def test_bell_decompose_pure_bell_states():
    for k in range(4):
        rho = np.outer(BELL_BASIS[:, k], BELL_BASIS[:, k].conj())
        mix = bell_decompose(rho)
        expect = np.zeros(4)
        expect[k] = 1.0
        np.testing.assert_allclose(mix.weights, expect, atol=1e-14)
        assert mix.residual < 1e-14


def test_bell_decompose_maximally_mixed():
    mix = bell_decompose(np.eye(4) / 4)
    np.testing.assert_allclose(mix.weights, 0.25, atol=1e-15)


def test_reduction_matches_dense_partial_trace():
    for (a, b) in ((0, 7), (2, 5), (7, 0)):
        basis, v = _sector_state(8, 4, seed=a * 10 + b)
        got = reduced_two_qubit(v, a, b, basis=basis)
        want = dense_partial_trace_pair(_lift(basis, v), 8, a, b)
        np.testing.assert_allclose(got, want, atol=1e-13)
        assert np.trace(got).real == pytest.approx(1.0, abs=1e-12)


def test_full_space_reduction_matches_oracle():
    rng = np.random.default_rng(11)
    psi = rng.normal(size=2**6) + 1j * rng.normal(size=2**6)
    psi /= np.linalg.norm(psi)
    for (a, b) in ((0, 5), (3, 1)):
        got = reduced_two_qubit(psi, a, b)
        want = dense_partial_trace_pair(psi, 6, a, b)
        np.testing.assert_allclose(got, want, atol=1e-13)


def test_density_reduction_matches_vector_reduction():
    basis, v = _sector_state(6, 3, seed=5)
    rho = np.outer(v, v.conj())
    np.testing.assert_allclose(
        reduced_two_qubit(rho, 0, 5, basis=basis),
        reduced_two_qubit(v, 0, 5, basis=basis),
        atol=1e-13,
    )


def test_bell_weights_fast_path_matches_decomposition():
    basis, v = _sector_state(8, 4, seed=9)
    red = PairReducer(basis, 0, 7)
    fast = red.bell_weights(v)
    slow = bell_decompose(red.reduce(v))
    np.testing.assert_allclose(fast, slow.weights, atol=1e-12)
    assert fast.sum() == pytest.approx(1.0, abs=1e-12)


def test_sector_states_have_px_equal_py():
    """Fixed magnetization kills the xy-asymmetric coherences."""
    for seed in range(4):
        basis, v = _sector_state(8, 4, seed=seed)
        w = PairReducer(basis, 0, 7).bell_weights(v)
        assert w[1] == pytest.approx(w[2], abs=1e-12)


def test_entanglement_trivial_values():
    assert entanglement_from_weights([1.0, 0, 0, 0]).e == pytest.approx(1.0)
    assert entanglement_from_weights([1.0, 0, 0, 0]).c == pytest.approx(1.0)
    assert entanglement_from_weights([0.25] * 4).e == 0.0
    assert entanglement_from_weights([0.25] * 4).c == 0.0
    # below the p=1/2 threshold both measures vanish
    assert entanglement_from_weights([0.5, 0.3, 0.1, 0.1]).e == 0.0


def test_concurrence_trivial_states():
    singlet = BELL_BASIS[:, 0]
    assert concurrence(np.outer(singlet, singlet.conj())) == pytest.approx(1.0)
    assert concurrence(np.eye(4) / 4) == pytest.approx(0.0, abs=1e-8)
    product = np.zeros(4)
    product[1] = 1.0
    assert concurrence(np.outer(product, product)) == pytest.approx(0.0, abs=1e-8)


@given(st.floats(0.26, 1.0), st.integers(0, 3))
@settings(max_examples=60, deadline=None)
def test_bell_diagonal_concurrence_closed_form(p_max, which):
    """For Bell-diagonal states the Wootters formula reduces to 2 p_max - 1."""
    rest = (1.0 - p_max) / 3.0
    if p_max < rest:
        return
    w = np.full(4, rest)
    w[which] = p_max
    rho = BELL_BASIS @ np.diag(w) @ BELL_BASIS.conj().T
    assert concurrence(rho) == pytest.approx(max(0.0, 2 * p_max - 1), abs=1e-9)
    val = entanglement_from_weights(w)
    assert val.c == pytest.approx(max(0.0, 2 * p_max - 1), abs=1e-12)


def test_e_and_concurrence_consistent():
    """E = 1 - H((1+C)/2) for singlet-dominant Bell-diagonal mixtures."""
    for p in (0.6, 0.75, 0.9, 0.99):
        w = [p, (1 - p) / 3, (1 - p) / 3, (1 - p) / 3]
        val = entanglement_from_weights(w)
        assert val.e == pytest.approx(
            1.0 - binary_entropy((1.0 + val.c) / 2.0), abs=1e-12
        )


def test_e_monotone_in_p_max():
    ps = np.linspace(0.5, 1.0, 40)
    es = [entanglement_from_weights([p, 1 - p, 0, 0]).e for p in ps]
    assert all(b >= a for a, b in zip(es, es[1:]))


def test_binary_entropy_edges():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == pytest.approx(1.0)
