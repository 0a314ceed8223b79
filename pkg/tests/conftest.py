"""Shared dense oracles: full 2^N Kronecker construction, no sparsity, no sectors.

Everything here is deliberately independent of the package internals so the
fast paths have something honest to disagree with.
"""

import numpy as np
import pytest

SX = np.array([[0.0, 1.0], [1.0, 0.0]])
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SZ = np.array([[1.0, 0.0], [0.0, -1.0]])
ID2 = np.eye(2)


def kron_site(op, site, n):
    """op acting on `site` (0-based, site 0 = least significant bit)."""
    out = np.array([[1.0 + 0.0j]])
    for k in range(n):
        out = np.kron(op if k == site else ID2, out)
    return out


def dense_xxz(n, bonds, delta):
    """sum_b w_b (X X + Y Y + delta Z Z) on neighbours, Pauli convention.

    `bonds` is the length n-1 list of bond strengths.
    """
    h = np.zeros((2**n, 2**n), complex)
    for b, w in enumerate(bonds):
        for op in (SX, SY):
            h += w * (kron_site(op, b, n) @ kron_site(op, b + 1, n))
        h += w * delta * (kron_site(SZ, b, n) @ kron_site(SZ, b + 1, n))
    return h


def dense_number_up(n):
    """Counts set bits: bit value 1 = spin up in the package's encoding."""
    return sum((np.eye(2**n) - kron_site(SZ, k, n).real) / 2 for k in range(n))


def sector_projector_states(n, n_up):
    """Full-space indices whose bit count is n_up, ascending (= sector order)."""
    return np.array([s for s in range(2**n) if bin(s).count("1") == n_up])


def dense_partial_trace_pair(rho_or_psi, n, site_a, site_b):
    """Two-site reduced density matrix, row index 2*s_a + s_b (s=0 is up)."""
    psi = np.asarray(rho_or_psi)
    if psi.ndim == 1:
        rho = np.outer(psi, psi.conj())
    else:
        rho = psi
    # full-space axis k corresponds to bit n-1-k after reshape
    t = rho.reshape((2,) * (2 * n))
    keep = [n - 1 - site_a, n - 1 - site_b]
    perm = keep + [k for k in range(n) if k not in keep]
    t = t.transpose(perm + [n + p for p in perm])
    t = t.reshape(4, 2 ** (n - 2), 4, 2 ** (n - 2))
    return np.einsum("aebe->ab", t)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260826)
