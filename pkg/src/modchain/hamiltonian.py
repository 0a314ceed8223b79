"""XXZ module and quenched-chain Hamiltonians restricted to a sector.

Pauli-operator convention throughout: every bond term is
w * (X_i X_j + Y_i Y_j + delta * Z_i Z_j), so an antiparallel pair hops
with amplitude 2w and the diagonal picks up +/- delta*w per bond.
Energies are in units of J, times in hbar/J.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .basis import SectorBasis, SectorError, SiteMap
from .kernels import csr_matvec_complex, xxz_triplets


@dataclass(frozen=True)
class ModuleSpec:
    """One XXZ module: bulk of n_sites spins with two end impurities.

    j is the bulk exchange (energy units), j_prime the dimensionless
    impurity coupling, delta the z anisotropy.
    """

    n_sites: int
    j: float = 1.0
    j_prime: float = 1.0
    delta: float = 0.0
    allow_delta_outside_xy: bool = False

    def __post_init__(self):
        if self.n_sites < 4 or self.n_sites % 2:
            raise SectorError(f"module size must be even and >= 4, got {self.n_sites}")
        if self.j <= 0 or self.j_prime <= 0:
            raise SectorError("j and j_prime must be positive")
        if not self.allow_delta_outside_xy and not -1.0 <= self.delta <= 1.0:
            raise SectorError(
                f"delta={self.delta} outside the gapless XY window [-1, 1]; "
                "pass allow_delta_outside_xy=True to override"
            )

    def bond_strengths(self) -> np.ndarray:
        """Strength of bond (b, b+1) for b = 0..n_sites-2: J'J ends, J bulk."""
        w = np.full(self.n_sites - 1, self.j)
        w[0] = self.j_prime * self.j
        w[-1] = self.j_prime * self.j
        return w


@dataclass(frozen=True)
class ChainSpec:
    """Two modules plus the quench bond j_i switched on at t = 0.

    bond_factors, when given, multiplies every physical bond strength
    (linear bond order 0..N-2, quench bond at index left.n_sites-1).
    """

    left: ModuleSpec
    right: ModuleSpec
    j_i: float
    bond_factors: tuple = None

    def __post_init__(self):
        if self.left.j != self.right.j or self.left.delta != self.right.delta:
            raise SectorError("modules must share J and delta")
        if self.j_i < 0:
            raise SectorError("j_i must be nonnegative")
        if self.bond_factors is not None:
            nb = self.n_sites - 1
            if len(self.bond_factors) != nb:
                raise SectorError(
                    f"bond_factors needs {nb} entries (one per physical bond), "
                    f"got {len(self.bond_factors)}"
                )
            object.__setattr__(self, "bond_factors", tuple(float(f) for f in self.bond_factors))

    @property
    def n_sites(self) -> int:
        return self.left.n_sites + self.right.n_sites

    @property
    def site_map(self) -> SiteMap:
        return SiteMap(self.left.n_sites, self.right.n_sites)

    @property
    def delta(self) -> float:
        return self.left.delta

    def bond_strengths(self) -> np.ndarray:
        """All N-1 bonds of the joined chain in linear order.

        The mirrored right module makes the joined system an ordinary open
        chain: left bonds, then the quench bond J_I J, then the right
        module's bonds reversed.
        """
        w = np.concatenate(
            [
                self.left.bond_strengths(),
                [self.j_i * self.left.j],
                self.right.bond_strengths()[::-1],
            ]
        )
        if self.bond_factors is not None:
            w = w * np.asarray(self.bond_factors)
        return w


@dataclass(frozen=True)
class SparseOperator:
    """Real-symmetric sector Hamiltonian in CSR form."""

    basis: SectorBasis
    matrix: sp.csr_matrix = field(repr=False)

    @property
    def dim(self) -> int:
        return self.basis.dim

    def apply(self, v: np.ndarray) -> np.ndarray:
        if len(v) != self.dim:
            raise SectorError(f"vector length {len(v)} != operator dim {self.dim}")
        m = self.matrix
        if np.iscomplexobj(v) and m.indices.dtype == np.int32:
            return csr_matvec_complex(
                m.indptr, m.indices, m.data,
                np.ascontiguousarray(v, dtype=complex),
            )
        return m @ v

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()


def _assemble(basis: SectorBasis, sites_i, sites_j, strengths, delta) -> SparseOperator:
    rows, cols, vals, diag = xxz_triplets(
        basis.states,
        np.asarray(sites_i, dtype=np.int64),
        np.asarray(sites_j, dtype=np.int64),
        np.asarray(strengths, dtype=np.float64),
        float(delta),
    )
    n = basis.dim
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    if np.any(diag):
        mat = mat + sp.diags(diag)
    return SparseOperator(basis, sp.csr_matrix(mat))


def build_module_hamiltonian(spec: ModuleSpec, basis: SectorBasis) -> SparseOperator:
    """H_k = J'J (h_{1,2} + h_{N-1,N}) + J sum_i h_{i,i+1} in the sector."""
    if basis.n_sites != spec.n_sites:
        raise SectorError(
            f"basis has {basis.n_sites} sites, module has {spec.n_sites}"
        )
    n = spec.n_sites
    return _assemble(
        basis, np.arange(n - 1), np.arange(1, n), spec.bond_strengths(), spec.delta
    )


def build_total_hamiltonian(chain: ChainSpec, basis: SectorBasis) -> SparseOperator:
    """H_T = H_L + H_R + H_I on the joined chain (quench bond included)."""
    if basis.n_sites != chain.n_sites:
        raise SectorError(
            f"basis has {basis.n_sites} sites, chain has {chain.n_sites}"
        )
    n = chain.n_sites
    return _assemble(
        basis, np.arange(n - 1), np.arange(1, n), chain.bond_strengths(), chain.delta
    )


def build_decoupled_hamiltonian(chain: ChainSpec, basis: SectorBasis) -> SparseOperator:
    """H_L + H_R embedded in the joint sector, quench bond set to zero."""
    n = chain.n_sites
    w = ChainSpec(chain.left, chain.right, 0.0, chain.bond_factors).bond_strengths()
    # drop the quench bond entirely so a zero strength never enters the pattern
    keep = np.ones(n - 1, dtype=bool)
    keep[chain.left.n_sites - 1] = False
    return _assemble(
        basis, np.arange(n - 1)[keep], np.arange(1, n)[keep], w[keep], chain.delta
    )
