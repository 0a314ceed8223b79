"""Quenched modular XXZ chains: end-to-end entanglement amplification at desk scale."""

__version__ = "0.1.0"

from .basis import SectorBasis, SiteMap, build_sector_basis, embed_product_state, index_of
from .eigensolve import EigenPair, GapResult, energy_gap, full_spectrum, ground_state, lowest_k
from .entanglement import (
    BellMix,
    EntanglementValue,
    bell_decompose,
    concurrence,
    entanglement_E,
    reduced_two_qubit,
)
from .hamiltonian import (
    ChainSpec,
    ModuleSpec,
    SparseOperator,
    build_module_hamiltonian,
    build_total_hamiltonian,
)
from .dynamics import evolve_dense, evolve_density, evolve_krylov
from .kernels import BACKEND

__all__ = [
    "BACKEND",
    "BellMix",
    "ChainSpec",
    "EigenPair",
    "EntanglementValue",
    "GapResult",
    "ModuleSpec",
    "SectorBasis",
    "SiteMap",
    "SparseOperator",
    "bell_decompose",
    "build_module_hamiltonian",
    "build_sector_basis",
    "build_total_hamiltonian",
    "concurrence",
    "embed_product_state",
    "energy_gap",
    "entanglement_E",
    "evolve_dense",
    "evolve_density",
    "evolve_krylov",
    "full_spectrum",
    "ground_state",
    "index_of",
    "lowest_k",
    "reduced_two_qubit",
]
