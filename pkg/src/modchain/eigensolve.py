"""Ground states, low-lying spectra and the module energy gap."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse.linalg as spla

from .basis import build_sector_basis
from .hamiltonian import ModuleSpec, SparseOperator, build_module_hamiltonian

DENSE_THRESHOLD = 2000  # below this, dense eigh beats iterative solvers
FULL_SPECTRUM_CAP = 6000
RESIDUAL_TOL = 1e-8


class ConvergenceError(RuntimeError):
    pass


class CapacityError(RuntimeError):
    pass


@dataclass(frozen=True)
class EigenPair:
    energy: float
    vector: np.ndarray


@dataclass(frozen=True)
class GapResult:
    e0: float
    e1: float
    delta: float
    sector_of_ground: int
    sector_of_gap: int

    @property
    def degenerate(self) -> bool:
        return self.delta < 1e-10


def _fix_phase(v: np.ndarray) -> np.ndarray:
    i = np.argmax(np.abs(v))
    phase = v[i] / abs(v[i])
    return v / phase


def _check_residual(op: SparseOperator, e: float, v: np.ndarray):
    res = np.linalg.norm(op.apply(v) - e * v)
    if res > RESIDUAL_TOL * max(1.0, abs(e)):
        raise ConvergenceError(f"eigenpair residual {res:.3e} at E={e:.6f}")


def lowest_k(op: SparseOperator, k: int) -> list[EigenPair]:
    """k lowest eigenpairs, energies nondecreasing, phases fixed."""
    if not 1 <= k <= op.dim:
        raise ValueError(f"k={k} out of range [1, {op.dim}]")
    if op.dim <= DENSE_THRESHOLD or k > op.dim // 3:
        evals, evecs = la.eigh(op.dense())
        evals, evecs = evals[:k], evecs[:, :k]
    else:
        try:
            evals, evecs = spla.eigsh(op.matrix, k=k, which="SA")
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceError(f"Lanczos failed to converge: {exc}") from exc
        order = np.argsort(evals)
        evals, evecs = evals[order], evecs[:, order]
    pairs = []
    for e, v in zip(evals, evecs.T):
        v = _fix_phase(v.astype(complex))
        _check_residual(op, e, v)
        pairs.append(EigenPair(float(e), v))
    return pairs


def ground_state(op: SparseOperator) -> EigenPair:
    return lowest_k(op, 1)[0]


def full_spectrum(op: SparseOperator) -> list[EigenPair]:
    """Complete orthonormal eigenbasis (dense; capped)."""
    if op.dim > FULL_SPECTRUM_CAP:
        raise CapacityError(
            f"dim {op.dim} exceeds full-spectrum cap {FULL_SPECTRUM_CAP}; "
            "raise modchain.eigensolve.FULL_SPECTRUM_CAP if this is intended"
        )
    evals, evecs = la.eigh(op.dense())
    return [
        EigenPair(float(e), _fix_phase(v.astype(complex)))
        for e, v in zip(evals, evecs.T)
    ]


GAP_SECTOR_OFFSETS = (0, -1, 1, -2, 2)


def energy_gap(spec: ModuleSpec, sector_offsets=GAP_SECTOR_OFFSETS) -> GapResult:
    """Gap between the two lowest module energies across nearby sectors.

    Scans n_up = N/2 and its neighbors; the first excitation of an open
    XXZ chain in the XY phase lives there.
    """
    half = spec.n_sites // 2
    found = []  # (energy, sector)
    for off in sector_offsets:
        n_up = half + off
        if not 0 <= n_up <= spec.n_sites:
            continue
        basis = build_sector_basis(spec.n_sites, n_up)
        op = build_module_hamiltonian(spec, basis)
        k = min(2, op.dim)
        for p in lowest_k(op, k):
            found.append((p.energy, n_up))
    found.sort()
    (e0, s0), (e1, s1) = found[0], found[1]
    return GapResult(e0, e1, e1 - e0, s0, s1)


def module_ground(spec: ModuleSpec):
    """Ground state of a module in its half-filling sector."""
    basis = build_sector_basis(spec.n_sites, spec.n_sites // 2)
    op = build_module_hamiltonian(spec, basis)
    return basis, ground_state(op)
