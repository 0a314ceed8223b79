"""Fixed-magnetization basis enumeration for spin-1/2 chains.

Configurations are unsigned integers; bit b set means spin up at linear
site b.  All Hamiltonians here conserve the number of up spins, so every
computation lives in one magnetization sector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

MAX_SITES = 28  # bit-width cap for int64 configs with headroom


class SectorError(ValueError):
    """Configuration or size outside the requested sector."""


@dataclass(frozen=True)
class SectorBasis:
    """All n_sites-bit configurations with exactly n_up set bits, sorted."""

    n_sites: int
    n_up: int
    states: np.ndarray  # int64, strictly increasing
    _lookup: dict = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    def index_of(self, config: int) -> int:
        try:
            return self._lookup[int(config)]
        except KeyError:
            raise SectorError(
                f"config {config:#x} not in sector (n_sites={self.n_sites}, "
                f"n_up={self.n_up})"
            ) from None


def build_sector_basis(n_sites: int, n_up: int) -> SectorBasis:
    """Enumerate the fixed-n_up sector in increasing integer order."""
    if n_sites < 1 or n_sites > MAX_SITES:
        raise SectorError(f"n_sites must be in [1, {MAX_SITES}], got {n_sites}")
    if not 0 <= n_up <= n_sites:
        raise SectorError(f"n_up={n_up} out of range [0, {n_sites}]")
    size = comb(n_sites, n_up)
    states = np.empty(size, dtype=np.int64)
    if n_up == 0:
        states[0] = 0
    else:
        # Gosper's hack: next integer with the same popcount
        s = (1 << n_up) - 1
        for i in range(size):
            states[i] = s
            c = s & -s
            r = s + c
            s = (((r ^ s) >> 2) // c) | r
    lookup = {int(s): i for i, s in enumerate(states)}
    return SectorBasis(n_sites, n_up, states, lookup)


def index_of(basis: SectorBasis, config: int) -> int:
    return basis.index_of(config)


@dataclass(frozen=True)
class SiteMap:
    """Mirror numbering of the two modules onto linear chain sites.

    Left module site m (1-based, impurity first) sits at linear m-1; the
    right module is mirrored, its site m sitting at linear N-m.  The two
    inner impurities (labels N_L and N_R) are thus adjacent at linear
    N_L-1 and N_L, and the quench bond is the ordinary (N_L-1, N_L) bond.
    """

    left_size: int
    right_size: int

    @property
    def n_sites(self) -> int:
        return self.left_size + self.right_size

    def left_site(self, label: int) -> int:
        if not 1 <= label <= self.left_size:
            raise SectorError(f"left label {label} out of range")
        return label - 1

    def right_site(self, label: int) -> int:
        if not 1 <= label <= self.right_size:
            raise SectorError(f"right label {label} out of range")
        return self.n_sites - label


def _reverse_bits(config: int, width: int) -> int:
    out = 0
    for b in range(width):
        if config >> b & 1:
            out |= 1 << (width - 1 - b)
    return out


def embed_product_state(
    left: np.ndarray,
    left_basis: SectorBasis,
    right: np.ndarray,
    right_basis: SectorBasis,
    joint_basis: SectorBasis,
) -> np.ndarray:
    """Tensor product of two module states inside the joint sector.

    The right module's bits are reversed before shifting (mirror site
    numbering, see SiteMap).  Output amplitude on (l, r) is the product
    of the module amplitudes.
    """
    nl, nr = left_basis.n_sites, right_basis.n_sites
    if joint_basis.n_sites != nl + nr:
        raise SectorError("joint basis size does not match the two modules")
    if joint_basis.n_up != left_basis.n_up + right_basis.n_up:
        raise SectorError("joint sector magnetization mismatch")
    if len(left) != left_basis.dim or len(right) != right_basis.dim:
        raise SectorError("state length does not match its basis")
    out = np.zeros(joint_basis.dim, dtype=complex)
    shifted = [_reverse_bits(int(r), nr) << nl for r in right_basis.states]
    for jr, rconf in enumerate(shifted):
        amp_r = right[jr]
        if amp_r == 0:
            continue
        for jl, lconf in enumerate(left_basis.states):
            a = left[jl] * amp_r
            if a != 0:
                out[joint_basis.index_of(int(lconf) | rconf)] = a
    return out
