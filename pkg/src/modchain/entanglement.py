"""Two-qubit reduction, Bell-basis weights, and entanglement measures."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import SectorBasis, SectorError

# columns: singlet, (sx x 1)|psi->, (sy x 1)|psi->, (sz x 1)|psi->
# in the pair basis {00, 01, 10, 11}, index 2*s_a + s_b, up = 1
_S2 = 1.0 / np.sqrt(2.0)
BELL_BASIS = np.array(
    [
        [0, -_S2, 1j * _S2, 0],
        [_S2, 0, 0, _S2],
        [-_S2, 0, 0, _S2],
        [0, _S2, 1j * _S2, 0],
    ],
    dtype=complex,
)

_SYSY = np.array(
    [[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=float
)


@dataclass(frozen=True)
class BellMix:
    p_s: float
    p_x: float
    p_y: float
    p_z: float
    residual: float

    @property
    def weights(self) -> np.ndarray:
        return np.array([self.p_s, self.p_x, self.p_y, self.p_z])

    @property
    def p_max(self) -> float:
        return float(self.weights.max())


@dataclass(frozen=True)
class EntanglementValue:
    e: float  # relative entropy of entanglement, Bell-diagonal form
    c: float  # concurrence


class PairReducer:
    """Precomputed scatter map for fast end-pair reduction of sector states.

    Groups every sector configuration by its environment bits; the reduced
    matrix is then a 4 x n_env Gram product, cheap enough to run once per
    time sample inside the propagation loop.
    """

    def __init__(self, basis: SectorBasis, site_a: int, site_b: int):
        n = basis.n_sites
        if not (0 <= site_a < n and 0 <= site_b < n) or site_a == site_b:
            raise SectorError(f"bad site pair ({site_a}, {site_b}) for {n} sites")
        states = basis.states
        sa = (states >> np.int64(site_a)) & 1
        sb = (states >> np.int64(site_b)) & 1
        pair = 2 * sa + sb
        env = states & ~np.int64((1 << site_a) | (1 << site_b))
        uniq, rank = np.unique(env, return_inverse=True)
        self.n_env = len(uniq)
        self.flat = (pair * self.n_env + rank).astype(np.intp)
        self._buf = np.zeros(4 * self.n_env, dtype=complex)
        # basis index of configuration (pair p, env e), or -1
        gather = np.full(4 * self.n_env, -1, dtype=np.int64)
        gather[self.flat] = np.arange(basis.dim)
        self.gather = gather.reshape(4, self.n_env)

    def reduce(self, psi: np.ndarray) -> np.ndarray:
        buf = self._buf
        buf[:] = 0
        buf[self.flat] = psi
        V = buf.reshape(4, self.n_env)
        return V @ V.conj().T

    def reduce_density(self, rho: np.ndarray) -> np.ndarray:
        out = np.zeros((4, 4), dtype=complex)
        G = self.gather
        for p in range(4):
            for q in range(4):
                ok = (G[p] >= 0) & (G[q] >= 0)
                out[p, q] = rho[G[p, ok], G[q, ok]].sum()
        return out

    def bell_weights(self, psi: np.ndarray) -> np.ndarray:
        """Diagonal of the reduced state in the Bell basis (fast path).

        Uses the fixed-magnetization block structure: only the 01/10
        coherence and the 00/11 coherence survive, so six inner products
        determine all four weights.
        """
        buf = self._buf
        buf[:] = 0
        buf[self.flat] = psi
        V = buf.reshape(4, self.n_env)
        f00 = np.vdot(V[0], V[0]).real
        f11 = np.vdot(V[1], V[1]).real
        f22 = np.vdot(V[2], V[2]).real
        f33 = np.vdot(V[3], V[3]).real
        c_in = np.vdot(V[2], V[1]).real  # Re rho_{01,10}
        c_out = np.vdot(V[3], V[0]).real  # Re rho_{00,11}
        return np.array(
            [
                (f11 + f22) / 2 - c_in,  # singlet
                (f00 + f33) / 2 - c_out,  # (sx x 1)|psi->
                (f00 + f33) / 2 + c_out,  # (sy x 1)|psi->
                (f11 + f22) / 2 + c_in,  # (sz x 1)|psi->
            ]
        )


def reduced_two_qubit(state, site_a: int, site_b: int,
                      basis: SectorBasis | None = None) -> np.ndarray:
    """Partial trace down to the ordered pair (site_a, site_b).

    Accepts a sector state/density matrix (with its basis) or a full-space
    one (length a power of two, bit b = site b).
    """
    state = np.asarray(state)
    if basis is not None:
        red = PairReducer(basis, site_a, site_b)
        if state.ndim == 1:
            return red.reduce(state)
        return red.reduce_density(state)
    n = int(np.log2(state.shape[0]))
    if 2 ** n != state.shape[0]:
        raise SectorError("full-space state length must be a power of two")
    if state.ndim == 1:
        psi = _pair_major(state, n, site_a, site_b)
        return psi @ psi.conj().T
    axes = _pair_axes_perm(n, site_a, site_b)
    rho = state.reshape([2] * (2 * n))
    rho = rho.transpose(axes + [a + n for a in axes])
    rho = rho.reshape(4, 2 ** (n - 2), 4, 2 ** (n - 2))
    return np.einsum("aebe->ab", rho)


def _pair_axes_perm(n: int, site_a: int, site_b: int) -> list[int]:
    # numpy axis k of the reshaped tensor is site n-1-k (bit order)
    ax_a, ax_b = n - 1 - site_a, n - 1 - site_b
    rest = [k for k in range(n) if k not in (ax_a, ax_b)]
    return [ax_a, ax_b] + rest


def _pair_major(psi: np.ndarray, n: int, site_a: int, site_b: int) -> np.ndarray:
    t = psi.reshape([2] * n).transpose(_pair_axes_perm(n, site_a, site_b))
    return t.reshape(4, 2 ** (n - 2))


def bell_decompose(rho: np.ndarray) -> BellMix:
    """Weights of the four Bell projectors plus the off-diagonal residual."""
    in_bell = BELL_BASIS.conj().T @ rho @ BELL_BASIS
    w = in_bell.diagonal().real
    off = in_bell - np.diag(in_bell.diagonal())
    return BellMix(*(float(x) for x in w), float(np.abs(off).max()))


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))


def entanglement_from_weights(weights) -> EntanglementValue:
    p_max = float(np.clip(max(weights), 0.0, 1.0))
    c = max(0.0, 2.0 * p_max - 1.0)
    e = 1.0 - binary_entropy(p_max) if p_max > 0.5 else 0.0
    return EntanglementValue(e, c)


def entanglement_E(mix: BellMix) -> EntanglementValue:
    """1 - H(p_max) for singlet-dominant Bell-diagonal states, else 0."""
    return entanglement_from_weights(mix.weights)


def concurrence(rho: np.ndarray) -> float:
    """Wootters concurrence of an arbitrary two-qubit density matrix."""
    rho_t = _SYSY @ rho.conj() @ _SYSY
    lam = np.linalg.eigvals(rho @ rho_t).real
    lam = np.sqrt(np.clip(lam, 0.0, None))
    lam[::-1].sort()
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))
