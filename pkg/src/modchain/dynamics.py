"""Unitary time evolution: Lanczos/Krylov propagation and dense oracles.

Times are in hbar/J with hbar = 1.  The Krylov path serves large sectors;
the dense paths double as test oracles and as the thermal-evolution engine.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as la

from .eigensolve import CapacityError
from .hamiltonian import SparseOperator

DENSE_CAP = 6000
KRYLOV_M_START = 20
KRYLOV_M_MAX = 60


class AccuracyError(RuntimeError):
    pass


def _lanczos_expv_multi(op: SparseOperator, v: np.ndarray, taus, tol: float,
                        m_max: int = KRYLOV_M_MAX, m_warm: int = 2):
    """exp(-i H tau) v for every tau in taus from one Lanczos subspace.

    Grows the subspace until the a-posteriori estimate at the largest tau
    drops below tol.  Returns (array of vectors, m) or (None, m) when the
    subspace cap is hit.  m_warm skips convergence checks below the size
    the previous call needed.
    """
    taus = np.asarray(taus, dtype=float)
    tau_max = taus.max()
    beta0 = np.linalg.norm(v)
    dim = len(v)
    V = np.empty((m_max + 1, dim), dtype=complex)
    V[0] = v / beta0
    alphas = np.empty(m_max)
    betas = np.empty(m_max)
    w = op.apply(V[0])
    m = 0
    converged = False
    while True:
        a = np.vdot(V[m], w).real
        alphas[m] = a
        w -= a * V[m]
        if m > 0:
            w -= betas[m - 1] * V[m - 1]
        # one pass of full reorthogonalization (BLAS-2); m stays small
        coeffs = np.conj(V[: m + 1] @ w.conj())
        w -= V[: m + 1].T @ coeffs
        b = np.sqrt(np.vdot(w, w).real)
        m += 1
        if b < 1e-13:  # invariant subspace: result exact
            converged = True
            break
        if m >= m_warm - 1:
            theta, q = la.eigh_tridiagonal(
                alphas[:m], betas[: m - 1], check_finite=False
            )
            y_last = q[-1] @ (np.exp(-1j * theta * tau_max) * q[0])
            if b * abs(y_last) * min(tau_max, 1.0) < tol:
                converged = True
                break
        if m >= m_max:
            break
        betas[m - 1] = b
        V[m] = w / b
        w = op.apply(V[m])
    if not converged:
        return None, m
    theta, q = la.eigh_tridiagonal(alphas[:m], betas[: m - 1], check_finite=False)
    # all taus at once: (m x m) @ (m x ntau) then back to full space
    phases = np.exp(-1j * np.outer(theta, taus))
    y = q @ (phases * q[0][:, None]) * beta0
    psis = (V[:m].T @ y).T
    psis /= np.linalg.norm(psis, axis=1)[:, None]
    return psis, m


def evolve_krylov(op: SparseOperator, v: np.ndarray, t: float,
                  tol: float = 1e-8) -> np.ndarray:
    """Approximate exp(-i H t) v with adaptive sub-stepping."""
    if len(v) != op.dim:
        raise ValueError("dimension mismatch")
    if t == 0:
        return v.astype(complex).copy()
    psi = v.astype(complex)
    sign = 1.0 if t > 0 else -1.0
    remaining = abs(t)
    dt = remaining
    n_halvings = 0
    while remaining > 1e-14:
        step = min(dt, remaining)
        res, _ = _lanczos_expv_multi(op, psi, [sign * step],
                                     tol * step / abs(t))
        if res is None:
            dt = step / 2
            n_halvings += 1
            if n_halvings > 60:
                raise AccuracyError(f"tol={tol} unreachable at step {dt:.3e}")
            continue
        psi = res[0]
        remaining -= step
    return psi


def krylov_samples(op: SparseOperator, v0: np.ndarray, times, tol: float = 1e-8,
                   chunk: int = 12):
    """Yield exp(-i H t) v0 at each time in the (increasing) grid.

    Consecutive samples within a chunk share one Krylov subspace, which is
    the main cost saving over stepping sample by sample.
    """
    times = np.asarray(times, dtype=float)
    total = max(times[-1] - times[0], 1e-30)
    psi = v0.astype(complex)
    t_cur = times[0]
    if times[0] != 0:
        psi = evolve_krylov(op, psi, times[0], tol)
    yield psi
    i = 1
    m_warm = 2
    while i < len(times):
        j = min(i + chunk, len(times))
        taus = times[i:j] - t_cur
        res, m_warm = _lanczos_expv_multi(op, psi, taus, tol * taus[-1] / total,
                                          m_warm=m_warm)
        if res is None:
            if j - i > 1:
                j = i + (j - i) // 2
                taus = times[i:j] - t_cur
                res, m_warm = _lanczos_expv_multi(
                    op, psi, taus, tol * taus[-1] / total
                )
            if res is None:
                # single sample still too far: sub-step through it
                res = [evolve_krylov(op, psi, times[i] - t_cur, tol)]
                j = i + 1
        for k in range(len(res)):
            yield res[k]
        psi = res[-1]
        t_cur = times[j - 1]
        i = j


class DensePropagator:
    """Full eigendecomposition of a sector operator, reused across times."""

    def __init__(self, op: SparseOperator):
        if op.dim > DENSE_CAP:
            raise CapacityError(f"dim {op.dim} exceeds dense cap {DENSE_CAP}")
        self.op = op
        self.energies, self.modes = la.eigh(op.dense())

    def evolve(self, v: np.ndarray, t: float) -> np.ndarray:
        c = self.modes.conj().T @ v
        return self.modes @ (np.exp(-1j * self.energies * t) * c)

    def states_at(self, v0: np.ndarray, times) -> np.ndarray:
        """Array of shape (len(times), dim) with exp(-i H t) v0 per row."""
        times = np.asarray(times, dtype=float)
        c0 = self.modes.conj().T @ v0
        phases = np.exp(-1j * np.outer(self.energies, times))
        return (self.modes @ (c0[:, None] * phases)).T

    def evolve_density(self, rho: np.ndarray, t: float) -> np.ndarray:
        U = self.modes
        B = U.conj().T @ rho @ U
        p = np.exp(-1j * self.energies * t)
        return U @ (B * np.outer(p, p.conj())) @ U.conj().T


def evolve_dense(op: SparseOperator, v: np.ndarray, t: float) -> np.ndarray:
    return DensePropagator(op).evolve(v.astype(complex), t)


def evolve_density(op: SparseOperator, rho: np.ndarray, t: float) -> np.ndarray:
    """rho(t) = exp(-iHt) rho exp(+iHt) via the eigenbasis of H."""
    return DensePropagator(op).evolve_density(rho, t)
