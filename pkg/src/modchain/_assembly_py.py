"""Pure-numpy XXZ assembly kernel (fallback when the C extension is absent)."""

from __future__ import annotations

import numpy as np


def csr_matvec_complex(indptr, indices, data, x):
    """Fallback for the fused kernel: let scipy's CSR matvec do the work."""
    import scipy.sparse as sp

    n = len(indptr) - 1
    return sp.csr_matrix((data, indices, indptr), shape=(n, n)) @ x


def xxz_triplets(states, sites_i, sites_j, strengths, delta):
    """COO triplets of sum_b w_b (X_i X_j + Y_i Y_j + delta Z_i Z_j) in a sector.

    Pauli convention: each antiparallel bond hops with amplitude 2*w_b, each
    bond contributes +/- delta*w_b on the diagonal.  Returns (rows, cols,
    vals, diag); off-diagonal triplets cover the upper and lower part.
    """
    rows_all, cols_all, vals_all = [], [], []
    diag = np.zeros(len(states), dtype=np.float64)
    for i, j, w in zip(sites_i, sites_j, strengths):
        bi = (states >> np.int64(i)) & 1
        bj = (states >> np.int64(j)) & 1
        anti = bi != bj
        diag += delta * w * np.where(anti, -1.0, 1.0)
        rows = np.nonzero(anti)[0]
        flipped = states[rows] ^ np.int64((1 << i) | (1 << j))
        cols = np.searchsorted(states, flipped)
        rows_all.append(rows)
        cols_all.append(cols)
        vals_all.append(np.full(len(rows), 2.0 * w))
    if rows_all:
        return (
            np.concatenate(rows_all),
            np.concatenate(cols_all),
            np.concatenate(vals_all),
            diag,
        )
    empty = np.empty(0, dtype=np.int64)
    return empty, empty.copy(), np.empty(0, dtype=np.float64), diag
