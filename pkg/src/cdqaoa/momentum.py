"""Fourier block decomposition of translation-invariant BdG matrices.

A uniform ring's quadratic generators commute with translations, so the
2N x 2N Nambu matrices split into N independent 2x2 blocks after a
momentum transform.  The fermion-parity boundary sign makes even rings
antiperiodic: their momenta are (2m+1)*pi/N, while odd rings (parity -1
sector) keep the periodic set 2*pi*m/N.

Internally every m = 0..N-1 indexes one block over the basis pair
(c_{q_m}, c†_{q_{m̄}}) with q_{m̄} = -q_m; the N blocks tile the doubled
index space exactly once, so energies sum over all of them.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "momenta",
    "partner",
    "representatives",
    "fourier_nambu",
    "to_blocks",
    "from_blocks",
    "offblock_residual",
]


def momenta(n: int) -> np.ndarray:
    """Momentum angles q_m, antiperiodic for even n, periodic for odd n."""
    m = np.arange(n)
    if n % 2 == 0:
        return (2.0 * m + 1.0) * np.pi / n
    return 2.0 * np.pi * m / n


def partner(n: int) -> np.ndarray:
    """Index m̄ with q_{m̄} = -q_m (mod 2*pi)."""
    m = np.arange(n)
    if n % 2 == 0:
        return n - 1 - m
    return (n - m) % n


def representatives(n: int) -> np.ndarray:
    """One block index per (q, -q) pair; floor((n-1)/2) + 1 entries."""
    return np.arange((n - 1) // 2 + 1)


def fourier_nambu(n: int) -> np.ndarray:
    """Unitary W = diag(F, conj(F)) sending (c_j, c†_j) to (c_q, c†_q)."""
    j = np.arange(n)
    q = momenta(n)
    f = np.exp(-1j * np.outer(q, j)) / np.sqrt(n)
    w = np.zeros((2 * n, 2 * n), dtype=complex)
    w[:n, :n] = f
    w[n:, n:] = f.conj()
    return w


def to_blocks(a_matrix: np.ndarray, n: int) -> np.ndarray:
    """Extract the N 2x2 momentum blocks of a 2N x 2N Nambu matrix.

    Block m acts on the pair (index m, index N + m̄) of the transformed
    matrix W A W†.  Valid only for translation-invariant matrices; use
    offblock_residual to check how much is discarded.
    """
    w = fourier_nambu(n)
    at = w @ a_matrix @ w.conj().T
    mbar = partner(n)
    blocks = np.zeros((n, 2, 2), dtype=complex)
    for m in range(n):
        pb = n + mbar[m]
        blocks[m, 0, 0] = at[m, m]
        blocks[m, 0, 1] = at[m, pb]
        blocks[m, 1, 0] = at[pb, m]
        blocks[m, 1, 1] = at[pb, pb]
    return blocks


def from_blocks(blocks: np.ndarray, n: int) -> np.ndarray:
    """Inverse of to_blocks: embed the blocks and transform back."""
    at = np.zeros((2 * n, 2 * n), dtype=complex)
    mbar = partner(n)
    for m in range(n):
        pb = n + mbar[m]
        at[m, m] = blocks[m, 0, 0]
        at[m, pb] = blocks[m, 0, 1]
        at[pb, m] = blocks[m, 1, 0]
        at[pb, pb] = blocks[m, 1, 1]
    w = fourier_nambu(n)
    return w.conj().T @ at @ w


def offblock_residual(a_matrix: np.ndarray, n: int) -> float:
    """Largest |entry| of W A W† outside the block pattern."""
    w = fourier_nambu(n)
    at = w @ a_matrix @ w.conj().T
    mbar = partner(n)
    mask = np.zeros((2 * n, 2 * n), dtype=bool)
    for m in range(n):
        pb = n + mbar[m]
        mask[m, m] = mask[m, pb] = mask[pb, m] = mask[pb, pb] = True
    return float(np.abs(np.where(mask, 0.0, at)).max())
