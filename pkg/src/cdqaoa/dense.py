"""Brute-force 2^N state-vector simulator used as the ground-truth oracle.

Everything here is exhaustive and double-precision exact; the caps keep
test runtimes sub-second.  The commutator generators are built from the
symbolic Pauli algebra, so weighted couplings need no hand-derived
formulas.
"""

from __future__ import annotations

import functools
import logging

import numpy as np
from scipy.sparse.linalg import expm_multiply

from .model import AngleSchedule, Boundary, ChainSpec, SpectrumBounds, Variant, expand_constrained
from .pauli import PauliOperator, mixer_operator, sigma_x, sigma_y, sigma_z, target_operator

__all__ = [
    "MAX_SITES_DENSE",
    "MAX_SITES_COMMUTATOR",
    "MAX_SITES_DIAGONAL",
    "StateVector",
    "dense_initial",
    "dense_apply_target",
    "dense_apply_mixer",
    "dense_expm_apply",
    "dense_spectrum",
    "dense_state_energy",
    "dense_run_circuit",
    "diagonal_energies",
    "cd_operator",
    "nested_cd_operators",
    "jw_annihilation",
    "jw_quadratic_dense",
    "parity_x_dense",
]

logger = logging.getLogger(__name__)

MAX_SITES_DENSE = 14
MAX_SITES_COMMUTATOR = 12
MAX_SITES_DIAGONAL = 20

_NORM_TOL = 1e-9


class StateVector:
    """Normalized 2^n amplitude vector over the computational basis."""

    __slots__ = ("amplitudes", "n_sites")

    def __init__(self, amplitudes: np.ndarray, n_sites: int):
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if amplitudes.shape != (1 << n_sites,):
            raise ValueError(f"expected 2^{n_sites} amplitudes")
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"state norm {norm} deviates from 1")
        self.amplitudes = amplitudes
        self.n_sites = n_sites

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def dense_initial(n: int) -> StateVector:
    """Product state ⊗(|0> - |1>)/sqrt(2), the mixer ground state."""
    if n > MAX_SITES_DENSE:
        raise ValueError(f"dense oracle capped at {MAX_SITES_DENSE} sites")
    basis = np.arange(1 << n, dtype=np.uint64)
    signs = 1.0 - 2.0 * (np.bitwise_count(basis).astype(np.int64) & 1)
    return StateVector(signs / np.sqrt(2.0**n) + 0.0j, n)


def diagonal_energies(spec: ChainSpec) -> np.ndarray:
    """Classical Ising energy of every bitstring, index = little-endian bits."""
    n = spec.n_sites
    if n > MAX_SITES_DIAGONAL:
        raise ValueError(f"diagonal enumeration capped at {MAX_SITES_DIAGONAL} sites")
    basis = np.arange(1 << n, dtype=np.int64)
    energies = np.zeros(1 << n)
    for i, j, coupling in spec.bonds():
        zi = 1 - 2 * ((basis >> i) & 1)
        zj = 1 - 2 * ((basis >> j) & 1)
        energies += coupling * (zi * zj)
    return energies


def dense_apply_target(state: StateVector, spec: ChainSpec, gamma: float) -> StateVector:
    """exp(-i*gamma*H_T)|psi> via diagonal phases."""
    if spec.n_sites != state.n_sites:
        raise ValueError("state and spec site counts differ")
    phases = np.exp(-1j * gamma * diagonal_energies(spec))
    return StateVector(state.amplitudes * phases, state.n_sites)


def dense_apply_mixer(state: StateVector, beta: float) -> StateVector:
    """exp(-i*beta*sum_j X_j)|psi> via per-site bit-pair rotations."""
    n = state.n_sites
    c = np.cos(beta)
    s = -1j * np.sin(beta)
    psi = state.amplitudes.copy()
    for j in range(n):
        psi = psi.reshape(-1, 2, 1 << j)
        lo = psi[:, 0, :].copy()
        hi = psi[:, 1, :]
        psi[:, 0, :] = c * lo + s * hi
        psi[:, 1, :] = s * lo + c * hi
        psi = psi.reshape(-1)
    return StateVector(psi, n)


def dense_expm_apply(op: PauliOperator, theta: float, state: StateVector) -> StateVector:
    """exp(i*theta*Op)|psi> for a Hermitian Pauli-sum operator.

    Uses scaled truncated-Taylor evaluation; the result is renormalized and
    the norm drift logged.  Drift beyond 1e-9 signals non-convergence.
    """
    if op.n_sites != state.n_sites:
        raise ValueError("operator and state site counts differ")
    if op.n_sites > MAX_SITES_COMMUTATOR:
        raise ValueError(f"exponentials capped at {MAX_SITES_COMMUTATOR} sites")
    return StateVector(
        _expm_apply_matrix(op.to_sparse(), theta, state.amplitudes), state.n_sites
    )


def _expm_apply_matrix(mat, theta: float, psi: np.ndarray) -> np.ndarray:
    if theta == 0.0:
        return psi.copy()
    out = expm_multiply((1j * theta) * mat, psi)
    norm = np.linalg.norm(out)
    drift = abs(norm - 1.0)
    if drift > _NORM_TOL:
        raise RuntimeError(f"exponential series failed to converge (norm drift {drift:.3e})")
    logger.debug("expm norm drift %.3e", drift)
    return out / norm


def dense_spectrum(spec: ChainSpec) -> SpectrumBounds:
    """Exact spectral bounds of H_T by enumerating all 2^N diagonal energies."""
    energies = diagonal_energies(spec)
    return SpectrumBounds(float(energies.min()), float(energies.max()))


def dense_state_energy(state: StateVector, spec: ChainSpec) -> float:
    """<psi|H_T|psi> for the diagonal target."""
    energies = diagonal_energies(spec)
    return float(np.real(np.vdot(state.amplitudes, energies * state.amplitudes)))


@functools.lru_cache(maxsize=32)
def cd_operator(spec: ChainSpec) -> PauliOperator:
    """Hermitian G with [H_X, H_T] = i*G, from symbolic commutation."""
    return (-1j) * mixer_operator(spec).commutator(target_operator(spec))


@functools.lru_cache(maxsize=32)
def nested_cd_operators(spec: ChainSpec) -> tuple[PauliOperator, PauliOperator]:
    """Hermitian pair ([H_X,[H_X,H_T]], [H_T,[H_X,H_T]])."""
    hx = mixer_operator(spec)
    ht = target_operator(spec)
    inner = hx.commutator(ht)
    return hx.commutator(inner), ht.commutator(inner)


@functools.lru_cache(maxsize=32)
def _cached_sparse(spec: ChainSpec):
    g_cd = cd_operator(spec).to_sparse()
    g_xx, g_tx = (op.to_sparse() for op in nested_cd_operators(spec))
    return g_cd, g_xx, g_tx


def dense_run_circuit(spec: ChainSpec, schedule: AngleSchedule) -> float:
    """Energy of the full variational circuit, brute force.

    Per step k the circuit applies U_2CD(delta_k, zeta_k), then
    U_CD(alpha_k), then the target phase U_{H_T}(gamma_k), then the mixer
    U_{H_X}(beta_k); constrained variants run through their free forms.
    """
    if schedule.variant.is_constrained:
        schedule = expand_constrained(schedule)
    variant = schedule.variant
    n = spec.n_sites
    if variant is not Variant.QAOA and n > MAX_SITES_COMMUTATOR:
        raise ValueError(f"commutator circuits capped at {MAX_SITES_COMMUTATOR} sites")
    state = dense_initial(n)
    if variant is not Variant.QAOA:
        g_cd, g_xx, g_tx = _cached_sparse(spec)
    for row in schedule.values:
        if variant is Variant.QAOA_2CD:
            combo = row[3] * g_xx - row[4] * g_tx
            psi = _expm_apply_matrix(combo, 1.0, state.amplitudes)
            state = StateVector(psi, n)
        if variant is not Variant.QAOA:
            psi = _expm_apply_matrix(g_cd, row[2], state.amplitudes)
            state = StateVector(psi, n)
        state = dense_apply_target(state, spec, row[0])
        state = dense_apply_mixer(state, row[1])
    return dense_state_energy(state, spec)


@functools.lru_cache(maxsize=64)
def jw_annihilation(n: int, j: int) -> PauliOperator:
    """Fermion mode operator c_j = [prod_{l<j} X_l] (Z_j - iY_j)/2."""
    if not 0 <= j < n:
        raise ValueError(f"site {j} out of range for {n} sites")
    op = 0.5 * sigma_z(n, j) + (-0.5j) * sigma_y(n, j)
    for l in range(j):
        op = sigma_x(n, l) * op
    return op


def jw_quadratic_dense(a_matrix: np.ndarray, offset: float, n: int) -> np.ndarray:
    """Dense matrix of the quadratic form (1/2) Psi^dag A Psi + offset.

    Psi stacks (c_1..c_N, c_1^dag..c_N^dag) in the Jordan-Wigner frame.
    Intended for small n cross-checks of fermionic generators.
    """
    if a_matrix.shape != (2 * n, 2 * n):
        raise ValueError("A must be 2N x 2N")
    if n > 10:
        raise ValueError("dense quadratic reconstruction capped at 10 sites")
    modes = [jw_annihilation(n, j).to_dense() for j in range(n)]
    psi = modes + [m.conj().T for m in modes]
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    for a in range(2 * n):
        for b in range(2 * n):
            coeff = a_matrix[a, b]
            if coeff != 0.0:
                out += 0.5 * coeff * (psi[a].conj().T @ psi[b])
    return out + offset * np.eye(dim)


def parity_x_dense(n: int) -> np.ndarray:
    """Dense matrix of the global spin-flip prod_j X_j (the JW fermion parity)."""
    dim = 1 << n
    out = np.zeros((dim, dim))
    basis = np.arange(dim)
    out[basis ^ (dim - 1), basis] = 1.0
    return out
