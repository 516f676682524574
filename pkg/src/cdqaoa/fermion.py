"""Free-fermion (Jordan-Wigner) simulation of the variational circuits.

All circuit generators are quadratic in the JW fermions, so states stay
Gaussian and evolve in the 2N-dimensional Nambu single-particle space at
O(N^3) per unitary.  The convention: n_j = (1 - X_j)/2, so the mixer
ground state has every mode occupied, and Z_j = [prod_{l<j} X_l](c_j† + c_j).

A quadratic form H = (1/2) Psi† A Psi + offset with Psi = (c_1..c_N,
c_1†..c_N†) obeys [H, Psi] = -A Psi, hence U† Psi U = exp(i*theta*A) Psi
for U = exp(i*theta*H); correlation matrices evolve by conjugation with
V = exp(i*theta*A).

Periodic chains: the boundary bond's JW string equals the global fermion
parity, conserved by every generator and fixed to (-1)^N by the initial
state, so the boundary coupling enters the quadratic form with an extra
factor -(-1)^N.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import scipy.linalg

from . import momentum as mom
from ._kernels import default_backend, get_kernels
from .model import (
    AngleSchedule,
    Boundary,
    ChainSpec,
    Variant,
    params_per_step,
    spectrum_bounds,
)

__all__ = [
    "QuadraticGenerator",
    "GaussianState",
    "MomentumBlock",
    "generator_mixer",
    "generator_target",
    "generator_cd",
    "generator_2cd",
    "initial_state",
    "apply_unitary",
    "expect_target",
    "run_circuit",
    "momentum_blocks",
    "state_parity",
    "sector_ground_energy",
    "boundary_parity",
    "CircuitEngine",
    "engine_for",
]

_HERM_TOL = 1e-12


def _ph_image(matrix: np.ndarray) -> np.ndarray:
    """Particle-hole involution S M^T S with S the block swap."""
    n = matrix.shape[0] // 2
    return np.roll(np.roll(matrix.T, n, axis=0), n, axis=1)


@dataclass(frozen=True)
class QuadraticGenerator:
    """Hermitian Nambu matrix A and scalar offset of (1/2) Psi† A Psi + offset."""

    matrix: np.ndarray
    offset: float = 0.0

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise ValueError("generator matrix must be 2N x 2N")
        if np.abs(m - m.conj().T).max() > _HERM_TOL:
            raise ValueError("generator matrix must be Hermitian")
        if np.abs(_ph_image(m) + m).max() > _HERM_TOL * max(1.0, np.abs(m).max()):
            raise ValueError("generator matrix must be particle-hole symmetric")
        object.__setattr__(self, "matrix", m)

    @property
    def n_sites(self) -> int:
        return self.matrix.shape[0] // 2


@dataclass
class GaussianState:
    """Pure Gaussian state as the occupied-frame matrix P (2N x N).

    The columns of P are orthonormal and span the occupied Nambu
    directions; the correlation matrix Gamma_{ij} = <Psi_i Psi_j†> is
    P P†.  Unitary evolution maps P to V P.
    """

    occupied: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.occupied, dtype=complex)
        if p.ndim != 2 or p.shape[0] != 2 * p.shape[1]:
            raise ValueError("occupied frame must be 2N x N")
        self.occupied = p

    @property
    def n_sites(self) -> int:
        return self.occupied.shape[1]

    @property
    def corr(self) -> np.ndarray:
        return self.occupied @ self.occupied.conj().T

    def purity_defect(self) -> float:
        g = self.corr
        return float(np.abs(g @ g - g).max())

    def pairing_defect(self) -> float:
        """Deviation from Gamma + PH(Gamma) = I (canonical anticommutation)."""
        g = self.corr
        n = self.n_sites
        ph = np.roll(np.roll(g.T, n, axis=0), n, axis=1)
        return float(np.abs(g + ph - np.eye(2 * n)).max())


def _mixer_matrix(n: int) -> np.ndarray:
    d = np.concatenate([-2.0 * np.ones(n), 2.0 * np.ones(n)])
    return np.diag(d).astype(complex)


def boundary_parity(n: int) -> int:
    """Fermion parity of the initial state: all N modes occupied."""
    return -1 if n % 2 else 1


def _target_matrix(spec: ChainSpec, parity: int) -> np.ndarray:
    n = spec.n_sites
    a = np.zeros((2 * n, 2 * n), dtype=complex)
    for i, j, coupling in spec.bonds():
        if spec.boundary is Boundary.PERIODIC and (i, j) == (n - 1, 0):
            coupling = -parity * coupling
        # A11 += J(E_ij + E_ji); A12 += J(E_ij - E_ji); A22 = -A11^T; A21 = -A12
        a[i, j] += coupling
        a[j, i] += coupling
        a[i, n + j] += coupling
        a[j, n + i] -= coupling
        a[n + i, j] -= coupling
        a[n + j, i] += coupling
        a[n + i, n + j] -= coupling
        a[n + j, n + i] -= coupling
    return a


def generator_mixer(spec: ChainSpec) -> QuadraticGenerator:
    """Quadratic form of sum_j X_j = sum_j (1 - 2 c_j† c_j)."""
    return QuadraticGenerator(_mixer_matrix(spec.n_sites), 0.0)


def generator_target(spec: ChainSpec, parity: int | None = None) -> QuadraticGenerator:
    """Quadratic form of the Ising target in the given parity sector.

    Each bond J Z_i Z_{i+1} maps to J (c_i† c_{i+1} + c_i† c_{i+1}† -
    c_i c_{i+1}† - c_i c_{i+1}); the periodic boundary bond additionally
    carries -parity (default: the circuit sector (-1)^N).
    """
    if parity is None:
        parity = boundary_parity(spec.n_sites)
    return QuadraticGenerator(_target_matrix(spec, parity), 0.0)


def generator_cd(spec: ChainSpec, parity: int | None = None) -> QuadraticGenerator:
    """Hermitian G with exp(alpha [H_X, H_T]) = exp(i*alpha*G).

    The spin commutator maps to the matrix commutator: the Nambu bracket
    gives [(1/2)Psi†A1Psi, (1/2)Psi†A2Psi] = (1/2)Psi†[A1,A2]Psi, so
    G = -i[A_X, A_T].
    """
    a_x = _mixer_matrix(spec.n_sites)
    a_t = generator_target(spec, parity).matrix
    return QuadraticGenerator(-1j * (a_x @ a_t - a_t @ a_x), 0.0)


def generator_2cd(
    spec: ChainSpec, parity: int | None = None
) -> tuple[QuadraticGenerator, QuadraticGenerator]:
    """Pair (G_xx, G_tx) of nested commutators.

    G_xx = [H_X, [H_X, H_T]] and G_tx = [H_T, [H_X, H_T]], both Hermitian;
    the circuit unitary is exp(i*(delta*G_xx - zeta*G_tx)).
    """
    a_x = _mixer_matrix(spec.n_sites)
    a_t = generator_target(spec, parity).matrix
    inner = a_x @ a_t - a_t @ a_x
    g_xx = a_x @ inner - inner @ a_x
    g_tx = a_t @ inner - inner @ a_t
    return QuadraticGenerator(g_xx, 0.0), QuadraticGenerator(g_tx, 0.0)


def initial_state(spec: ChainSpec) -> GaussianState:
    """Mixer ground state: every JW mode occupied, <X_j> = -1."""
    n = spec.n_sites
    p = np.zeros((2 * n, n), dtype=complex)
    p[n:, :] = np.eye(n)
    return GaussianState(p)


def apply_unitary(state: GaussianState, gen: QuadraticGenerator, angle: float) -> GaussianState:
    """Evolve by U = exp(i*angle*H_gen): P -> exp(i*angle*A) P."""
    if gen.n_sites != state.n_sites:
        raise ValueError("generator and state dimensions differ")
    lam, u = np.linalg.eigh(gen.matrix)
    v = (u * np.exp(1j * angle * lam)) @ u.conj().T
    return GaussianState(v @ state.occupied)


def expect_target(state: GaussianState, spec: ChainSpec) -> float:
    """<H_T> by Wick contraction against the target quadratic form."""
    gen = generator_target(spec)
    if gen.n_sites != state.n_sites:
        raise ValueError("state and spec dimensions differ")
    p = state.occupied
    contraction = np.sum((np.conj(p) * (gen.matrix @ p)).real)
    return float(gen.offset + 0.5 * np.trace(gen.matrix).real - 0.5 * contraction)


_MAJORANA_CACHE: dict[int, np.ndarray] = {}


def _majorana_frame(n: int) -> np.ndarray:
    w = _MAJORANA_CACHE.get(n)
    if w is None:
        w = np.zeros((2 * n, 2 * n), dtype=complex)
        for j in range(n):
            w[2 * j, j] = 1.0
            w[2 * j, n + j] = 1.0
            w[2 * j + 1, j] = 1.0j
            w[2 * j + 1, n + j] = -1.0j
        _MAJORANA_CACHE[n] = w
    return w


def _pfaffian_sign(m: np.ndarray) -> float:
    """Sign of the Pfaffian of a real antisymmetric matrix via real Schur form."""
    t, q = scipy.linalg.schur(m, output="real")
    sign = float(np.sign(np.linalg.det(q)))
    for i in range(0, m.shape[0] - 1, 2):
        sign *= float(np.sign(t[i, i + 1]))
    return sign


def state_parity(state: GaussianState) -> int:
    """Fermion parity <prod_j (1 - 2 n_j)> of a pure Gaussian state (+1 or -1).

    Computed as (-1)^N times the Pfaffian sign of the Majorana covariance
    -i(<m m^T> - I) in the ordering (a_1, b_1, ..., a_N, b_N).
    """
    n = state.n_sites
    w = _majorana_frame(n)
    corr = state.corr
    corr_s = np.roll(corr, n, axis=1)
    mm = w @ corr_s @ w.T
    cov = (-1j * (mm - np.eye(2 * n))).real
    sign = _pfaffian_sign(cov)
    return int(round((-1.0) ** n * sign))


def sector_ground_energy(gen: QuadraticGenerator, parity: int) -> float:
    """Lowest energy of the quadratic form over Gaussian states of fixed parity.

    The unconstrained optimum occupies the N highest single-particle
    directions (E = offset - (1/2) sum of positive eigenvalues); if its
    parity disagrees, the cheapest mode pair is flipped at cost equal to
    the smallest positive eigenvalue.
    """
    lam, u = np.linalg.eigh(gen.matrix)
    n = gen.n_sites
    occ = u[:, n:]
    e0 = gen.offset + 0.5 * np.trace(gen.matrix).real - 0.5 * float(lam[n:].sum())
    gap = float(lam[n:].min())
    if gap < 1e-12:
        return e0
    if state_parity(GaussianState(occ)) == parity:
        return e0
    return e0 + gap


_GENERATOR_KINDS = ("mixer", "target", "cd", "2cd_xx", "2cd_tx")


@dataclass(frozen=True)
class MomentumBlock:
    """One momentum pseudo-spin: 2x2 blocks of every generator kind."""

    k_index: int
    theta_k: float
    blocks: Mapping[str, np.ndarray] = field(compare=False)


def _all_block_matrices(spec: ChainSpec) -> dict[str, np.ndarray]:
    n = spec.n_sites
    g2 = generator_2cd(spec)
    full = {
        "mixer": generator_mixer(spec).matrix,
        "target": generator_target(spec).matrix,
        "cd": generator_cd(spec).matrix,
        "2cd_xx": g2[0].matrix,
        "2cd_tx": g2[1].matrix,
    }
    return {kind: mom.to_blocks(a, n) for kind, a in full.items()}


def momentum_blocks(spec: ChainSpec) -> list[MomentumBlock]:
    """Momentum decomposition of all generators on a uniform ring.

    One block per (q, -q) momentum pair, k = 0..floor((N-1)/2).  Even rings
    sit in the antiperiodic sector (boundary parity), so their angles are
    theta_k = (2k+1)*pi/N; odd rings keep theta_k = 2*pi*k/N.
    """
    if spec.boundary is not Boundary.PERIODIC or not spec.is_uniform:
        raise ValueError("momentum decomposition needs a uniform periodic chain")
    n = spec.n_sites
    per_kind = _all_block_matrices(spec)
    angles = mom.momenta(n)
    out = []
    for k, m in enumerate(mom.representatives(n)):
        blocks = {kind: per_kind[kind][m].copy() for kind in _GENERATOR_KINDS}
        out.append(MomentumBlock(k_index=k, theta_k=float(angles[m]), blocks=blocks))
    return out


_VARIANT_ID = {Variant.QAOA: 0, Variant.QAOA_CD: 1, Variant.QAOA_2CD: 2}


class CircuitEngine:
    """Precompiled circuit evaluator for one chain instance.

    Uniform periodic chains run on the 2x2 momentum-block kernel; all other
    chains on the full 2N x 2N Nambu kernel with cached diagonalizations of
    the fixed generators.  Instances are immutable after construction and
    safe for concurrent reads.
    """

    def __init__(self, spec: ChainSpec, backend: str | None = None, force_bdg: bool = False):
        self.spec = spec
        self.bounds = spectrum_bounds(spec)
        self.backend = backend or default_backend()
        kernels = get_kernels(self.backend)
        self.uses_momentum = (
            not force_bdg and spec.boundary is Boundary.PERIODIC and spec.is_uniform
        )
        n = spec.n_sites
        target = generator_target(spec)
        self._offset = target.offset
        if self.uses_momentum:
            per_kind = _all_block_matrices(spec)
            self._blocks = tuple(
                np.ascontiguousarray(per_kind[kind])
                for kind in ("target", "cd", "2cd_xx", "2cd_tx")
            )
            self._kernel = kernels["momentum"]
        else:
            a_t = target.matrix
            lam_t, u_t = np.linalg.eigh(a_t)
            a_c = generator_cd(spec).matrix
            lam_c, u_c = np.linalg.eigh(a_c)
            g_xx, g_tx = generator_2cd(spec)
            p0 = np.zeros((2 * n, n), dtype=complex)
            p0[n:, :] = np.eye(n)
            ax_diag = np.concatenate([-2.0 * np.ones(n), 2.0 * np.ones(n)])
            self._fixed = (
                p0,
                np.ascontiguousarray(a_t),
                lam_t.copy(),
                np.ascontiguousarray(u_t),
                lam_c.copy(),
                np.ascontiguousarray(u_c),
                np.ascontiguousarray(g_xx.matrix),
                np.ascontiguousarray(g_tx.matrix),
                ax_diag,
            )
            self._kernel = kernels["bdg"]
            self._kernel_grad = kernels["bdg_grad"]

    @property
    def has_gradient(self) -> bool:
        return not self.uses_momentum

    def energy_grad_values(
        self, variant: Variant, values: np.ndarray
    ) -> tuple[float, np.ndarray]:
        """Energy and gradient w.r.t. the variant's own parameter rows.

        Constrained variants chain the free-form gradient back through the
        commutator-angle substitutions.
        """
        if not self.has_gradient:
            raise NotImplementedError("momentum kernel has no gradient path")
        free = variant.free_form
        rows = np.ascontiguousarray(values, dtype=float)
        if rows.ndim != 2 or rows.shape[1] != params_per_step(variant):
            raise ValueError("parameter rows do not match the variant")
        expanded = _expand_rows(variant, rows) if variant.is_constrained else rows
        vid = _VARIANT_ID[free]
        p0, a_t, lam_t, u_t, lam_c, u_c, g_xx, g_tx, ax_diag = self._fixed
        energy, grad = self._kernel_grad(
            vid,
            np.ascontiguousarray(expanded),
            p0,
            a_t,
            self._offset,
            u_t,
            lam_t,
            u_c,
            lam_c,
            g_xx,
            g_tx,
            ax_diag,
        )
        if variant.is_constrained:
            gamma = rows[:, 0]
            beta = rows[:, 1]
            d_gamma = grad[:, 0] - 0.5 * beta * grad[:, 2]
            d_beta = grad[:, 1] - 0.5 * gamma * grad[:, 2]
            if free is Variant.QAOA_2CD:
                d_gamma += (beta**2 / 6.0) * grad[:, 3] + (2.0 * beta * gamma / 3.0) * grad[:, 4]
                d_beta += (beta * gamma / 3.0) * grad[:, 3] + (gamma**2 / 3.0) * grad[:, 4]
            grad = np.column_stack((d_gamma, d_beta))
        return float(energy), grad

    def energy_grad_flat(
        self, variant: Variant, p: int, flat: np.ndarray
    ) -> tuple[float, np.ndarray]:
        m = params_per_step(variant)
        e, g = self.energy_grad_values(
            variant, np.asarray(flat, dtype=float).reshape(p, m)
        )
        return e, g.ravel()

    def energy_values(self, variant: Variant, values: np.ndarray) -> float:
        """Energy for free-form or constrained parameter rows of one variant."""
        free = variant.free_form
        if variant.is_constrained:
            values = _expand_rows(variant, values)
        vid = _VARIANT_ID[free]
        params = np.ascontiguousarray(values, dtype=float)
        if params.ndim != 2 or params.shape[1] != params_per_step(free):
            raise ValueError("parameter rows do not match the variant")
        if self.uses_momentum:
            b_t, b_cd, b_xx, b_tx = self._blocks
            return float(self._kernel(vid, params, b_t, b_cd, b_xx, b_tx, self._offset))
        p0, a_t, lam_t, u_t, lam_c, u_c, g_xx, g_tx, ax_diag = self._fixed
        return float(
            self._kernel(
                vid, params, p0, a_t, self._offset, u_t, lam_t, u_c, lam_c, g_xx, g_tx, ax_diag
            )
        )

    def energy(self, schedule: AngleSchedule) -> float:
        return self.energy_values(schedule.variant, schedule.values)

    def energy_flat(self, variant: Variant, p: int, flat: np.ndarray) -> float:
        m = params_per_step(variant)
        return self.energy_values(variant, np.asarray(flat, dtype=float).reshape(p, m))

    def residual(self, energy: float) -> float:
        width = self.bounds.width
        return max(0.0, (energy - self.bounds.e_min) / width)


def _expand_rows(variant: Variant, values: np.ndarray) -> np.ndarray:
    gamma = values[:, 0]
    beta = values[:, 1]
    alpha = -beta * gamma / 2.0
    if variant is Variant.QAOA_CD_2P:
        return np.column_stack((gamma, beta, alpha))
    return np.column_stack(
        (gamma, beta, alpha, beta**2 * gamma / 6.0, beta * gamma**2 / 3.0)
    )


@functools.lru_cache(maxsize=256)
def engine_for(spec: ChainSpec, backend: str | None = None) -> CircuitEngine:
    return CircuitEngine(spec, backend=backend)


def run_circuit(spec: ChainSpec, schedule: AngleSchedule) -> float:
    """Energy <H_T> of the full variational circuit.

    Per step k: U_2CD(delta_k, zeta_k) and U_CD(alpha_k) when present, then
    the target unitary exp(-i*gamma_k*H_T), then the mixer
    exp(-i*beta_k*H_X); constrained variants run their free forms with the
    slaved angles.
    """
    return engine_for(spec).energy(schedule)
