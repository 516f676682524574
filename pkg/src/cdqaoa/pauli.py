"""Symbolic Pauli-string algebra with exact phase tracking.

Operators are weighted sums of Hermitian Pauli strings over n qubits.  A
string is keyed by a pair of bit masks (x, z); the pair stands for the
product i^{popcount(x & z)} X^x Z^z, which is the tensor product of I, X,
Y, Z letters (Y = iXZ wherever both masks are set).  In this normalization
every stored string is Hermitian, so an operator is Hermitian exactly when
all its coefficients are real.

Site j (0-based) maps to bit j; the computational basis state |b> assigns
Z eigenvalue (-1)^{b_j} to site j.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse

from .model import ChainSpec

__all__ = [
    "PauliOperator",
    "sigma_x",
    "sigma_y",
    "sigma_z",
    "mixer_operator",
    "target_operator",
]

_PRUNE_TOL = 1e-14

_I4 = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


class PauliOperator:
    """Weighted sum of Pauli strings on ``n_sites`` qubits."""

    __slots__ = ("n_sites", "terms")

    def __init__(self, n_sites: int, terms: dict[tuple[int, int], complex] | None = None):
        if n_sites < 1:
            raise ValueError("operator needs at least one site")
        self.n_sites = n_sites
        self.terms: dict[tuple[int, int], complex] = dict(terms) if terms else {}

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    def copy(self) -> "PauliOperator":
        return PauliOperator(self.n_sites, self.terms)

    def _check_sites(self, other: "PauliOperator") -> None:
        if self.n_sites != other.n_sites:
            raise ValueError("operators act on different site counts")

    def __add__(self, other: "PauliOperator") -> "PauliOperator":
        self._check_sites(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0.0) + c
        return PauliOperator(self.n_sites, out).prune()

    def __sub__(self, other: "PauliOperator") -> "PauliOperator":
        return self + (-1.0) * other

    def __neg__(self) -> "PauliOperator":
        return (-1.0) * self

    def __rmul__(self, scalar: complex) -> "PauliOperator":
        return PauliOperator(
            self.n_sites, {k: scalar * c for k, c in self.terms.items()}
        )

    def __mul__(self, other):
        if isinstance(other, PauliOperator):
            return self._product(other)
        return other * self

    def _product(self, other: "PauliOperator") -> "PauliOperator":
        """Operator product via the symplectic composition rule.

        For strings P_a = i^{y_a} X^{x_a} Z^{z_a} (y_a = popcount(x_a & z_a))
        the product is i^{y_1 + y_2 - y_3 mod 4} (-1)^{popcount(z_1 & x_2)}
        times the string keyed by (x_1^x_2, z_1^z_2).
        """
        self._check_sites(other)
        out: dict[tuple[int, int], complex] = {}
        for (x1, z1), c1 in self.terms.items():
            y1 = (x1 & z1).bit_count()
            for (x2, z2), c2 in other.terms.items():
                x3 = x1 ^ x2
                z3 = z1 ^ z2
                y3 = (x3 & z3).bit_count()
                k = (y1 + (x2 & z2).bit_count() - y3) % 4
                coeff = c1 * c2 * _I4[k]
                if (z1 & x2).bit_count() & 1:
                    coeff = -coeff
                key = (x3, z3)
                out[key] = out.get(key, 0.0) + coeff
        return PauliOperator(self.n_sites, out).prune()

    def commutator(self, other: "PauliOperator") -> "PauliOperator":
        return self._product(other) - other._product(self)

    def dagger(self) -> "PauliOperator":
        return PauliOperator(
            self.n_sites, {k: c.conjugate() for k, c in self.terms.items()}
        )

    def prune(self, tol: float = _PRUNE_TOL) -> "PauliOperator":
        self.terms = {k: c for k, c in self.terms.items() if abs(c) > tol}
        return self

    def hermiticity_defect(self) -> float:
        """Max |imaginary part| over coefficients; 0 for Hermitian operators."""
        if not self.terms:
            return 0.0
        return max(abs(c.imag) for c in self.terms.values())

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return self.hermiticity_defect() <= tol

    def one_norm(self) -> float:
        return sum(abs(c) for c in self.terms.values())

    def apply(self, vec: np.ndarray) -> np.ndarray:
        """Matrix-vector product on a 2^n state vector."""
        dim = 1 << self.n_sites
        if vec.shape != (dim,):
            raise ValueError(f"state must have length {dim}")
        basis = np.arange(dim, dtype=np.uint64)
        out = np.zeros(dim, dtype=complex)
        for (x, z), c in self.terms.items():
            phase = c * _I4[(x & z).bit_count() % 4]
            signs = 1.0 - 2.0 * (
                np.bitwise_count(basis & np.uint64(z)).astype(np.int64) & 1
            )
            out[basis ^ np.uint64(x)] += phase * signs * vec
        return out

    def to_sparse(self) -> sparse.csr_matrix:
        """CSR matrix of the operator (duplicate entries summed)."""
        dim = 1 << self.n_sites
        basis = np.arange(dim, dtype=np.uint64)
        rows = []
        cols = []
        data = []
        for (x, z), c in self.terms.items():
            phase = c * _I4[(x & z).bit_count() % 4]
            signs = 1.0 - 2.0 * (
                np.bitwise_count(basis & np.uint64(z)).astype(np.int64) & 1
            )
            rows.append((basis ^ np.uint64(x)).astype(np.int64))
            cols.append(basis.astype(np.int64))
            data.append(phase * signs)
        if not rows:
            return sparse.csr_matrix((dim, dim), dtype=complex)
        return sparse.csr_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
            shape=(dim, dim),
        )

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()


def _single(n: int, j: int, x: int, z: int) -> PauliOperator:
    if not 0 <= j < n:
        raise ValueError(f"site {j} out of range for {n} sites")
    return PauliOperator(n, {(x << j, z << j): 1.0 + 0.0j})


def sigma_x(n: int, j: int) -> PauliOperator:
    return _single(n, j, 1, 0)


def sigma_y(n: int, j: int) -> PauliOperator:
    return _single(n, j, 1, 1)


def sigma_z(n: int, j: int) -> PauliOperator:
    return _single(n, j, 0, 1)


def mixer_operator(spec: ChainSpec) -> PauliOperator:
    """Transverse mixer sum_j X_j."""
    n = spec.n_sites
    return PauliOperator(n, {(1 << j, 0): 1.0 + 0.0j for j in range(n)})


def target_operator(spec: ChainSpec) -> PauliOperator:
    """Ising target sum over bonds of J_ij Z_i Z_j."""
    n = spec.n_sites
    terms: dict[tuple[int, int], complex] = {}
    for i, j, coupling in spec.bonds():
        key = (0, (1 << i) | (1 << j))
        terms[key] = terms.get(key, 0.0) + coupling
    return PauliOperator(n, terms).prune()
