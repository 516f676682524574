"""Symbolic Pauli algebra against explicit 2^n matrices."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdqaoa.model import make_open_random, make_ring_uniform
from cdqaoa.pauli import (
    PauliOperator,
    mixer_operator,
    sigma_x,
    sigma_y,
    sigma_z,
    target_operator,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def kron_site(n: int, j: int, mat: np.ndarray) -> np.ndarray:
    """Single-site operator embedded with site 0 as the least significant bit."""
    out = np.eye(1, dtype=complex)
    for k in range(n):
        factor = mat if k == j else np.eye(2)
        out = np.kron(factor, out)
    return out


def random_operator(n: int, rng: np.random.Generator, n_terms: int = 4) -> PauliOperator:
    op = PauliOperator(n)
    singles = (sigma_x, sigma_y, sigma_z)
    for _ in range(n_terms):
        term = singles[rng.integers(3)](n, int(rng.integers(n)))
        for _ in range(int(rng.integers(0, 3))):
            term = term * singles[rng.integers(3)](n, int(rng.integers(n)))
        op = op + float(rng.normal()) * term
    return op


class TestSingles:
    @pytest.mark.parametrize("j", [0, 1, 2])
    def test_single_site_matrices(self, j):
        n = 3
        np.testing.assert_allclose(sigma_x(n, j).to_dense(), kron_site(n, j, SX))
        np.testing.assert_allclose(sigma_y(n, j).to_dense(), kron_site(n, j, SY))
        np.testing.assert_allclose(sigma_z(n, j).to_dense(), kron_site(n, j, SZ))

    def test_pauli_products_on_one_site(self):
        n = 1
        x, y, z = sigma_x(n, 0), sigma_y(n, 0), sigma_z(n, 0)
        np.testing.assert_allclose((x * y).to_dense(), 1j * z.to_dense())
        np.testing.assert_allclose((y * x).to_dense(), -1j * z.to_dense())
        np.testing.assert_allclose((x * x).to_dense(), np.eye(2))
        np.testing.assert_allclose((z * x).to_dense(), 1j * y.to_dense())

    def test_y_is_hermitian_normalization(self):
        y = sigma_y(2, 1)
        assert y.is_hermitian()
        assert y.hermiticity_defect() == 0.0


class TestAlgebra:
    def test_product_matches_dense(self, rng):
        n = 4
        for _ in range(10):
            a = random_operator(n, rng)
            b = random_operator(n, rng)
            np.testing.assert_allclose(
                (a * b).to_dense(), a.to_dense() @ b.to_dense(), atol=1e-12
            )

    def test_commutator_matches_dense(self, rng):
        n = 4
        for _ in range(10):
            a = random_operator(n, rng)
            b = random_operator(n, rng)
            da, db = a.to_dense(), b.to_dense()
            np.testing.assert_allclose(
                a.commutator(b).to_dense(), da @ db - db @ da, atol=1e-12
            )

    def test_commutator_antisymmetric(self, rng):
        a = random_operator(3, rng)
        b = random_operator(3, rng)
        lhs = a.commutator(b)
        rhs = -1.0 * b.commutator(a)
        np.testing.assert_allclose(lhs.to_dense(), rhs.to_dense(), atol=1e-12)

    def test_scalar_and_sub(self, rng):
        a = random_operator(3, rng)
        np.testing.assert_allclose((2.5 * a).to_dense(), 2.5 * a.to_dense())
        np.testing.assert_allclose((a - a).to_dense(), np.zeros((8, 8)), atol=1e-15)

    def test_prune_drops_cancelled_terms(self):
        a = sigma_x(2, 0) + sigma_z(2, 1)
        b = a - sigma_z(2, 1)
        assert b.prune().n_terms == 1

    def test_dagger_conjugates_coefficients(self):
        op = (0.5 + 0.25j) * sigma_x(2, 0)
        np.testing.assert_allclose(op.dagger().to_dense(), op.to_dense().conj().T)
        assert not op.is_hermitian()

    def test_one_norm(self):
        op = 3.0 * sigma_x(2, 0) - 4.0 * sigma_z(2, 1)
        assert op.one_norm() == pytest.approx(7.0)

    def test_site_count_mismatch(self):
        with pytest.raises(ValueError, match="site counts"):
            sigma_x(2, 0) + sigma_x(3, 0)

    def test_apply_matches_dense(self, rng):
        op = random_operator(4, rng)
        vec = rng.normal(size=16) + 1j * rng.normal(size=16)
        np.testing.assert_allclose(op.apply(vec), op.to_dense() @ vec, atol=1e-12)

    def test_sparse_matches_dense(self, rng):
        op = random_operator(4, rng)
        np.testing.assert_allclose(op.to_sparse().toarray(), op.to_dense(), atol=1e-14)


class TestHamiltonians:
    def test_mixer_is_sum_of_x(self):
        n = 5
        spec = make_open_random(n, seed=1)
        expect = sum(kron_site(n, j, SX) for j in range(n))
        np.testing.assert_allclose(mixer_operator(spec).to_dense(), expect)

    def test_target_ring(self):
        n = 4
        spec = make_ring_uniform(n)
        expect = sum(
            kron_site(n, a, SZ) @ kron_site(n, b, SZ) for a, b, _ in spec.bonds()
        )
        np.testing.assert_allclose(target_operator(spec).to_dense(), expect)

    def test_target_weights(self):
        spec = make_open_random(5, seed=9)
        dense = target_operator(spec).to_dense()
        diag = np.real(np.diag(dense))
        np.testing.assert_allclose(dense, np.diag(diag), atol=1e-15)
        bits = 1 - 2 * ((np.arange(32)[:, None] >> np.arange(5)) & 1)
        expect = sum(j * bits[:, a] * bits[:, b] for a, b, j in spec.bonds())
        np.testing.assert_allclose(diag, expect, atol=1e-14)
