"""
Tests for the dense linear algebra helpers.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.nevanlinna.exceptions import DimensionError, GramMismatchError, NotPSDError
from src.nevanlinna.numerics import (
    adjoint,
    complex_gaussian,
    gram_matched_unitary,
    haar_unitary,
    hermitian_eig,
    make_rng,
    min_eigenvalue,
    operator_norm,
    orthonormal_basis,
    orthonormal_complement,
    project_psd,
    psd_factor,
    unitarity_defect,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


class TestHermitianEig:
    """Test cases for the Hermitian eigensolver wrapper."""

    def test_eigenvalues_descending(self) -> None:
        """Test eigenvalues come back in non-increasing order."""
        eig = hermitian_eig(np.diag([1.0, 3.0, -2.0]))
        np.testing.assert_allclose(eig.eigenvalues, [3.0, 1.0, -2.0])

    def test_reconstruction(self) -> None:
        """Test V diag(w) V* reproduces the input."""
        G = complex_gaussian(make_rng(1), 5, 5)
        H = G + adjoint(G)
        eig = hermitian_eig(H)
        rebuilt = (eig.eigenvectors * eig.eigenvalues) @ adjoint(eig.eigenvectors)
        np.testing.assert_allclose(rebuilt, H, atol=1e-10)

    def test_empty_matrix(self) -> None:
        """Test the 0 x 0 matrix has no eigenvalues."""
        eig = hermitian_eig(np.zeros((0, 0)))
        assert eig.eigenvalues.size == 0
        assert min_eigenvalue(np.zeros((0, 0))) == float("inf")

    def test_rejects_non_square(self) -> None:
        """Test a rectangular matrix is rejected."""
        with pytest.raises(DimensionError):
            hermitian_eig(np.zeros((2, 3)))


class TestProjectPSD:
    """Test cases for the PSD cone projection."""

    def test_swap_matrix(self) -> None:
        """Test the projection of [[0, 1], [1, 0]] is half the all-ones matrix."""
        projected = project_psd(np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(projected, 0.5 * np.ones((2, 2)), atol=1e-14)

    def test_psd_input_unchanged(self) -> None:
        """Test a PSD matrix is a fixed point."""
        G = complex_gaussian(make_rng(2), 4, 2)
        H = G @ adjoint(G)
        np.testing.assert_allclose(project_psd(H), H, atol=1e-12)

    @given(seeds)
    @settings(max_examples=25, deadline=None)
    def test_result_is_psd(self, seed: int) -> None:
        """Test the projection of any Hermitian matrix is PSD."""
        G = complex_gaussian(make_rng(seed), 4, 4)
        assert min_eigenvalue(project_psd(G + adjoint(G))) >= -1e-12

    @given(seeds)
    @settings(max_examples=25, deadline=None)
    def test_idempotent(self, seed: int) -> None:
        """Test projecting twice gives the first projection."""
        G = complex_gaussian(make_rng(seed), 5, 5)
        once = project_psd(G + adjoint(G))
        np.testing.assert_allclose(project_psd(once), once, atol=1e-12)


class TestPSDFactor:
    """Test cases for rank-revealing PSD factorization."""

    def test_rank_one(self) -> None:
        """Test a rank-one matrix yields a single column."""
        v = np.array([[1.0], [1j], [2.0]])
        H = v @ adjoint(v)
        F = psd_factor(H)
        assert F.shape == (3, 1)
        np.testing.assert_allclose(F @ adjoint(F), H, atol=1e-12)

    def test_negative_eigenvalue_rejected(self) -> None:
        """Test an indefinite matrix raises NotPSDError with its eigenvalue."""
        with pytest.raises(NotPSDError) as excinfo:
            psd_factor(np.diag([1.0, -0.5]))
        assert excinfo.value.min_eigenvalue == pytest.approx(-0.5)

    def test_zero_matrix(self) -> None:
        """Test the zero matrix has rank zero."""
        assert psd_factor(np.zeros((3, 3))).shape == (3, 0)


class TestBases:
    """Test cases for orthonormal bases and complements."""

    def test_dependent_generators(self) -> None:
        """Test parallel generators span one dimension."""
        basis = orthonormal_basis([[1.0, 0.0], [2.0, 0.0]])
        assert basis.shape == (2, 1)
        assert abs(abs(basis[0, 0]) - 1) < 1e-12

    def test_complement(self) -> None:
        """Test the complement is orthonormal and orthogonal to the basis."""
        basis = orthonormal_basis(complex_gaussian(make_rng(3), 5, 2))
        complement = orthonormal_complement(basis, 5)
        assert complement.shape == (5, 3)
        np.testing.assert_allclose(adjoint(complement) @ complement, np.eye(3), atol=1e-12)
        np.testing.assert_allclose(adjoint(basis) @ complement, 0, atol=1e-12)

    def test_trivial_complements(self) -> None:
        """Test the complement of nothing is everything and vice versa."""
        assert orthonormal_complement(np.zeros((3, 0)), 3).shape == (3, 3)
        assert orthonormal_complement(np.eye(3, dtype=np.complex128), 3).shape == (3, 0)


class TestGramMatchedUnitary:
    """Test cases for the Gram-matched unitary."""

    @given(seeds)
    @settings(max_examples=25, deadline=None)
    def test_recovers_unitary_image(self, seed: int) -> None:
        """Test V maps each x_j onto y_j = W x_j for a unitary W."""
        rng = make_rng(seed)
        X = complex_gaussian(rng, 5, 3)
        W = haar_unitary(rng, 5)
        Y = W @ X
        match = gram_matched_unitary(X, Y)
        V_full = match.basis_range @ match.V @ adjoint(match.basis_domain)
        np.testing.assert_allclose(V_full @ X, Y, atol=1e-9)
        assert unitarity_defect(match.V) < 1e-12

    def test_different_ambient_dimensions(self) -> None:
        """Test the families may live in spaces of different dimension."""
        X = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
        Y = np.array([[0.0, 1.0], [1.0, 0.0]])
        match = gram_matched_unitary(X, Y)
        V_full = match.basis_range @ match.V @ adjoint(match.basis_domain)
        np.testing.assert_allclose(V_full @ X, Y, atol=1e-12)

    def test_mismatch_rejected(self) -> None:
        """Test scaled generators do not have a matching Gram matrix."""
        X = complex_gaussian(make_rng(4), 4, 2)
        with pytest.raises(GramMismatchError):
            gram_matched_unitary(X, 2 * X)

    def test_length_mismatch(self) -> None:
        """Test families of different length are rejected."""
        with pytest.raises(DimensionError):
            gram_matched_unitary(np.eye(3), np.eye(3)[:, :2])


class TestRandomness:
    """Test cases for the seeded generators."""

    def test_haar_unitary(self) -> None:
        """Test Haar samples are unitary and reproducible."""
        U = haar_unitary(make_rng(5), 6)
        assert unitarity_defect(U) < 1e-12
        np.testing.assert_array_equal(U, haar_unitary(make_rng(5), 6))

    def test_seeds_differ(self) -> None:
        """Test different seeds give different streams."""
        a = complex_gaussian(make_rng(1), 2, 2)
        b = complex_gaussian(make_rng(2), 2, 2)
        assert not np.allclose(a, b)

    def test_operator_norm(self) -> None:
        """Test the operator norm is the largest singular value."""
        assert operator_norm(np.diag([3.0, -4.0])) == pytest.approx(4.0)
        assert operator_norm(np.zeros((0, 2))) == 0.0

    @given(seeds)
    @settings(max_examples=25, deadline=None)
    def test_operator_norm_unitary_invariant(self, seed: int) -> None:
        """Test ||U X V|| = ||X|| for unitary U and V."""
        rng = make_rng(seed)
        X = complex_gaussian(rng, 4, 3)
        U = haar_unitary(rng, 4)
        V = haar_unitary(rng, 3)
        assert operator_norm(U @ X @ V) == pytest.approx(operator_norm(X), rel=1e-12)
