"""
Tests for completely positive kernels and their Kolmogorov factorization.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.nevanlinna.cpkernel import (
    CPKernel,
    apply,
    apply_one_minus_EE,
    block_weights,
    cp_cauchy_schwarz_check,
    kernel_from_dict,
    kernel_to_dict,
    kolmogorov_decompose,
    random_cp_kernel,
)
from src.nevanlinna.exceptions import DimensionError, InfeasibleKernelError, ProblemFormatError
from src.nevanlinna.numerics import make_rng

seeds = st.integers(min_value=0, max_value=10_000)


class TestCPKernel:
    """Test cases for the kernel container and its action."""

    def test_shape_checked(self) -> None:
        """Test components must be (K, n*d, n*d)."""
        with pytest.raises(DimensionError):
            CPKernel(n=2, d=2, components=np.zeros((1, 3, 3), dtype=np.complex128))

    def test_block_and_apply(self) -> None:
        """Test Gamma(z_i, z_j)(delta) sums the weighted blocks."""
        kernel = random_cp_kernel(make_rng(0), n=2, d=2, K=2)
        delta = np.array([0.5, -1.0j])
        expected = 0.5 * kernel.block(0, 1, 0) - 1.0j * kernel.block(1, 1, 0)
        np.testing.assert_allclose(apply(kernel, 1, 0, delta), expected)

    @given(seeds)
    @settings(max_examples=20, deadline=None)
    def test_apply_adjoint(self, seed: int) -> None:
        """Test Gamma(z_i, z_j)(delta)* = Gamma(z_j, z_i)(conj delta)."""
        rng = make_rng(seed)
        kernel = random_cp_kernel(rng, n=3, d=2, K=3)
        delta = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        i, j = (int(x) for x in rng.integers(0, 3, size=2))
        np.testing.assert_allclose(
            apply(kernel, i, j, delta).conj().T, apply(kernel, j, i, delta.conj()), atol=1e-12
        )

    def test_apply_wrong_delta(self) -> None:
        """Test delta must have one entry per component."""
        kernel = random_cp_kernel(make_rng(0), n=1, d=1, K=2)
        with pytest.raises(DimensionError):
            apply(kernel, 0, 0, [1.0])

    def test_block_weights_disc(self) -> None:
        """Test the weights are 1 - psi(z_i) conj psi(z_j) expanded to blocks."""
        E = np.array([[0.0], [0.5]])
        weights = block_weights(E, 2)
        assert weights.shape == (1, 4, 4)
        np.testing.assert_allclose(weights[0, 2:, 2:], 0.75 * np.ones((2, 2)))
        np.testing.assert_allclose(weights[0, :2, 2:], np.ones((2, 2)))

    def test_apply_one_minus_EE(self) -> None:
        """Test the block matrix matches apply at delta = 1 - E(z_i) E(z_j)*."""
        kernel = random_cp_kernel(make_rng(1), n=2, d=1, K=2)
        E = np.array([[0.1, 0.2j], [-0.3, 0.4]])
        full = apply_one_minus_EE(kernel, E)
        for i in range(2):
            for j in range(2):
                delta = 1 - E[i] * E[j].conj()
                np.testing.assert_allclose(full[i, j], apply(kernel, i, j, delta)[0, 0])


class TestKolmogorov:
    """Test cases for the Kolmogorov factorization."""

    @given(seeds)
    @settings(max_examples=30, deadline=None)
    def test_round_trip(self, seed: int) -> None:
        """Test factorize-then-reconstruct recovers every component."""
        kernel = random_cp_kernel(make_rng(seed), n=3, d=2, K=2, rank=3)
        factorization = kolmogorov_decompose(kernel)
        assert factorization.reconstruction_error <= 1e-9
        assert factorization.block_dims == (3, 3)
        scale = np.max(np.abs(kernel.components))
        error = np.max(np.abs(factorization.reconstruct() - kernel.components))
        assert error <= 1e-9 * scale

    def test_factor_blocks(self) -> None:
        """Test Gamma(z_i, z_j)(delta) = h(z_i) mu(delta) h(z_j)*."""
        kernel = random_cp_kernel(make_rng(7), n=2, d=2, K=2)
        factorization = kolmogorov_decompose(kernel)
        delta = np.array([0.3, 0.7j])
        lhs = apply(kernel, 0, 1, delta)
        rhs = factorization.h[0] @ factorization.mu(delta) @ factorization.h[1].conj().T
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)
        h_k = factorization.component_factor(1, 0)
        assert h_k.shape == (2, factorization.block_dims[1])

    def test_indefinite_component(self) -> None:
        """Test a component with a negative eigenvalue is rejected."""
        components = np.array([np.diag([1.0, -0.1])], dtype=np.complex128)
        with pytest.raises(InfeasibleKernelError):
            kolmogorov_decompose(CPKernel(n=2, d=1, components=components))

    def test_tiny_negative_part_clipped(self) -> None:
        """Test eigenvalues just below zero are clipped, not rejected."""
        components = np.array([np.diag([1.0, -1e-12])], dtype=np.complex128)
        factorization = kolmogorov_decompose(CPKernel(n=2, d=1, components=components))
        assert factorization.block_dims == (1,)


class TestCauchySchwarz:
    """Test cases for the sampled Cauchy-Schwarz check."""

    @given(seeds)
    @settings(max_examples=20, deadline=None)
    def test_no_violation(self, seed: int) -> None:
        """Test CP kernels satisfy the inequality on random samples."""
        kernel = random_cp_kernel(make_rng(seed), n=3, d=2, K=2)
        report = cp_cauchy_schwarz_check(kernel, trials=100, seed=seed)
        assert report.trials == 100
        assert report.max_violation <= 1e-10

    def test_violation_is_absolute(self) -> None:
        """Test an indefinite kernel's excess scales with the square of the kernel."""
        components = np.array([[[1.0, 2.0], [2.0, 1.0]]], dtype=np.complex128)
        base = cp_cauchy_schwarz_check(CPKernel(n=2, d=1, components=components), 50, 3)
        scaled = cp_cauchy_schwarz_check(CPKernel(n=2, d=1, components=10 * components), 50, 3)
        assert base.max_violation > 0
        assert scaled.max_violation == pytest.approx(100 * base.max_violation, rel=1e-9)


class TestSerialization:
    """Test cases for kernel dictionaries."""

    def test_malformed(self) -> None:
        """Test a kernel entry without components is rejected."""
        with pytest.raises(ProblemFormatError):
            kernel_from_dict({"n": 1, "d": 1})

    def test_preserves_values(self) -> None:
        """Test the components come back exactly."""
        kernel = random_cp_kernel(make_rng(2), n=2, d=1, K=2)
        rebuilt = kernel_from_dict(kernel_to_dict(kernel))
        np.testing.assert_array_equal(rebuilt.components, kernel.components)
