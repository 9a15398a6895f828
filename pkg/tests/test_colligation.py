"""
Tests for unitary colligations and their transfer functions.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.nevanlinna.agler_solver import residual
from src.nevanlinna.colligation import (
    Colligation,
    colligation_from_dict,
    colligation_to_dict,
    random_colligation,
    random_instance,
    realization_kernel,
    rho_eval,
    transfer_eval,
    transfer_eval_adjoint,
)
from src.nevanlinna.exceptions import DimensionError, DomainError, ProblemFormatError
from src.nevanlinna.numerics import adjoint, make_rng, min_eigenvalue, operator_norm
from src.nevanlinna.testfam import evaluate_family, make_builtin, sample_interior

seeds = st.integers(min_value=0, max_value=10_000)


class TestColligation:
    """Test cases for the colligation container."""

    def test_blocks(self) -> None:
        """Test A, B, C, D partition U along the state space."""
        c = random_colligation(make_builtin("bidisc"), 2, 2, [1, 2], make_rng(0))
        assert c.state_dim == 3
        assert (c.d_in, c.d_out) == (2, 2)
        np.testing.assert_array_equal(c.A, c.U[:3, :3])
        np.testing.assert_array_equal(c.D, c.U[3:, 3:])
        assert c.B.shape == (3, 2)
        assert c.C.shape == (2, 3)

    def test_rejects_non_unitary(self) -> None:
        """Test a scaled unitary is not a colligation."""
        with pytest.raises(DimensionError):
            Colligation(state_block_dims=(1,), U=2 * np.eye(2, dtype=np.complex128))

    def test_rho(self) -> None:
        """Test rho repeats each entry over its state block."""
        c = random_colligation(make_builtin("bidisc"), 1, 1, [2, 1], make_rng(1))
        np.testing.assert_allclose(np.diag(rho_eval(c, [0.1, 0.2j])), [0.1, 0.1, 0.2j])

    @given(seeds)
    @settings(max_examples=20, deadline=None)
    def test_rho_star_homomorphism(self, seed: int) -> None:
        """Test rho respects products and conjugation of delta."""
        rng = make_rng(seed)
        c = random_colligation(make_builtin("bidisc"), 1, 1, [2, 3], rng)
        delta = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        other = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        np.testing.assert_allclose(
            rho_eval(c, delta * other), rho_eval(c, delta) @ rho_eval(c, other), atol=1e-12
        )
        np.testing.assert_allclose(rho_eval(c, delta.conj()), adjoint(rho_eval(c, delta)))

    def test_wrong_block_count(self) -> None:
        """Test one state dimension is needed per test function."""
        with pytest.raises(DimensionError):
            random_colligation(make_builtin("bidisc"), 1, 1, [1], make_rng(0))


class TestTransferFunction:
    """Test cases for transfer function evaluation."""

    def test_swap_realizes_identity(self) -> None:
        """Test U = [[0, 1], [1, 0]] on the disc realizes f(z) = z."""
        c = Colligation(state_block_dims=(1,), U=np.array([[0, 1], [1, 0]], dtype=np.complex128))
        assert transfer_eval(c, [0.3 - 0.4j])[0, 0] == pytest.approx(0.3 - 0.4j)
        assert transfer_eval_adjoint(c, [0.5])[0, 0] == pytest.approx(0.5)

    @given(seeds)
    @settings(max_examples=20, deadline=None)
    def test_contractive(self, seed: int) -> None:
        """Test the transfer function is a contraction at interior points."""
        family = make_builtin("bidisc")
        c = random_colligation(family, 2, 2, [2, 1], make_rng(seed))
        for z in sample_interior(family, 30, seed):
            assert operator_norm(transfer_eval(c, evaluate_family(family, z))) <= 1 + 1e-10

    def test_adjoint_form(self) -> None:
        """Test the adjoint formula is the conjugate transpose."""
        family = make_builtin("bidisc")
        c = random_colligation(family, 2, 3, [1, 2], make_rng(4))
        E = np.array([0.3 - 0.2j, -0.5j])
        np.testing.assert_allclose(
            transfer_eval_adjoint(c, E), adjoint(transfer_eval(c, E)), atol=1e-12
        )

    def test_rectangular(self) -> None:
        """Test isometric colligations give rectangular contractive values."""
        family = make_builtin("disc")
        c = random_colligation(family, 1, 3, [2], make_rng(5))
        value = transfer_eval(c, [0.4j])
        assert value.shape == (3, 1)
        assert operator_norm(value) <= 1 + 1e-10

    def test_no_state(self) -> None:
        """Test a colligation without state returns D."""
        c = random_colligation(make_builtin("bidisc"), 2, 2, [0, 0], make_rng(6))
        np.testing.assert_array_equal(transfer_eval(c, [0.9, 0.9]), c.D)

    def test_boundary_rejected(self) -> None:
        """Test evaluation at |E_k| = 1 raises DomainError."""
        c = random_colligation(make_builtin("bidisc"), 1, 1, [1, 1], make_rng(7))
        with pytest.raises(DomainError):
            transfer_eval(c, [1.0, 0.0])


class TestRandomInstance:
    """Test cases for generated interpolation data."""

    def test_targets_match_colligation(self) -> None:
        """Test every target is the transfer function at its point."""
        family = make_builtin("bidisc")
        problem, c = random_instance(family, n=3, d=2, state_dims=[1, 1], seed=11)
        assert problem.n == 3
        for z, target in zip(problem.points, problem.targets):
            np.testing.assert_allclose(transfer_eval(c, evaluate_family(family, z)), target)

    def test_reproducible(self) -> None:
        """Test the same seed gives the same instance."""
        family = make_builtin("bidisc")
        a, _ = random_instance(family, n=2, d=1, state_dims=[1, 1], seed=5)
        b, _ = random_instance(family, n=2, d=1, state_dims=[1, 1], seed=5)
        np.testing.assert_array_equal(a.targets, b.targets)

    def test_given_points(self) -> None:
        """Test explicit points are used as given."""
        family = make_builtin("disc")
        points = [np.array([0.1]), np.array([0.2j])]
        problem, _ = random_instance(family, n=2, d=1, state_dims=[1], seed=0, points=points)
        np.testing.assert_array_equal(problem.points[1], points[1])

    @given(seeds)
    @settings(max_examples=15, deadline=None)
    def test_realization_kernel_solves_identity(self, seed: int) -> None:
        """Test the colligation's own kernel is an exact PSD decomposition."""
        family = make_builtin("bidisc")
        problem, c = random_instance(family, n=3, d=2, state_dims=[2, 1], seed=seed)
        kernel = realization_kernel(c, problem)
        assert kernel.size == 2
        assert residual(problem, kernel) <= 1e-10
        for component in kernel.components:
            assert min_eigenvalue(component) >= -1e-12

    def test_realization_kernel_shape_checked(self) -> None:
        """Test a colligation over another family is rejected."""
        problem, _ = random_instance(make_builtin("disc"), n=2, d=1, state_dims=[1], seed=0)
        c = random_colligation(make_builtin("bidisc"), 1, 1, [1, 1], make_rng(0))
        with pytest.raises(DimensionError):
            realization_kernel(c, problem)

    def test_realization_kernel_rejects_isometry(self) -> None:
        """Test a tall isometric colligation has no realization kernel."""
        problem, _ = random_instance(make_builtin("disc"), n=2, d=1, state_dims=[1], seed=0)
        c = random_colligation(make_builtin("disc"), 1, 3, [2], make_rng(1))
        with pytest.raises(DimensionError):
            realization_kernel(c, problem)

    def test_bad_sizes(self) -> None:
        """Test n and d must be positive."""
        with pytest.raises(DimensionError):
            random_instance(make_builtin("disc"), n=0, d=1, state_dims=[1], seed=0)


class TestSerialization:
    """Test cases for colligation dictionaries."""

    def test_preserves_operator(self) -> None:
        """Test the operator and block dims survive serialization."""
        c = random_colligation(make_builtin("bidisc"), 2, 2, [1, 2], make_rng(8))
        rebuilt = colligation_from_dict(colligation_to_dict(c))
        assert rebuilt.state_block_dims == (1, 2)
        np.testing.assert_array_equal(rebuilt.U, c.U)

    def test_malformed(self) -> None:
        """Test a colligation entry without U is rejected."""
        with pytest.raises(ProblemFormatError):
            colligation_from_dict({"state_block_dims": [1]})
