"""
Tests for test functions and their families.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.nevanlinna.base import TestFunction
from src.nevanlinna.exceptions import DomainError, ProblemFormatError, UnsupportedError
from src.nevanlinna.functions import (
    CoordinateFunction,
    MobiusComposed,
    Monomial,
    RationalFunction,
    annulus_pair,
)
from src.nevanlinna.testfam import (
    DomainDescriptor,
    TestFunctionFamily,
    evaluate_family,
    family_from_dict,
    family_to_dict,
    make_builtin,
    point_in_domain,
    recenter,
    sample_interior,
)


def annulus_family(r: float = 0.5, sampler_radius: float = 0.999) -> TestFunctionFamily:
    return TestFunctionFamily(
        domain=DomainDescriptor(kind="custom", dimension=1, sampler_radius=sampler_radius),
        functions=annulus_pair(r),
    )


class TestBuiltins:
    """Test cases for the disc and bidisc families."""

    def test_disc(self) -> None:
        """Test the disc family is the identity function."""
        fam = make_builtin("disc")
        assert fam.size == 1
        assert fam.dimension == 1
        assert evaluate_family(fam, 0.3 + 0.1j)[0] == pytest.approx(0.3 + 0.1j)

    def test_bidisc(self) -> None:
        """Test the bidisc family returns both coordinates."""
        fam = make_builtin("bidisc")
        values = evaluate_family(fam, [0.1, 0.2j])
        np.testing.assert_allclose(values, [0.1, 0.2j])
        np.testing.assert_array_equal(fam.common_zero, [0, 0])

    def test_unknown(self) -> None:
        """Test an unknown built-in name is rejected."""
        with pytest.raises(ProblemFormatError):
            make_builtin("tridisc")

    def test_outside_point(self) -> None:
        """Test evaluation outside the domain raises DomainError."""
        with pytest.raises(DomainError):
            evaluate_family(make_builtin("bidisc"), [0.1, 1.0])

    def test_wrong_arity(self) -> None:
        """Test a point with the wrong number of coordinates is rejected."""
        with pytest.raises(ProblemFormatError):
            evaluate_family(make_builtin("bidisc"), [0.1])


class TestRationalFunctions:
    """Test cases for rational and annulus test functions."""

    def test_annulus_values(self) -> None:
        """Test the annulus pair evaluates to z and r/z."""
        fam = annulus_family(0.5)
        np.testing.assert_allclose(evaluate_family(fam, 0.8j), [0.8j, 0.5 / 0.8j])

    def test_annulus_membership(self) -> None:
        """Test points inside the hole or outside the disc are not interior."""
        fam = annulus_family(0.5)
        assert point_in_domain(fam, np.array([0.7]))
        assert not point_in_domain(fam, np.array([0.3]))
        assert not point_in_domain(fam, np.array([1.2]))

    def test_pole(self) -> None:
        """Test a pole of a rational function raises DomainError."""
        psi = RationalFunction(
            numerator=(Monomial((0,), 0.5),), denominator=(Monomial((1,), 1.0),)
        )
        with pytest.raises(DomainError):
            psi(np.array([0.0]))

    def test_annulus_radius(self) -> None:
        """Test the annulus radius must lie in (0, 1)."""
        with pytest.raises(ProblemFormatError):
            annulus_pair(1.5)

    def test_monomial_arity_checked(self) -> None:
        """Test monomials must match the domain dimension."""
        psi = RationalFunction(numerator=(Monomial((1, 1), 1.0),))
        with pytest.raises(ProblemFormatError):
            TestFunctionFamily(domain=DomainDescriptor("custom", 1), functions=(psi,))


class TestRecenter:
    """Test cases for recentering a family at a point."""

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=20, deadline=None)
    def test_vanishes_at_center(self, seed: int) -> None:
        """Test the recentered family vanishes at w0 and stays disc-valued."""
        fam = make_builtin("bidisc")
        w0 = sample_interior(fam, 1, seed, radius=0.9)[0]
        moved = recenter(fam, w0)
        assert np.max(np.abs(evaluate_family(moved, w0))) <= 1e-14
        np.testing.assert_array_equal(moved.common_zero, w0)
        for z in sample_interior(fam, 100, seed + 1):
            assert np.max(np.abs(evaluate_family(moved, z))) < 1

    def test_outside_center(self) -> None:
        """Test recentering at a boundary point is rejected."""
        with pytest.raises(DomainError):
            recenter(make_builtin("disc"), 1.0)


class TestSampling:
    """Test cases for interior sampling."""

    def test_deterministic(self) -> None:
        """Test the same seed gives the same points."""
        fam = make_builtin("bidisc")
        a = sample_interior(fam, 10, 42)
        b = sample_interior(fam, 10, 42)
        np.testing.assert_array_equal(np.array(a), np.array(b))

    def test_radius(self) -> None:
        """Test points respect the requested radius."""
        points = sample_interior(make_builtin("bidisc"), 200, 1, radius=0.5)
        assert len(points) == 200
        assert max(np.max(np.abs(z)) for z in points) <= 0.5

    def test_custom_rejection(self) -> None:
        """Test custom samples land inside the annulus with margin."""
        fam = annulus_family(0.5)
        for z in sample_interior(fam, 50, 3):
            assert 0.5 < abs(z[0]) < 1

    def test_custom_without_radius(self) -> None:
        """Test a custom family without sampler radius cannot be sampled."""
        fam = TestFunctionFamily(
            domain=DomainDescriptor(kind="custom", dimension=1), functions=annulus_pair(0.5)
        )
        with pytest.raises(UnsupportedError):
            sample_interior(fam, 5, 0)


class TestSerialization:
    """Test cases for family dictionaries."""

    def test_recentered_round_trip(self) -> None:
        """Test a recentered family survives serialization."""
        moved = recenter(make_builtin("bidisc"), [0.2, -0.3j])
        rebuilt = family_from_dict(family_to_dict(moved))
        z = np.array([0.5, 0.1 + 0.1j])
        np.testing.assert_allclose(evaluate_family(rebuilt, z), evaluate_family(moved, z))
        assert isinstance(rebuilt.functions[0], MobiusComposed)

    def test_false_common_zero(self) -> None:
        """Test a declared common zero must be a zero of every function."""
        data = family_to_dict(make_builtin("disc"))
        data["common_zero"] = [[0.5, 0.0]]
        with pytest.raises(ProblemFormatError):
            family_from_dict(data)

    def test_unknown_kind(self) -> None:
        """Test an unknown test function kind is rejected."""
        with pytest.raises(ProblemFormatError):
            TestFunction.from_dict({"kind": "spline"})

    def test_coordinate_registry(self) -> None:
        """Test tagged dictionaries dispatch to the registered class."""
        psi = TestFunction.from_dict({"kind": "coordinate", "index": 1})
        assert psi == CoordinateFunction(1)
