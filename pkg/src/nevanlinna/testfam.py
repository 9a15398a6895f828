"""
Finite families of test functions on a domain.

A family psi_1..psi_K is evaluated to the vector E(z) = (psi_1(z), ...,
psi_K(z)); with finitely many functions the algebra of bounded functions on
the family is just C^K with pointwise operations.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Optional

import numpy as np
import numpy.typing as npt

from .base import Point, TestFunction, as_point, complex_to_pair, pair_to_complex
from .exceptions import DomainError, ProblemFormatError, UnsupportedError
from .functions import CoordinateFunction, MobiusComposed, RationalFunction, evaluate_all
from .numerics import make_rng

logger = logging.getLogger(__name__)

EvalVector = npt.NDArray[np.complex128]

DOMAIN_KINDS = ("disc", "polydisc", "custom")
DEFAULT_MARGIN = 1e-3
COMMON_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class DomainDescriptor:
    """
    The domain Omega in C^m.

    For the disc and polydisc a point is interior iff its largest coordinate
    modulus is below 1. Custom domains are described only through their test
    functions, plus an optional polydisc radius to draw sample candidates from.
    """

    kind: str
    dimension: int
    margin: float = DEFAULT_MARGIN
    sampler_radius: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind not in DOMAIN_KINDS:
            raise ProblemFormatError(f"Unknown domain kind: {self.kind}")
        if self.dimension < 1:
            raise ProblemFormatError(f"Domain dimension must be >= 1: {self.dimension}")
        if not 0 < self.margin <= 1:
            raise ProblemFormatError(f"Membership margin must be in (0, 1]: {self.margin}")
        if self.kind == "disc" and self.dimension != 1:
            raise ProblemFormatError("The disc has dimension 1")


@dataclass(frozen=True)
class TestFunctionFamily:
    """Ordered finite family of test functions with an optional common zero."""

    __test__ = False

    domain: DomainDescriptor
    functions: tuple[TestFunction, ...]
    common_zero: Optional[Point] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.functions:
            raise ProblemFormatError("A test function family needs at least one function")
        for psi in self.functions:
            _check_arity(psi, self.domain.dimension)

    @property
    def size(self) -> int:
        """Number K of test functions."""
        return len(self.functions)

    @property
    def dimension(self) -> int:
        return self.domain.dimension


def _check_arity(psi: TestFunction, dimension: int) -> None:
    if isinstance(psi, CoordinateFunction) and psi.index >= dimension:
        raise ProblemFormatError(
            f"Coordinate {psi.index} does not exist in dimension {dimension}"
        )
    if isinstance(psi, RationalFunction):
        for term in psi.numerator + psi.denominator:
            if len(term.powers) != dimension:
                raise ProblemFormatError(
                    f"Monomial {term.powers} does not match dimension {dimension}"
                )
    if isinstance(psi, MobiusComposed):
        _check_arity(psi.inner, dimension)


def point_in_domain(fam: TestFunctionFamily, z: Point) -> bool:
    """Whether z is an interior point of the family's domain."""
    if fam.domain.kind in ("disc", "polydisc"):
        return bool(np.max(np.abs(z)) < 1)
    try:
        values = evaluate_all(fam.functions, z)
    except DomainError:
        return False
    return bool(np.max(np.abs(values)) < 1)


def evaluate_family(fam: TestFunctionFamily, z: Any) -> EvalVector:
    """
    The evaluation vector E(z) = (psi_1(z), ..., psi_K(z)).

    Raises:
        DomainError: If z is not interior to the domain
    """
    point = as_point(z, fam.dimension)
    if not point_in_domain(fam, point):
        raise DomainError(f"Point {point} lies outside the {fam.domain.kind} domain")

    values = evaluate_all(fam.functions, point)
    if np.max(np.abs(values)) >= 1:
        raise DomainError(
            f"Test functions are not disc-valued at {point}: {np.abs(values)}"
        )
    return values


def recenter(fam: TestFunctionFamily, w0: Any) -> TestFunctionFamily:
    """
    Compose every test function with the disc automorphism sending psi(w0) to 0.

    The returned family vanishes at w0 and records it as its common zero.

    Raises:
        DomainError: If w0 is not interior to the domain
    """
    center = as_point(w0, fam.dimension)
    values = evaluate_family(fam, center)
    functions = tuple(
        MobiusComposed(inner=psi, center=complex(value))
        for psi, value in zip(fam.functions, values)
    )
    logger.debug("Recentered %d test functions at %s", len(functions), center)
    return replace(fam, functions=functions, common_zero=center)


def make_polydisc(dimension: int) -> TestFunctionFamily:
    """Coordinate functions on the polydisc of the given dimension."""
    kind = "disc" if dimension == 1 else "polydisc"
    return TestFunctionFamily(
        domain=DomainDescriptor(kind=kind, dimension=dimension),
        functions=tuple(CoordinateFunction(k) for k in range(dimension)),
        common_zero=np.zeros(dimension, dtype=np.complex128),
    )


def make_builtin(kind: str) -> TestFunctionFamily:
    """
    Built-in families: ``disc`` (psi(z) = z) and ``bidisc`` (z_1, z_2).

    Raises:
        ProblemFormatError: For any other name
    """
    builtins = {"disc": 1, "bidisc": 2}
    if kind not in builtins:
        supported = ", ".join(builtins)
        raise ProblemFormatError(
            f"Unknown built-in family: {kind}. Supported families: {supported}"
        )
    return make_polydisc(builtins[kind])


def _polydisc_points(
    rng: np.random.Generator, count: int, dimension: int, radius: float
) -> npt.NDArray[np.complex128]:
    # sqrt on the radial draw makes the points uniform on each disc
    moduli = radius * np.sqrt(rng.random((count, dimension)))
    angles = 2 * np.pi * rng.random((count, dimension))
    return np.asarray(moduli * np.exp(1j * angles), dtype=np.complex128)


def sample_interior(
    fam: TestFunctionFamily,
    count: int,
    seed: int,
    margin: Optional[float] = None,
    radius: Optional[float] = None,
) -> list[Point]:
    """
    Deterministic pseudo-random interior points.

    Args:
        fam: Family whose domain is sampled
        count: Number of points (>= 1)
        seed: Seed of the Philox stream
        margin: Keep max coordinate modulus <= 1 - margin (default: the domain's)
        radius: Sample the polydisc of this radius instead (must not exceed
            1 - margin)

    Raises:
        UnsupportedError: For a custom domain without a sampler radius
    """
    if count < 1:
        raise ValueError(f"Sample count must be >= 1, got {count}")

    margin = fam.domain.margin if margin is None else margin
    rng = make_rng(seed)
    if fam.domain.kind in ("disc", "polydisc"):
        bound = 1 - margin if radius is None else min(radius, 1 - margin)
        return list(_polydisc_points(rng, count, fam.dimension, bound))

    if fam.domain.sampler_radius is None:
        raise UnsupportedError("Custom domain has no sampler_radius to draw points from")

    bound = fam.domain.sampler_radius if radius is None else radius
    points: list[Point] = []
    attempts = 0
    while len(points) < count:
        attempts += 1
        if attempts > 1000:
            raise UnsupportedError(
                f"Rejection sampling found only {len(points)} of {count} points"
            )
        for candidate in _polydisc_points(rng, count, fam.dimension, bound):
            try:
                values = evaluate_all(fam.functions, candidate)
            except DomainError:
                continue
            if np.max(np.abs(values)) <= 1 - margin:
                points.append(candidate)
                if len(points) == count:
                    break
    return points


def family_to_dict(fam: TestFunctionFamily) -> dict[str, Any]:
    """Convert the family to a dictionary for JSON serialization."""
    data: dict[str, Any] = {
        "kind": fam.domain.kind,
        "dimension": fam.domain.dimension,
        "margin": fam.domain.margin,
        "functions": [psi.to_dict() for psi in fam.functions],
    }
    if fam.domain.sampler_radius is not None:
        data["sampler_radius"] = fam.domain.sampler_radius
    if fam.common_zero is not None:
        data["common_zero"] = [complex_to_pair(c) for c in fam.common_zero]
    return data


def family_from_dict(data: Any) -> TestFunctionFamily:
    """
    Rebuild a family from ``family_to_dict`` output.

    Raises:
        ProblemFormatError: If the entry is malformed
    """
    if not isinstance(data, dict):
        raise ProblemFormatError("Family entry must be an object")
    try:
        domain = DomainDescriptor(
            kind=data["kind"],
            dimension=int(data["dimension"]),
            margin=float(data.get("margin", DEFAULT_MARGIN)),
            sampler_radius=data.get("sampler_radius"),
        )
        functions = tuple(TestFunction.from_dict(f) for f in data["functions"])
    except (KeyError, TypeError) as e:
        raise ProblemFormatError(f"Malformed family entry: {e}")

    common_zero = None
    if data.get("common_zero") is not None:
        common_zero = np.array(
            [pair_to_complex(c) for c in data["common_zero"]], dtype=np.complex128
        )
    fam = TestFunctionFamily(domain=domain, functions=functions, common_zero=common_zero)
    if common_zero is not None:
        values = evaluate_family(fam, common_zero)
        if np.max(np.abs(values)) > COMMON_ZERO_TOL:
            raise ProblemFormatError(
                f"Family does not vanish at its declared common zero {common_zero}"
            )
    return fam
