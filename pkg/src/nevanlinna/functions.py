"""
Concrete test functions.

Coordinate selectors cover the disc and polydisc families, rational tables
cover finite pieces of other domains (the annulus pair z, r/z for instance),
and Möbius composition implements recentering at a point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .base import Point, TestFunction, complex_to_pair, pair_to_complex
from .exceptions import DomainError, ProblemFormatError


@dataclass(frozen=True)
class CoordinateFunction(TestFunction):
    """The coordinate selector z -> z[index]."""

    index: int
    kind = "coordinate"

    def __call__(self, z: Point) -> complex:
        return complex(z[self.index])

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "index": self.index}

    @classmethod
    def _from_fields(cls, data: dict[str, Any]) -> CoordinateFunction:
        index = data.get("index")
        if not isinstance(index, int) or index < 0:
            raise ProblemFormatError(f"Coordinate index must be >= 0, got {index!r}")
        return cls(index=index)


@dataclass(frozen=True)
class Monomial:
    """One term coef * z_1^p_1 * ... * z_m^p_m of a polynomial."""

    powers: tuple[int, ...]
    coef: complex

    def __call__(self, z: Point) -> complex:
        value = complex(self.coef)
        for coordinate, power in zip(z, self.powers):
            value *= complex(coordinate) ** power
        return value

    def to_dict(self) -> dict[str, Any]:
        return {"powers": list(self.powers), "coef": complex_to_pair(self.coef)}

    @classmethod
    def from_dict(cls, data: Any) -> Monomial:
        if not isinstance(data, dict) or "powers" not in data or "coef" not in data:
            raise ProblemFormatError(f"Monomial needs 'powers' and 'coef': {data!r}")
        powers = data["powers"]
        if not isinstance(powers, list) or not all(
            isinstance(p, int) and p >= 0 for p in powers
        ):
            raise ProblemFormatError(f"Monomial powers must be non-negative: {powers!r}")
        return cls(powers=tuple(powers), coef=pair_to_complex(data["coef"]))


@dataclass(frozen=True)
class RationalFunction(TestFunction):
    """
    Quotient of two multivariate polynomials given as monomial tables.

    Terms are listed in multi-index order; an empty denominator means 1.
    """

    numerator: tuple[Monomial, ...]
    denominator: tuple[Monomial, ...] = ()
    kind = "rational"

    def __call__(self, z: Point) -> complex:
        top = sum((term(z) for term in self.numerator), 0j)
        if not self.denominator:
            return top
        bottom = sum((term(z) for term in self.denominator), 0j)
        if abs(bottom) < 1e-300:
            raise DomainError(f"Rational test function has a pole at {z}")
        return top / bottom

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "numerator": [t.to_dict() for t in self.numerator],
            "denominator": [t.to_dict() for t in self.denominator],
        }

    @classmethod
    def _from_fields(cls, data: dict[str, Any]) -> RationalFunction:
        numerator = data.get("numerator")
        denominator = data.get("denominator", [])
        if not isinstance(numerator, list) or not isinstance(denominator, list):
            raise ProblemFormatError("Rational function needs monomial lists")
        return cls(
            numerator=tuple(Monomial.from_dict(t) for t in numerator),
            denominator=tuple(Monomial.from_dict(t) for t in denominator),
        )


@dataclass(frozen=True)
class MobiusComposed(TestFunction):
    """
    theta(z) = (a - psi(z)) / (1 - conj(a) psi(z)) with a = psi(w0).

    Composing with this disc automorphism keeps the function disc-valued and
    makes it vanish at w0.
    """

    inner: TestFunction
    center: complex
    kind = "mobius"

    def __call__(self, z: Point) -> complex:
        value = self.inner(z)
        a = complex(self.center)
        return (a - value) / (1 - a.conjugate() * value)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "center": complex_to_pair(self.center),
            "inner": self.inner.to_dict(),
        }

    @classmethod
    def _from_fields(cls, data: dict[str, Any]) -> MobiusComposed:
        if "inner" not in data or "center" not in data:
            raise ProblemFormatError("Möbius entry needs 'inner' and 'center'")
        center = pair_to_complex(data["center"])
        if not abs(center) < 1:
            raise ProblemFormatError(f"Möbius center must lie in the disc: {center}")
        return cls(inner=TestFunction.from_dict(data["inner"]), center=center)


def annulus_pair(inner_radius: float) -> tuple[RationalFunction, RationalFunction]:
    """The functions z and r/z, disc-valued on the annulus r < |z| < 1."""
    if not 0 < inner_radius < 1:
        raise ProblemFormatError(f"Annulus radius must be in (0, 1): {inner_radius}")
    identity = RationalFunction(numerator=(Monomial((1,), 1.0),))
    reciprocal = RationalFunction(
        numerator=(Monomial((0,), complex(inner_radius)),),
        denominator=(Monomial((1,), 1.0),),
    )
    return identity, reciprocal


def evaluate_all(functions: tuple[TestFunction, ...], z: Point) -> np.ndarray:
    """Values of each function at z, as a complex vector."""
    return np.array([psi(z) for psi in functions], dtype=np.complex128)
