"""
Base class for test functions.

This module provides the abstract base class for all test functions and the
tagged-dictionary registry used to serialize them.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any, ClassVar

import numpy as np
import numpy.typing as npt

from .exceptions import ProblemFormatError

Point = npt.NDArray[np.complex128]


def as_point(z: Any, dimension: int) -> Point:
    """
    Coerce a scalar or sequence to a point of C^dimension.

    Args:
        z: Complex scalar (dimension 1 only) or sequence of coordinates
        dimension: Expected number of coordinates

    Returns:
        1-D complex array of length ``dimension``
    """
    point = np.atleast_1d(np.asarray(z, dtype=np.complex128)).reshape(-1)
    if point.size != dimension:
        raise ProblemFormatError(
            f"Point has {point.size} coordinates, expected {dimension}"
        )
    return point


def complex_to_pair(value: complex) -> list[float]:
    """Serialize a complex number as a ``[re, im]`` pair."""
    value = complex(value)
    return [value.real, value.imag]


def pair_to_complex(pair: Any) -> complex:
    """Parse a ``[re, im]`` pair."""
    if (
        not isinstance(pair, (list, tuple))
        or len(pair) != 2
        or not all(isinstance(x, (int, float)) for x in pair)
    ):
        raise ProblemFormatError(f"Expected a [re, im] pair, got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def matrix_to_json(matrix: npt.ArrayLike) -> dict[str, Any]:
    """Serialize a complex matrix as its shape and row-major [re, im] entries."""
    M = np.asarray(matrix, dtype=np.complex128)
    return {
        "shape": [int(s) for s in M.shape],
        "data": [complex_to_pair(x) for x in M.reshape(-1)],
    }


def matrix_from_json(data: Any) -> npt.NDArray[np.complex128]:
    """
    Parse ``matrix_to_json`` output.

    Raises:
        ProblemFormatError: If the shape and entry count disagree
    """
    if not isinstance(data, dict) or "shape" not in data or "data" not in data:
        raise ProblemFormatError("Matrix entry needs 'shape' and 'data'")
    shape = tuple(int(s) for s in data["shape"])
    entries = [pair_to_complex(p) for p in data["data"]]
    if int(np.prod(shape)) != len(entries):
        raise ProblemFormatError(
            f"Matrix of shape {shape} cannot hold {len(entries)} entries"
        )
    return np.array(entries, dtype=np.complex128).reshape(shape)


def nested_to_matrix(rows: Any) -> npt.NDArray[np.complex128]:
    """
    Parse a matrix written as nested rows of [re, im] pairs.

    Raises:
        ProblemFormatError: If the rows are ragged or entries are not pairs
    """
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ProblemFormatError(f"Expected a non-empty list of matrix rows: {rows!r}")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ProblemFormatError(f"Matrix rows have different lengths: {sorted(widths)}")
    return np.array(
        [[pair_to_complex(p) for p in row] for row in rows], dtype=np.complex128
    )


def matrix_to_nested(matrix: npt.ArrayLike) -> list[list[list[float]]]:
    """Write a matrix as nested rows of [re, im] pairs."""
    M = np.asarray(matrix, dtype=np.complex128)
    return [[complex_to_pair(x) for x in row] for row in M]


class TestFunction(ABC):
    """
    Abstract base class for holomorphic test functions.

    A test function maps the domain into the open unit disc. Subclasses
    register themselves under a ``kind`` tag so families can be written to
    and read from problem files.
    """

    __test__ = False

    kind: ClassVar[str] = ""
    _registry: ClassVar[dict[str, type[TestFunction]]] = {}

    def __init_subclass__(cls, **kwargs: Any) -> None:
        super().__init_subclass__(**kwargs)
        if cls.kind:
            TestFunction._registry[cls.kind] = cls

    @abstractmethod
    def __call__(self, z: Point) -> complex:
        """
        Evaluate the function at a point.

        This method should be implemented by each specific test function.
        """

    @abstractmethod
    def to_dict(self) -> dict[str, Any]:
        """Convert the function to a tagged dictionary for JSON serialization."""

    @classmethod
    @abstractmethod
    def _from_fields(cls, data: dict[str, Any]) -> TestFunction:
        """Build an instance from the fields of its tagged dictionary."""

    @staticmethod
    def from_dict(data: Any) -> TestFunction:
        """
        Rebuild a test function from its tagged dictionary.

        Raises:
            ProblemFormatError: If the tag is missing or unknown
        """
        if not isinstance(data, dict) or "kind" not in data:
            raise ProblemFormatError(f"Test function entry needs a 'kind': {data!r}")

        kind = data["kind"]
        if kind not in TestFunction._registry:
            supported = ", ".join(sorted(TestFunction._registry))
            raise ProblemFormatError(
                f"Unsupported test function kind: {kind}. Supported kinds: {supported}"
            )
        return TestFunction._registry[kind]._from_fields(data)
