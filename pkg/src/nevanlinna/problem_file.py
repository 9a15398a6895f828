"""
Reading and writing problem, decomposition and auxiliary-function files.

All files are JSON documents carrying a ``format_version``. Complex numbers
are ``[re, im]`` pairs and matrices are row-major.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from .aux_function import AuxiliaryFunction, aux_from_dict, aux_to_dict
from .base import (
    Point,
    as_point,
    complex_to_pair,
    matrix_to_nested,
    nested_to_matrix,
    pair_to_complex,
)
from .config import FORMAT_VERSION
from .cpkernel import CPKernel, kernel_from_dict, kernel_to_dict
from .exceptions import DimensionError, ProblemFormatError
from .models import InterpolationProblem, SolveReport
from .testfam import TestFunctionFamily, family_from_dict, family_to_dict, make_builtin

logger = logging.getLogger(__name__)

PROBLEM_DOMAINS = ("disc", "bidisc", "custom")
OPTION_KEYS = ("tol_solve", "max_iter", "samples", "seed", "recenter_at")


@dataclass
class ProblemFile:
    """A parsed problem file: the data, its domain name and the run options."""

    problem: InterpolationProblem
    domain: str
    options: dict[str, Any] = field(default_factory=dict)
    colligation: Optional[dict[str, Any]] = None

    @property
    def recenter_at(self) -> Optional[Point]:
        value = self.options.get("recenter_at")
        if value is None:
            return None
        return _parse_point(value, self.problem.family.dimension)


def _read_json(path: Union[str, Path]) -> Any:
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"File not found: {file_path}")
    try:
        with open(file_path, encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ProblemFormatError(f"{file_path} is not valid JSON: {e}")


def write_json(path: Union[str, Path], data: Any, indent: int = 2) -> None:
    """Write a JSON document, creating parent directories."""
    output_path = Path(path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with open(output_path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=indent, ensure_ascii=False)
        f.write("\n")


def _check_version(data: Any, what: str) -> None:
    if not isinstance(data, dict):
        raise ProblemFormatError(f"{what} must be a JSON object")
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise ProblemFormatError(
            f"Unsupported {what} format_version: {version!r} (expected {FORMAT_VERSION})"
        )


def _parse_point(entry: Any, dimension: int) -> Point:
    # A disc point may be written as a bare [re, im] pair.
    if (
        dimension == 1
        and isinstance(entry, list)
        and len(entry) == 2
        and all(isinstance(x, (int, float)) for x in entry)
    ):
        return as_point(pair_to_complex(entry), 1)
    if not isinstance(entry, list):
        raise ProblemFormatError(f"Point must be a list of [re, im] pairs: {entry!r}")
    return as_point([pair_to_complex(c) for c in entry], dimension)


def _family_for(data: dict[str, Any]) -> TestFunctionFamily:
    domain = data.get("domain")
    if domain not in PROBLEM_DOMAINS:
        raise ProblemFormatError(
            f"Unknown domain: {domain!r}. Supported domains: {', '.join(PROBLEM_DOMAINS)}"
        )
    if domain == "custom":
        if "custom_family" not in data:
            raise ProblemFormatError("A custom domain needs a 'custom_family' entry")
        return family_from_dict(data["custom_family"])
    return make_builtin(domain)


def problem_from_dict(data: Any) -> ProblemFile:
    """
    Parse a problem document.

    Raises:
        ProblemFormatError: If the document is malformed
        DomainError: If points are not interior, coincide, or a target is not
            a contraction
    """
    _check_version(data, "problem file")
    family = _family_for(data)

    points = data.get("points")
    targets = data.get("targets")
    if not isinstance(points, list) or not isinstance(targets, list):
        raise ProblemFormatError("Problem file needs 'points' and 'targets' lists")
    if len(points) != len(targets):
        raise ProblemFormatError(
            f"Got {len(points)} points but {len(targets)} targets"
        )

    parsed_points = tuple(_parse_point(p, family.dimension) for p in points)
    matrices = [nested_to_matrix(t) for t in targets]
    shapes = {m.shape for m in matrices}
    if len(shapes) != 1:
        raise ProblemFormatError(f"Targets have different shapes: {sorted(shapes)}")

    options = data.get("options", {})
    if not isinstance(options, dict):
        raise ProblemFormatError("'options' must be an object")
    unknown = sorted(set(options) - set(OPTION_KEYS))
    if unknown:
        raise ProblemFormatError(f"Unknown options: {', '.join(unknown)}")

    try:
        problem = InterpolationProblem(
            family=family, points=parsed_points, targets=np.stack(matrices)
        )
    except DimensionError as e:
        raise ProblemFormatError(str(e))

    colligation = data.get("colligation")
    logger.debug(
        "Parsed %s problem with n=%d, targets %dx%d",
        data["domain"],
        problem.n,
        problem.d_out,
        problem.d_in,
    )
    return ProblemFile(
        problem=problem, domain=data["domain"], options=dict(options), colligation=colligation
    )


def load_problem(path: Union[str, Path]) -> ProblemFile:
    """
    Read a problem file.

    Raises:
        FileNotFoundError: If the file does not exist
        ProblemFormatError: If it is not a valid problem document
    """
    return problem_from_dict(_read_json(path))


def problem_to_dict(
    problem: InterpolationProblem,
    domain: str,
    options: Optional[dict[str, Any]] = None,
    colligation: Optional[dict[str, Any]] = None,
) -> dict[str, Any]:
    """Convert a problem to a problem document."""
    data: dict[str, Any] = {"format_version": FORMAT_VERSION, "domain": domain}
    if domain == "custom":
        data["custom_family"] = family_to_dict(problem.family)
    data["points"] = [[complex_to_pair(c) for c in z] for z in problem.points]
    data["targets"] = [matrix_to_nested(B) for B in problem.targets]
    data["options"] = dict(options or {})
    if colligation is not None:
        data["colligation"] = colligation
    return data


def decomposition_to_dict(
    report: SolveReport, family: Optional[TestFunctionFamily] = None
) -> dict[str, Any]:
    """Solver status with the decomposition kernel, if any."""
    data: dict[str, Any] = {"format_version": FORMAT_VERSION, **report.to_dict()}
    data["kernel"] = (
        kernel_to_dict(report.decomposition) if report.decomposition is not None else None
    )
    if family is not None:
        data["family"] = family_to_dict(family)
    return data


def load_decomposition(path: Union[str, Path]) -> CPKernel:
    """
    Read the kernel of a decomposition file.

    Raises:
        ProblemFormatError: If the file holds no kernel or is malformed
    """
    data = _read_json(path)
    _check_version(data, "decomposition file")
    if data.get("kernel") is None:
        raise ProblemFormatError(f"{path} holds no decomposition (status {data.get('status')})")
    return kernel_from_dict(data["kernel"])


def aux_file_dict(
    aux: AuxiliaryFunction, family: Optional[TestFunctionFamily] = None
) -> dict[str, Any]:
    """The auxiliary-function document, optionally recording its family."""
    data = aux_to_dict(aux)
    if family is not None:
        data["family"] = family_to_dict(family)
    return data


def load_aux(path: Union[str, Path]) -> AuxiliaryFunction:
    """Read an auxiliary-function file."""
    return aux_from_dict(_read_json(path))


def load_parameter_file(path: Union[str, Path]) -> list[Any]:
    """Entries of a parameter file: one object or a list of them."""
    data = _read_json(path)
    entries = data if isinstance(data, list) else [data]
    if not entries:
        raise ProblemFormatError(f"{path} holds no parameters")
    return entries
