"""
The linear-fractional family of interpolants and its verification harness.

Every Schur-Agler parameter t: M1 -> M2 gives an interpolant

    f_t = G22 + G21 (I - t G11)^{-1} t G12

of the data that G was built from.
"""

from __future__ import annotations

import logging
import warnings
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, ClassVar, Optional, Sequence

import numpy as np
import scipy.linalg

from .agler_solver import solve_decomposition
from .aux_function import AuxiliaryFunction, eval_G
from .base import Point, matrix_from_json, matrix_to_json
from .colligation import (
    Colligation,
    colligation_from_dict,
    colligation_to_dict,
    random_colligation,
    transfer_eval,
)
from .config import DEFAULT_SOLVER_OPTIONS, SolverOptions
from .exceptions import DimensionError, NearSingularWarning, ProblemFormatError
from .models import InterpolationProblem, VerificationReport
from .numerics import ComplexMatrix, complex_gaussian, make_rng, operator_norm
from .testfam import EvalVector, TestFunctionFamily, evaluate_family, sample_interior

logger = logging.getLogger(__name__)

PARAMETER_NORM_SLACK = 1e-12
CONDITION_LIMIT = 1e12
INTERP_TOL = 1e-6
NORM_TOL = 1e-6
AFFILIATION_TOL = 1e-7


class SchurParameter(ABC):
    """A Schur-Agler function t from M1 to M2 over the test function family."""

    kind: ClassVar[str] = ""

    @property
    @abstractmethod
    def shape(self) -> tuple[int, int]:
        """(dim M2, dim M1)."""

    @abstractmethod
    def evaluate(self, E: EvalVector) -> ComplexMatrix:
        """t at the point with evaluation vector E."""

    @abstractmethod
    def to_dict(self) -> dict[str, Any]:
        """Convert the parameter to a tagged dictionary for JSON serialization."""

    @staticmethod
    def from_dict(data: Any) -> SchurParameter:
        """
        Rebuild a parameter from a tagged dictionary.

        An untagged matrix entry is read as a constant parameter.

        Raises:
            ProblemFormatError: If the entry is malformed
        """
        if not isinstance(data, dict):
            raise ProblemFormatError(f"Parameter entry must be an object: {data!r}")
        kind = data.get("kind", ConstantParameter.kind)
        if kind == ConstantParameter.kind:
            matrix = matrix_from_json(data.get("matrix", data))
            return ConstantParameter(matrix=matrix, label=str(data.get("label", "")))
        if kind == ColligationParameter.kind:
            return ColligationParameter(
                colligation=colligation_from_dict(data.get("colligation")),
                label=str(data.get("label", "")),
            )
        raise ProblemFormatError(f"Unsupported parameter kind: {kind}")


@dataclass(frozen=True)
class ConstantParameter(SchurParameter):
    """A constant contraction t(z) = T."""

    kind: ClassVar[str] = "constant"

    matrix: ComplexMatrix
    label: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=np.complex128))
        if self.matrix.ndim != 2:
            raise DimensionError(f"Constant parameter must be a matrix: {self.matrix.shape}")
        norm = operator_norm(self.matrix)
        if norm > 1 + PARAMETER_NORM_SLACK:
            raise DimensionError(f"Constant parameter has norm {norm:.6f} > 1")

    @property
    def shape(self) -> tuple[int, int]:
        return (int(self.matrix.shape[0]), int(self.matrix.shape[1]))

    def evaluate(self, E: EvalVector) -> ComplexMatrix:
        return self.matrix

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "label": self.label, "matrix": matrix_to_json(self.matrix)}


@dataclass(frozen=True)
class ColligationParameter(SchurParameter):
    """The transfer function of a colligation with input M1 and output M2."""

    kind: ClassVar[str] = "colligation"

    colligation: Colligation
    label: str = ""

    @property
    def shape(self) -> tuple[int, int]:
        return (self.colligation.d_out, self.colligation.d_in)

    def evaluate(self, E: EvalVector) -> ComplexMatrix:
        return transfer_eval(self.colligation, E)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "label": self.label,
            "colligation": colligation_to_dict(self.colligation),
        }


def zero_parameter(aux: AuxiliaryFunction) -> ConstantParameter:
    """t = 0, whose interpolant is the central one."""
    return ConstantParameter(
        matrix=np.zeros((aux.dim_M2, aux.dim_M1), dtype=np.complex128), label="zero"
    )


def _check_shape(aux: AuxiliaryFunction, t: SchurParameter) -> None:
    if t.shape != (aux.dim_M2, aux.dim_M1):
        raise DimensionError(
            f"Parameter maps C^{t.shape[1]} -> C^{t.shape[0]}, "
            f"G needs C^{aux.dim_M1} -> C^{aux.dim_M2}"
        )


def param_eval(aux: AuxiliaryFunction, t: SchurParameter, E: EvalVector) -> ComplexMatrix:
    """
    f_t at the point with evaluation vector E.

    Issues a ``NearSingularWarning`` when I - t G11 has condition number
    above 1e12.

    Raises:
        DimensionError: If t does not map M1 to M2
        DomainError: If max |E_k| >= 1
    """
    _check_shape(aux, t)
    g = eval_G(aux, E)
    if aux.dim_M1 == 0 or aux.dim_M2 == 0:
        return g.G22.copy()

    T = t.evaluate(E)
    resolvent = np.eye(aux.dim_M2) - T @ g.G11
    condition = float(np.linalg.cond(resolvent))
    if not condition <= CONDITION_LIMIT:
        warnings.warn(
            f"Resolvent I - t G11 is near singular (condition {condition:.3e})",
            NearSingularWarning,
            stacklevel=2,
        )
    return g.G22 + g.G21 @ scipy.linalg.solve(resolvent, T @ g.G12)


def verify(
    problem: InterpolationProblem,
    aux: AuxiliaryFunction,
    t: SchurParameter,
    samples: int,
    seed: int,
) -> VerificationReport:
    """
    Check that f_t interpolates the data and stays contractive on samples.

    The report passes when the interpolation residual is at most 1e-6 and the
    largest sampled norm at most 1 + 1e-6. ``affiliation_consistent`` records
    that the decomposition of f_t restricts to the chosen kernel at the data
    points, which there reduces to f_t(z_i) = B_i with G21(z_i) = 0.
    """
    interp = 0.0
    g21 = 0.0
    for z, target in zip(problem.points, problem.targets):
        E = evaluate_family(problem.family, z)
        interp = max(interp, operator_norm(param_eval(aux, t, E) - target))
        g21 = max(g21, operator_norm(eval_G(aux, E).G21))

    sup_norm = 0.0
    margin = 1.0
    for z in sample_interior(problem.family, samples, seed):
        E = evaluate_family(problem.family, z)
        sup_norm = max(sup_norm, operator_norm(param_eval(aux, t, E)))
        margin = min(margin, 1 - operator_norm(eval_G(aux, E).G11))

    passed = interp <= INTERP_TOL and sup_norm <= 1 + NORM_TOL
    report = VerificationReport(
        interp_residual=interp,
        schur_norm_max=sup_norm,
        samples=samples,
        decomposition_residual=aux.decomposition_residual,
        g11_margin=margin,
        pass_=passed,
        affiliation_consistent=interp <= AFFILIATION_TOL and g21 <= AFFILIATION_TOL,
        label=getattr(t, "label", ""),
    )
    logger.debug("Verified parameter %r: %s", report.label, report.to_dict())
    return report


def roundtrip_check(
    problem: InterpolationProblem,
    aux: AuxiliaryFunction,
    t: SchurParameter,
    grid: Sequence[Point],
    opts: Optional[SolverOptions] = None,
) -> float:
    """
    Residual of the data enlarged by the values of f_t on the grid.

    A small residual shows f_t is consistent with a Schur-Agler function on
    the enlarged point set, not just bounded there. An empty grid returns
    the residual of the decomposition G was built from.

    Raises:
        DomainError: If a grid point is outside the domain or repeats a data point
    """
    if len(grid) == 0:
        return aux.decomposition_residual

    values = [param_eval(aux, t, evaluate_family(problem.family, g)) for g in grid]
    enlarged = InterpolationProblem(
        family=problem.family,
        points=tuple(problem.points) + tuple(grid),
        targets=np.concatenate([problem.targets, np.stack(values)]),
    )
    report = solve_decomposition(enlarged, opts or DEFAULT_SOLVER_OPTIONS)
    logger.info("Enlarged problem with %d points: %s", enlarged.n, report.status)
    return report.affine_residual


def random_parameters(
    aux: AuxiliaryFunction,
    family: TestFunctionFamily,
    count: int,
    seed: int,
    kind: str = "constant",
) -> list[SchurParameter]:
    """
    Seeded random parameters for G.

    Args:
        aux: G whose M1 and M2 fix the parameter shape
        family: Test functions the colligation parameters are built over
        count: Number of parameters
        seed: Seed of the Philox stream
        kind: ``constant`` for contractions with norm drawn uniformly from
            [0, 1), ``colligation`` for random colligations with one state
            dimension per test function
    """
    rng = make_rng(seed)
    rows, cols = aux.dim_M2, aux.dim_M1
    parameters: list[SchurParameter] = []
    for index in range(count):
        label = f"{kind}:{seed}:{index}"
        if kind == "constant":
            matrix = complex_gaussian(rng, rows, cols)
            scale = rng.random()
            norm = operator_norm(matrix)
            if norm > 0:
                matrix = matrix * (scale / norm)
            parameters.append(ConstantParameter(matrix=matrix, label=label))
        elif kind == "colligation":
            colligation = random_colligation(family, cols, rows, [1] * family.size, rng)
            parameters.append(ColligationParameter(colligation=colligation, label=label))
        else:
            raise ValueError(f"Unknown parameter kind: {kind}")
    return parameters

