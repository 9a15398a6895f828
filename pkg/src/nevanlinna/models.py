"""
Data models for interpolation problems and run reports.

This module defines the data classes passed between the solver, the G
construction, the parametrization and the command-line front end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
import numpy.typing as npt

from .base import Point, as_point
from .cpkernel import CPKernel
from .exceptions import DimensionError, DomainError
from .numerics import ComplexMatrix, operator_norm
from .testfam import TestFunctionFamily, evaluate_family, point_in_domain

# Slack on ||B_i|| <= 1 so targets produced by unitary colligations pass.
CONTRACTION_SLACK = 1e-10
DISTINCT_POINT_TOL = 1e-14


@dataclass(frozen=True)
class InterpolationProblem:
    """
    Data z_1..z_n in the domain and d_out x d_in targets B_1..B_n.

    Points must be interior and pairwise distinct, and every target must be a
    contraction, otherwise no Schur-Agler interpolant can exist.
    """

    family: TestFunctionFamily
    points: tuple[Point, ...]
    targets: npt.NDArray[np.complex128]

    def __post_init__(self) -> None:
        if not self.points:
            raise DimensionError("An interpolation problem needs at least one point")
        if self.targets.ndim != 3 or self.targets.shape[0] != len(self.points):
            raise DimensionError(
                f"Expected {len(self.points)} target matrices, got shape "
                f"{self.targets.shape}"
            )

        points = tuple(as_point(z, self.family.dimension) for z in self.points)
        object.__setattr__(self, "points", points)
        for i, z in enumerate(points):
            if not point_in_domain(self.family, z):
                raise DomainError(f"Point {i} ({z}) is not interior to the domain")
            for j in range(i):
                if np.max(np.abs(z - points[j])) <= DISTINCT_POINT_TOL:
                    raise DomainError(f"Points {j} and {i} coincide")

        for i, target in enumerate(self.targets):
            norm = operator_norm(target)
            if norm > 1 + CONTRACTION_SLACK:
                raise DomainError(f"Target {i} has norm {norm:.6f} > 1")

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def d_out(self) -> int:
        return int(self.targets.shape[1])

    @property
    def d_in(self) -> int:
        return int(self.targets.shape[2])

    def eval_vectors(self) -> npt.NDArray[np.complex128]:
        """E(z_i) stacked as an n x K array."""
        return np.stack([evaluate_family(self.family, z) for z in self.points])

    def target_gram(self) -> ComplexMatrix:
        """Block matrix with (i, j) block I - B_i B_j*."""
        n, d = self.n, self.d_out
        stacked = self.targets.reshape(n * d, self.d_in)
        return np.kron(np.ones((n, n)), np.eye(d)) - stacked @ stacked.conj().T


@dataclass
class SolveReport:
    """
    Outcome of the Agler decomposition search.

    ``status`` is one of ``feasible``, ``infeasible_certificate_free`` or
    ``max_iterations``.
    """

    status: str
    decomposition: Optional[CPKernel]
    affine_residual: float
    min_eigenvalue: float
    iterations: int
    history: list[float] = field(default_factory=list)
    dual_history: list[float] = field(default_factory=list)
    polished: bool = False

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"

    def to_dict(self) -> dict[str, Any]:
        """Convert the report summary to dictionary format for JSON serialization."""
        return {
            "status": self.status,
            "affine_residual": self.affine_residual,
            "min_eigenvalue": self.min_eigenvalue,
            "iterations": self.iterations,
            "polished": self.polished,
        }


@dataclass
class VerificationReport:
    """Checks of one member f_t of the interpolant family."""

    interp_residual: float
    schur_norm_max: float
    samples: int
    decomposition_residual: float
    g11_margin: float
    pass_: bool = False
    affiliation_consistent: bool = False
    label: str = ""
    roundtrip_residual: Optional[float] = None

    def to_dict(self) -> dict[str, Any]:
        """Convert the report to dictionary format for JSON serialization."""
        return {
            "label": self.label,
            "interp_residual": self.interp_residual,
            "schur_norm_max": self.schur_norm_max,
            "samples": self.samples,
            "decomposition_residual": self.decomposition_residual,
            "g11_margin": self.g11_margin,
            "affiliation_consistent": self.affiliation_consistent,
            "roundtrip_residual": self.roundtrip_residual,
            "pass": self.pass_,
        }


@dataclass
class GIdentities:
    """Diagnostics of the auxiliary function G."""

    max_g22_error: float
    max_g21_norm: float
    g11_at_common_zero: Optional[float]
    sampled_max_g_norm: float
    sampled_max_g11_norm: float
    q_unitarity_defect: float

    def to_dict(self) -> dict[str, Any]:
        """Convert the diagnostics to dictionary format for JSON serialization."""
        return {
            "max_g22_error": self.max_g22_error,
            "max_g21_norm": self.max_g21_norm,
            "g11_at_common_zero": self.g11_at_common_zero,
            "sampled_max_g_norm": self.sampled_max_g_norm,
            "sampled_max_g11_norm": self.sampled_max_g11_norm,
            "q_unitarity_defect": self.q_unitarity_defect,
        }


@dataclass
class RunReport:
    """Everything one CLI invocation learned, with per-stage wall-clock times."""

    solve: Optional[dict[str, Any]] = None
    g_identities: Optional[GIdentities] = None
    verifications: list[VerificationReport] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    def all_passed(self) -> bool:
        return all(report.pass_ for report in self.verifications)

    def to_dict(self) -> dict[str, Any]:
        """Convert the report to dictionary format, replacing non-finite numbers."""
        data = {
            "solve": self.solve,
            "g_identities": self.g_identities.to_dict() if self.g_identities else None,
            "verifications": [report.to_dict() for report in self.verifications],
            "timings": self.timings,
        }
        return _finite(data)


def _finite(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_finite(v) for v in value]
    return value
