"""
Numerical tolerances and solver settings.

Defaults sit two orders above double-precision accumulation for matrices up
to a few hundred rows.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from typing import Any

FORMAT_VERSION = 1

# Absolute floor for rank decisions on (numerically) zero matrices.
RANK_FLOOR = 1e-14

DEFAULT_SAMPLES = 500
DEFAULT_SEED = 0


@dataclass(frozen=True)
class Tolerances:
    """Tolerances shared by the linear-algebra kernel and the G construction."""

    tol_eig: float = 1e-11
    tol_rank: float = 1e-10
    tol_gram: float = 1e-7
    tol_psd: float = 1e-9
    tol_factor: float = 1e-9


@dataclass(frozen=True)
class SolverOptions:
    """Settings for the Agler decomposition solver."""

    tol_solve: float = 1e-8
    max_iter: int = 20000
    polish_first: int = 25

    def with_overrides(self, **overrides: Any) -> SolverOptions:
        """Return a copy with every non-None override applied."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_dict(self) -> dict[str, Any]:
        """Convert options to dictionary format for JSON serialization."""
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()
DEFAULT_SOLVER_OPTIONS = SolverOptions()
