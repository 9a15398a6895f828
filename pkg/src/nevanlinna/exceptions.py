"""
Exception hierarchy for the interpolation toolkit.

Every error derives from ``NevanlinnaError``, itself a ``ValueError``, so the
command-line front end can report any of them as an input problem.
"""


class NevanlinnaError(ValueError):
    """Base class for all domain errors raised by this package."""


class DimensionError(NevanlinnaError):
    """Operands have incompatible or illegal shapes."""


class NotPSDError(NevanlinnaError):
    """A matrix expected to be positive semidefinite has a negative eigenvalue."""

    def __init__(self, message: str, min_eigenvalue: float) -> None:
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class GramMismatchError(NevanlinnaError):
    """Two generator families do not have matching Gram matrices."""

    def __init__(self, message: str, mismatch: float) -> None:
        super().__init__(message)
        self.mismatch = mismatch


class DomainError(NevanlinnaError):
    """A point lies outside the domain of a test function family."""


class UnsupportedError(NevanlinnaError):
    """The requested operation is not available for this kind of input."""


class WrongFamilyError(NevanlinnaError):
    """The test function family does not fit the requested operation."""


class InfeasibleKernelError(NevanlinnaError):
    """A kernel component is not positive semidefinite."""


class DecompositionInvalidError(NevanlinnaError):
    """An Agler decomposition does not reproduce the interpolation data."""


class ProblemFormatError(NevanlinnaError):
    """A problem, decomposition or auxiliary-function file is malformed."""


class NearSingularWarning(RuntimeWarning):
    """A resolvent in the parametrization is close to singular."""
