"""
Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Zero-dimensional
shapes such as ``(0, 3)`` are legal values throughout, because the complement
spaces of the G construction can be trivial.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np
import numpy.typing as npt
import scipy.linalg

from .config import DEFAULT_TOLERANCES, RANK_FLOOR
from .exceptions import DimensionError, GramMismatchError, NotPSDError

logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]
RealVector = npt.NDArray[np.float64]
Generators = Union[Sequence[npt.ArrayLike], npt.NDArray[np.complex128]]


@dataclass(frozen=True)
class HermitianEig:
    """Spectral decomposition with eigenvalues in non-increasing order."""

    eigenvalues: RealVector
    eigenvectors: ComplexMatrix


class GramMatch(NamedTuple):
    """Unitary V between two spans, written in the returned orthonormal bases."""

    V: ComplexMatrix
    basis_domain: ComplexMatrix
    basis_range: ComplexMatrix


def as_complex_matrix(data: npt.ArrayLike) -> ComplexMatrix:
    """Coerce array-like input to a 2-D complex matrix."""
    matrix = np.asarray(data, dtype=np.complex128)
    if matrix.ndim != 2:
        raise DimensionError(f"Expected a 2-D matrix, got shape {matrix.shape}")
    return matrix


def adjoint(matrix: ComplexMatrix) -> ComplexMatrix:
    """Conjugate transpose."""
    return matrix.conj().T


def _require_square(matrix: ComplexMatrix) -> None:
    if matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"Expected a square matrix, got shape {matrix.shape}")


def hermitian_part(matrix: npt.ArrayLike) -> ComplexMatrix:
    """Return (H + H*)/2 after checking the input is square."""
    H = as_complex_matrix(matrix)
    _require_square(H)
    return (H + adjoint(H)) / 2


def hermitian_eig(matrix: npt.ArrayLike) -> HermitianEig:
    """
    Eigendecomposition of a Hermitian matrix.

    The input is symmetrized before the LAPACK call, so small asymmetries from
    accumulated rounding are tolerated.

    Raises:
        DimensionError: If the input is not square
    """
    H = as_complex_matrix(matrix)
    _require_square(H)

    n = H.shape[0]
    if n == 0:
        return HermitianEig(np.zeros(0), np.zeros((0, 0), dtype=np.complex128))

    values, vectors = scipy.linalg.eigh((H + adjoint(H)) / 2)
    order = np.argsort(values)[::-1]
    return HermitianEig(
        eigenvalues=np.asarray(values[order], dtype=np.float64),
        eigenvectors=np.asarray(vectors[:, order], dtype=np.complex128),
    )


def project_psd(matrix: npt.ArrayLike) -> ComplexMatrix:
    """Nearest positive semidefinite matrix in Frobenius norm (eigenvalue clipping)."""
    eig = hermitian_eig(matrix)
    U = eig.eigenvectors
    clipped = np.maximum(eig.eigenvalues, 0.0)
    projected = (U * clipped) @ adjoint(U)
    return (projected + adjoint(projected)) / 2


def min_eigenvalue(matrix: npt.ArrayLike) -> float:
    """Smallest eigenvalue of a Hermitian matrix; +inf for the empty matrix."""
    eig = hermitian_eig(matrix)
    if eig.eigenvalues.size == 0:
        return float("inf")
    return float(eig.eigenvalues[-1])


def _rank_cutoff(largest: float, tol_rank: float) -> float:
    return max(tol_rank * largest, RANK_FLOOR)


def psd_factor(
    matrix: npt.ArrayLike, tol_rank: float = DEFAULT_TOLERANCES.tol_rank
) -> ComplexMatrix:
    """
    Rank-revealing factor F with F F* = H.

    Eigenvalues below ``tol_rank`` times the largest are dropped, so the
    column count of F is the numerical rank of H.

    Args:
        matrix: Hermitian positive semidefinite matrix
        tol_rank: Relative threshold for negative-part clipping and rank

    Returns:
        Matrix with ``H.shape[0]`` rows and rank-many columns

    Raises:
        NotPSDError: If an eigenvalue is below ``-tol_rank * ||H||``
    """
    eig = hermitian_eig(matrix)
    values = eig.eigenvalues
    rows = eig.eigenvectors.shape[0]
    if values.size == 0:
        return np.zeros((rows, 0), dtype=np.complex128)

    largest = float(np.max(np.abs(values)))
    smallest = float(values[-1])
    if smallest < -tol_rank * largest - RANK_FLOOR:
        raise NotPSDError(
            f"Matrix is not positive semidefinite (min eigenvalue {smallest:.3e})",
            min_eigenvalue=smallest,
        )

    keep = values > _rank_cutoff(max(float(values[0]), 0.0), tol_rank)
    return eig.eigenvectors[:, keep] * np.sqrt(values[keep])


def _stack_columns(generators: Generators, dim: Optional[int]) -> ComplexMatrix:
    if isinstance(generators, np.ndarray) and generators.ndim == 2:
        return np.asarray(generators, dtype=np.complex128)

    vectors = [np.asarray(g, dtype=np.complex128).reshape(-1) for g in generators]
    if not vectors:
        return np.zeros((dim or 0, 0), dtype=np.complex128)

    sizes = {v.size for v in vectors}
    if len(sizes) != 1:
        raise DimensionError(f"Generators have mixed dimensions: {sorted(sizes)}")
    if dim is not None and sizes != {dim}:
        raise DimensionError(f"Generators have dimension {sizes.pop()}, expected {dim}")
    return np.stack(vectors, axis=1)


def orthonormal_basis(
    generators: Generators,
    tol_rank: float = DEFAULT_TOLERANCES.tol_rank,
    rank: Optional[int] = None,
    dim: Optional[int] = None,
) -> ComplexMatrix:
    """
    Orthonormal basis of the span of the generators.

    Generators may be a sequence of vectors or a matrix whose columns are the
    generators. The basis comes from the leading left singular vectors, so it
    is fixed by the generator order.

    Args:
        generators: Spanning vectors
        tol_rank: Singular values below ``tol_rank * sigma_max`` count as zero
        rank: Force the number of returned columns instead of deciding it
        dim: Ambient dimension, needed only when ``generators`` is empty

    Raises:
        DimensionError: If the generators have mixed dimensions
    """
    X = _stack_columns(generators, dim)
    if X.shape[1] == 0 or X.shape[0] == 0:
        return np.zeros((X.shape[0], 0), dtype=np.complex128)

    U, sigma, _ = scipy.linalg.svd(X, full_matrices=False)
    if rank is None:
        rank = int(np.count_nonzero(sigma > _rank_cutoff(float(sigma[0]), tol_rank)))
    return np.asarray(U[:, :rank], dtype=np.complex128)


def orthonormal_complement(basis: ComplexMatrix, dim: int) -> ComplexMatrix:
    """Orthonormal basis of the orthogonal complement of an orthonormal basis."""
    if basis.shape[1] == 0:
        return np.eye(dim, dtype=np.complex128)
    if basis.shape[1] >= dim:
        return np.zeros((dim, 0), dtype=np.complex128)
    complement = scipy.linalg.null_space(adjoint(basis))
    return np.asarray(complement, dtype=np.complex128)


def gram_matched_unitary(
    xs: Generators,
    ys: Generators,
    tol_gram: float = DEFAULT_TOLERANCES.tol_gram,
    tol_rank: float = DEFAULT_TOLERANCES.tol_rank,
) -> GramMatch:
    """
    Unitary V from span(xs) onto span(ys) with V x_j = y_j.

    Such a V exists exactly when the two families have the same Gram matrix.
    Both spans get orthonormal bases with the rank decided on ``xs``; V is
    the unitary Procrustes solution between the coordinate matrices.

    Raises:
        GramMismatchError: If the Gram matrices, or the fitted images, disagree
            beyond ``tol_gram``
        DimensionError: If the families differ in length or are ragged
    """
    X = _stack_columns(xs, None)
    Y = _stack_columns(ys, None)
    if X.shape[1] != Y.shape[1]:
        raise DimensionError(
            f"Generator families differ in length: {X.shape[1]} vs {Y.shape[1]}"
        )

    norms = np.concatenate(
        [np.linalg.norm(X, axis=0), np.linalg.norm(Y, axis=0), np.zeros(1)]
    )
    scale = 1.0 + float(np.max(norms))
    if X.shape[1]:
        mismatch = float(np.max(np.abs(adjoint(X) @ X - adjoint(Y) @ Y)))
    else:
        mismatch = 0.0
    if mismatch > tol_gram * scale:
        raise GramMismatchError(
            f"Gram matrices differ by {mismatch:.3e} (allowed {tol_gram * scale:.3e})",
            mismatch=mismatch,
        )

    basis_domain = orthonormal_basis(X, tol_rank)
    rank = basis_domain.shape[1]
    basis_range = orthonormal_basis(Y, tol_rank, rank=rank)
    if rank == 0:
        return GramMatch(
            np.zeros((0, 0), dtype=np.complex128), basis_domain, basis_range
        )

    coords_x = adjoint(basis_domain) @ X
    coords_y = adjoint(basis_range) @ Y
    W, _, Zh = scipy.linalg.svd(coords_y @ adjoint(coords_x))
    V = np.asarray(W @ Zh, dtype=np.complex128)

    fit = float(np.max(np.linalg.norm(V @ coords_x - coords_y, axis=0)))
    if fit > 10 * tol_gram * scale:
        raise GramMismatchError(
            f"Matched unitary misses its targets by {fit:.3e}", mismatch=fit
        )
    logger.debug("Gram-matched unitary of size %d (fit %.2e)", rank, fit)
    return GramMatch(V, basis_domain, basis_range)


def operator_norm(matrix: npt.ArrayLike) -> float:
    """Largest singular value; 0 for zero-dimensional matrices."""
    M = np.asarray(matrix, dtype=np.complex128)
    if M.size == 0:
        return 0.0
    return float(scipy.linalg.svdvals(np.atleast_2d(M))[0])


def unitarity_defect(matrix: ComplexMatrix) -> float:
    """max(||U*U - I||, ||UU* - I||); 0 for the empty matrix."""
    rows, cols = matrix.shape
    return max(
        operator_norm(adjoint(matrix) @ matrix - np.eye(cols)),
        operator_norm(matrix @ adjoint(matrix) - np.eye(rows)),
    )


def make_rng(seed: int) -> np.random.Generator:
    """Seeded generator on the counter-based Philox bit generator."""
    return np.random.Generator(np.random.Philox(seed))


def complex_gaussian(
    rng: np.random.Generator, rows: int, cols: int
) -> ComplexMatrix:
    """Matrix of i.i.d. standard complex normal entries."""
    real = rng.standard_normal((rows, cols))
    imag = rng.standard_normal((rows, cols))
    return np.asarray((real + 1j * imag) / np.sqrt(2), dtype=np.complex128)


def haar_unitary(rng: np.random.Generator, size: int) -> ComplexMatrix:
    """
    Haar-distributed unitary from a QR factorization of a complex Gaussian.

    The phases of R's diagonal are moved into Q so the factorization, and
    therefore the sample, is unique for a given random stream.
    """
    if size == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    Q, R = scipy.linalg.qr(complex_gaussian(rng, size, size))
    diagonal = np.diag(R)
    phases = np.where(np.abs(diagonal) > 0, diagonal / np.abs(diagonal), 1.0)
    return np.asarray(Q * phases, dtype=np.complex128)
