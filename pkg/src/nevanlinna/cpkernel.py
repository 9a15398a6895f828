"""
Completely positive kernels on a finite data set.

Over the commutative algebra C^K a kernel is a list of K block matrices
Gamma_k of shape (n*d, n*d); it acts by
Gamma(z_i, z_j)(delta) = sum_k delta_k Gamma_k[i, j] and is completely
positive exactly when every Gamma_k is positive semidefinite.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
import numpy.typing as npt

from .base import matrix_from_json, matrix_to_json
from .config import DEFAULT_TOLERANCES
from .exceptions import DimensionError, InfeasibleKernelError, NotPSDError, ProblemFormatError
from .numerics import (
    ComplexMatrix,
    adjoint,
    complex_gaussian,
    make_rng,
    min_eigenvalue,
    project_psd,
    psd_factor,
)
from .testfam import EvalVector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CPKernel:
    """K Hermitian block kernels on n data points with d x d blocks."""

    n: int
    d: int
    components: npt.NDArray[np.complex128]

    def __post_init__(self) -> None:
        size = self.n * self.d
        if self.components.ndim != 3 or self.components.shape[1:] != (size, size):
            raise DimensionError(
                f"Kernel components must have shape (K, {size}, {size}), "
                f"got {self.components.shape}"
            )
        if self.components.shape[0] < 1:
            raise DimensionError("A kernel needs at least one component")

    @property
    def size(self) -> int:
        """Number K of components."""
        return int(self.components.shape[0])

    def block(self, k: int, i: int, j: int) -> ComplexMatrix:
        """The d x d block Gamma_k[i, j]."""
        if not (0 <= i < self.n and 0 <= j < self.n and 0 <= k < self.size):
            raise IndexError(f"Kernel index out of range: k={k}, i={i}, j={j}")
        d = self.d
        return self.components[k, i * d : (i + 1) * d, j * d : (j + 1) * d]


@dataclass(frozen=True)
class KolmogorovFactorization:
    """
    Gamma(z_i, z_j)(delta) = h(z_i) mu(delta) h(z_j)* with mu block-diagonal.

    ``h[i]`` is the d x sum(r_k) matrix [h_1(z_i) | ... | h_K(z_i)] and
    mu(delta) = diag(delta_1 I_{r_1}, ..., delta_K I_{r_K}).
    """

    block_dims: tuple[int, ...]
    h: tuple[ComplexMatrix, ...]
    reconstruction_error: float

    @property
    def dim(self) -> int:
        """Dimension of the factorization space."""
        return sum(self.block_dims)

    def mu_diagonal(self, delta: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        """Diagonal of mu(delta)."""
        return np.repeat(np.asarray(delta, dtype=np.complex128), self.block_dims)

    def mu(self, delta: npt.ArrayLike) -> ComplexMatrix:
        """The representation mu(delta) as a matrix."""
        return np.diag(self.mu_diagonal(delta))

    def component_factor(self, k: int, i: int) -> ComplexMatrix:
        """h_k(z_i)."""
        start = sum(self.block_dims[:k])
        return self.h[i][:, start : start + self.block_dims[k]]

    def reconstruct(self) -> npt.NDArray[np.complex128]:
        """Components Gamma_k rebuilt from the factors."""
        stacked = np.vstack(self.h)
        parts = []
        start = 0
        for r in self.block_dims:
            F = stacked[:, start : start + r]
            parts.append(F @ adjoint(F))
            start += r
        return np.stack(parts)


@dataclass(frozen=True)
class CauchySchwarzReport:
    """Outcome of the sampled Cauchy-Schwarz inequality check."""

    trials: int
    max_violation: float

    def to_dict(self) -> dict[str, Any]:
        return {"trials": self.trials, "max_violation": self.max_violation}


def _eval_matrix(E: Sequence[EvalVector], n: int, K: int) -> npt.NDArray[np.complex128]:
    values = np.asarray(E, dtype=np.complex128)
    if values.shape != (n, K):
        raise DimensionError(
            f"Expected {n} evaluation vectors of length {K}, got shape {values.shape}"
        )
    return values


def block_weights(E: Sequence[EvalVector], d: int) -> npt.NDArray[np.complex128]:
    """
    Weights M_k(i, j) = 1 - psi_k(z_i) conj(psi_k(z_j)) expanded to d x d blocks.

    Returns:
        Array of shape (K, n*d, n*d)
    """
    values = np.asarray(E, dtype=np.complex128)
    if values.ndim != 2:
        raise DimensionError(f"Evaluation vectors must form an n x K array: {values.shape}")
    weights = 1 - values.T[:, :, None] * values.T.conj()[:, None, :]
    block = np.ones((d, d))
    return np.stack([np.kron(w, block) for w in weights])


def apply(kernel: CPKernel, i: int, j: int, delta: npt.ArrayLike) -> ComplexMatrix:
    """Gamma(z_i, z_j)(delta) = sum_k delta_k Gamma_k[i, j]."""
    coefficients = np.asarray(delta, dtype=np.complex128).reshape(-1)
    if coefficients.size != kernel.size:
        raise DimensionError(
            f"delta has {coefficients.size} entries, kernel has {kernel.size} components"
        )
    result = np.zeros((kernel.d, kernel.d), dtype=np.complex128)
    for k, coefficient in enumerate(coefficients):
        result += coefficient * kernel.block(k, i, j)
    return result


def apply_one_minus_EE(kernel: CPKernel, E: Sequence[EvalVector]) -> ComplexMatrix:
    """
    Block matrix with (i, j) block Gamma(z_i, z_j)(1 - E(z_i) E(z_j)*).

    Raises:
        DimensionError: If E does not hold n vectors of length K
    """
    _eval_matrix(E, kernel.n, kernel.size)
    weights = block_weights(E, kernel.d)
    return np.asarray(np.sum(weights * kernel.components, axis=0), dtype=np.complex128)


def kolmogorov_decompose(
    kernel: CPKernel,
    tol_rank: float = DEFAULT_TOLERANCES.tol_rank,
    tol_factor: float = DEFAULT_TOLERANCES.tol_factor,
    tol_psd: float = DEFAULT_TOLERANCES.tol_psd,
) -> KolmogorovFactorization:
    """
    Minimal Kolmogorov factorization of a CP kernel.

    Each component is factored as F_k F_k* with F_k of full column rank r_k;
    the rows of F_k belonging to data point i form h_k(z_i). Negative eigenvalues
    down to -tol_psd (relative to the largest entry) are clipped first.

    Raises:
        InfeasibleKernelError: If a component is not positive semidefinite
    """
    n, d = kernel.n, kernel.d
    factors = []
    for k in range(kernel.size):
        component = kernel.components[k]
        smallest = min_eigenvalue(component)
        allowed = tol_psd * max(float(np.max(np.abs(component))), 1.0)
        if smallest < -allowed:
            raise InfeasibleKernelError(
                f"Kernel component {k} is not positive semidefinite "
                f"(min eigenvalue {smallest:.3e})"
            )
        try:
            factors.append(psd_factor(project_psd(component), tol_rank))
        except NotPSDError as e:
            raise InfeasibleKernelError(f"Kernel component {k}: {e}")

    stacked = np.hstack(factors)
    h = tuple(stacked[i * d : (i + 1) * d, :] for i in range(n))
    block_dims = tuple(F.shape[1] for F in factors)

    rebuilt = np.stack([F @ adjoint(F) for F in factors])
    scale = max(float(np.max(np.abs(kernel.components))), 1.0)
    error = float(np.max(np.abs(rebuilt - kernel.components))) / scale
    if error > tol_factor:
        logger.warning("Kolmogorov reconstruction error %.3e exceeds %.1e", error, tol_factor)
    logger.debug("Kolmogorov factorization with block ranks %s", block_dims)
    return KolmogorovFactorization(block_dims=block_dims, h=h, reconstruction_error=error)


def cp_cauchy_schwarz_check(kernel: CPKernel, trials: int, seed: int) -> CauchySchwarzReport:
    """
    Sample the Cauchy-Schwarz inequality for the kernel action on delta delta*.

    Checks |<Gamma(z_i,z_j)(dd*) u, v>|^2 <= <Gamma(z_i,z_i)(dd*) v, v>
    <Gamma(z_j,z_j)(dd*) u, u> for random delta, u, v, i, j and reports the
    largest excess of the left side over the right.
    """
    rng = make_rng(seed)
    worst = 0.0
    for _ in range(trials):
        delta = complex_gaussian(rng, kernel.size, 1).reshape(-1)
        weights = np.abs(delta) ** 2
        u = complex_gaussian(rng, kernel.d, 1).reshape(-1)
        v = complex_gaussian(rng, kernel.d, 1).reshape(-1)
        i, j = (int(x) for x in rng.integers(0, kernel.n, size=2))

        lhs = abs(np.vdot(v, apply(kernel, i, j, weights) @ u)) ** 2
        rhs = (
            np.vdot(v, apply(kernel, i, i, weights) @ v).real
            * np.vdot(u, apply(kernel, j, j, weights) @ u).real
        )
        worst = max(worst, float(lhs - rhs))
    return CauchySchwarzReport(trials=trials, max_violation=worst)


def random_cp_kernel(
    rng: np.random.Generator, n: int, d: int, K: int, rank: int | None = None
) -> CPKernel:
    """Kernel whose components are G G* for complex Gaussian G."""
    size = n * d
    columns = size if rank is None else rank
    parts = []
    for _ in range(K):
        G = complex_gaussian(rng, size, columns)
        parts.append(G @ adjoint(G))
    return CPKernel(n=n, d=d, components=np.stack(parts))


def kernel_to_dict(kernel: CPKernel) -> dict[str, Any]:
    """Convert the kernel to a dictionary for JSON serialization."""
    return {
        "n": kernel.n,
        "d": kernel.d,
        "components": [matrix_to_json(component) for component in kernel.components],
    }


def kernel_from_dict(data: Any) -> CPKernel:
    """
    Rebuild a kernel from ``kernel_to_dict`` output.

    Raises:
        ProblemFormatError: If the entry is malformed
    """
    try:
        components = np.stack([matrix_from_json(c) for c in data["components"]])
        return CPKernel(n=int(data["n"]), d=int(data["d"]), components=components)
    except (KeyError, TypeError, ValueError, DimensionError) as e:
        raise ProblemFormatError(f"Malformed kernel entry: {e}")
