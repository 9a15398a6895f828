"""
The auxiliary function G built from an Agler decomposition of the data.

The decomposition identity rearranges into equal Gram matrices for two
families of vectors, one in L1 (+) Y and one in L1 (+) U. The unitary V
matching them is extended to a unitary Q on L1 (+) (M1 (+) Y) ->
L1 (+) (M2 (+) U) through the complements M2 and M1, and

    G(z) = Q22* + Q12* (I - mu(E(z)) Q11*)^{-1} mu(E(z)) Q21*

interpolates the data in its (Y, U) corner while its (Y, M2) corner
vanishes at the data points.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
import numpy.typing as npt
import scipy.linalg

from .agler_solver import residual
from .base import matrix_from_json, matrix_to_json
from .colligation import Colligation
from .config import DEFAULT_SOLVER_OPTIONS, DEFAULT_TOLERANCES, FORMAT_VERSION, Tolerances
from .cpkernel import CPKernel, kolmogorov_decompose
from .exceptions import (
    DecompositionInvalidError,
    DimensionError,
    DomainError,
    GramMismatchError,
    InfeasibleKernelError,
    ProblemFormatError,
)
from .models import GIdentities, InterpolationProblem
from .numerics import (
    ComplexMatrix,
    adjoint,
    gram_matched_unitary,
    operator_norm,
    orthonormal_complement,
    unitarity_defect,
)
from .testfam import EvalVector, evaluate_family, sample_interior

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AuxiliaryFunction:
    """
    The four blocks of Q and the dimensions of the spaces they act between.

    Q11: L1 -> L1, Q12: M1 (+) Y -> L1, Q21: L1 -> M2 (+) U and
    Q22: M1 (+) Y -> M2 (+) U, with L1 carrying mu(delta) = (+)_k delta_k I_{r_k}.
    Unitarity of Q is not enforced here; ``q_unitarity_defect`` reports it.
    """

    L1_block_dims: tuple[int, ...]
    dim_M1: int
    dim_M2: int
    d_in: int
    d_out: int
    Q11: ComplexMatrix
    Q12: ComplexMatrix
    Q21: ComplexMatrix
    Q22: ComplexMatrix
    decomposition_residual: float = 0.0

    def __post_init__(self) -> None:
        L = self.dim_L1
        expected = {
            "Q11": (L, L),
            "Q12": (L, self.dim_M1 + self.d_out),
            "Q21": (self.dim_M2 + self.d_in, L),
            "Q22": (self.dim_M2 + self.d_in, self.dim_M1 + self.d_out),
        }
        for name, shape in expected.items():
            actual = getattr(self, name).shape
            if actual != shape:
                raise DimensionError(f"{name} has shape {actual}, expected {shape}")
        if self.dim_M1 + self.d_out != self.dim_M2 + self.d_in:
            raise DimensionError(
                f"Q is not square: domain L1+{self.dim_M1}+{self.d_out}, "
                f"range L1+{self.dim_M2}+{self.d_in}"
            )

    @property
    def dim_L1(self) -> int:
        return sum(self.L1_block_dims)

    @property
    def Q(self) -> ComplexMatrix:
        """Assembled [[Q11, Q12], [Q21, Q22]]."""
        return np.block([[self.Q11, self.Q12], [self.Q21, self.Q22]])

    def mu_diagonal(self, E: EvalVector) -> npt.NDArray[np.complex128]:
        values = np.asarray(E, dtype=np.complex128).reshape(-1)
        if values.size != len(self.L1_block_dims):
            raise DimensionError(
                f"Evaluation vector has {values.size} entries, expected "
                f"{len(self.L1_block_dims)}"
            )
        return np.repeat(values, self.L1_block_dims)


@dataclass(frozen=True)
class GValue:
    """G(z) split into rows M1, Y and columns M2, U."""

    G11: ComplexMatrix
    G12: ComplexMatrix
    G21: ComplexMatrix
    G22: ComplexMatrix

    def assembled(self) -> ComplexMatrix:
        return np.block([[self.G11, self.G12], [self.G21, self.G22]])


def _generators(
    problem: InterpolationProblem,
    h: tuple[ComplexMatrix, ...],
    mu: list[npt.NDArray[np.complex128]],
) -> tuple[ComplexMatrix, ComplexMatrix]:
    """
    Columns mu(E_i)* h_i* y (+) y and h_i* y (+) B_i* y.

    Data index outer, basis vector y inner.
    """
    d_out = problem.d_out
    left: list[ComplexMatrix] = []
    right: list[ComplexMatrix] = []
    for i in range(problem.n):
        h_star = adjoint(h[i])
        left.append(np.vstack([mu[i].conj()[:, None] * h_star, np.eye(d_out)]))
        right.append(np.vstack([h_star, adjoint(problem.targets[i])]))
    return np.hstack(left), np.hstack(right)


def build_aux(
    problem: InterpolationProblem,
    decomposition: CPKernel,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    tol_solve: float = DEFAULT_SOLVER_OPTIONS.tol_solve,
) -> AuxiliaryFunction:
    """
    Construct Q, and through it G, from an Agler decomposition.

    Args:
        problem: Interpolation data
        decomposition: PSD kernel satisfying the decomposition identity
        tolerances: Rank, Gram and factorization tolerances
        tol_solve: Largest accepted decomposition residual

    Returns:
        The blocks of Q with the dimensions of L1, M1 and M2

    Raises:
        DecompositionInvalidError: If the decomposition does not satisfy the
            identity, is not PSD, or the Gram matrices cannot be matched
    """
    achieved = residual(problem, decomposition)
    if achieved > tol_solve:
        raise DecompositionInvalidError(
            f"Decomposition residual {achieved:.3e} exceeds {tol_solve:.1e}"
        )

    try:
        factorization = kolmogorov_decompose(
            decomposition, tolerances.tol_rank, tolerances.tol_factor, tolerances.tol_psd
        )
    except InfeasibleKernelError as e:
        raise DecompositionInvalidError(str(e))

    L = factorization.dim
    d_in, d_out = problem.d_in, problem.d_out
    E = problem.eval_vectors()
    mu = [factorization.mu_diagonal(E[i]) for i in range(problem.n)]
    xs, ys = _generators(problem, factorization.h, mu)

    tol_gram = max(tolerances.tol_gram, 10 * achieved)
    try:
        match = gram_matched_unitary(xs, ys, tol_gram, tolerances.tol_rank)
    except GramMismatchError as e:
        raise DecompositionInvalidError(f"Lurking isometry does not exist: {e}")

    N2, N1 = match.basis_domain, match.basis_range
    M2 = orthonormal_complement(N2, L + d_out)
    M1 = orthonormal_complement(N1, L + d_in)
    dim_M1, dim_M2 = M1.shape[1], M2.shape[1]
    if L + d_out + dim_M1 != L + d_in + dim_M2:
        raise DecompositionInvalidError(
            f"Complements have inconsistent dimensions M1={dim_M1}, M2={dim_M2}"
        )

    # Rows (L1 (+) U) (+) M2, columns (L1 (+) Y) (+) M1.
    full = np.block(
        [
            [N1 @ match.V @ adjoint(N2), M1],
            [adjoint(M2), np.zeros((dim_M2, dim_M1), dtype=np.complex128)],
        ]
    )
    columns = np.r_[0:L, L + d_out : L + d_out + dim_M1, L : L + d_out]
    rows = np.r_[0:L, L + d_in : L + d_in + dim_M2, L : L + d_in]
    Q = full[np.ix_(rows, columns)]

    logger.info(
        "Built G with dim L1=%d (blocks %s), dim M1=%d, dim M2=%d",
        L,
        factorization.block_dims,
        dim_M1,
        dim_M2,
    )
    return AuxiliaryFunction(
        L1_block_dims=factorization.block_dims,
        dim_M1=dim_M1,
        dim_M2=dim_M2,
        d_in=d_in,
        d_out=d_out,
        Q11=Q[:L, :L],
        Q12=Q[:L, L:],
        Q21=Q[L:, :L],
        Q22=Q[L:, L:],
        decomposition_residual=achieved,
    )


def eval_G(aux: AuxiliaryFunction, E: EvalVector) -> GValue:
    """
    Evaluate G at a point through its evaluation vector.

    Raises:
        DomainError: If max |E_k| >= 1
    """
    mu = aux.mu_diagonal(E)
    if mu.size and np.max(np.abs(mu)) >= 1:
        raise DomainError(f"Evaluation vector is not strictly contractive: {E}")

    G = adjoint(aux.Q22)
    if aux.dim_L1:
        resolvent = np.eye(aux.dim_L1) - mu[:, None] * adjoint(aux.Q11)
        G = G + adjoint(aux.Q12) @ scipy.linalg.solve(resolvent, mu[:, None] * adjoint(aux.Q21))

    m1, m2 = aux.dim_M1, aux.dim_M2
    return GValue(G11=G[:m1, :m2], G12=G[:m1, m2:], G21=G[m1:, :m2], G22=G[m1:, m2:])


def central_interpolant(aux: AuxiliaryFunction, E: EvalVector) -> ComplexMatrix:
    """The member of the family with zero parameter: G22(z)."""
    return eval_G(aux, E).G22


def aux_as_colligation(aux: AuxiliaryFunction) -> Colligation:
    """
    Realization of G as a transfer function.

    Q* has A = Q11*, B = Q21*, C = Q12*, D = Q22* on the state space L1.
    """
    return Colligation(state_block_dims=aux.L1_block_dims, U=adjoint(aux.Q))


def q_restriction_defect(
    problem: InterpolationProblem,
    decomposition: CPKernel,
    aux: AuxiliaryFunction,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """
    Largest error of Q applied to the data-point vectors.

    Q must send mu(E_i)* h_i* y (+) (0 (+) y) to h_i* y (+) (0 (+) B_i* y) for
    every data point and basis vector y.
    """
    factorization = kolmogorov_decompose(
        decomposition, tolerances.tol_rank, tolerances.tol_factor, tolerances.tol_psd
    )
    if factorization.block_dims != aux.L1_block_dims:
        raise DimensionError(
            f"Decomposition ranks {factorization.block_dims} do not match "
            f"{aux.L1_block_dims}"
        )

    E = problem.eval_vectors()
    worst = 0.0
    for i in range(problem.n):
        h_star = adjoint(factorization.h[i])
        mu = factorization.mu_diagonal(E[i])
        state_in = mu.conj()[:, None] * h_star
        outer_in = np.vstack([np.zeros((aux.dim_M1, aux.d_out)), np.eye(aux.d_out)])
        state_out = aux.Q11 @ state_in + aux.Q12 @ outer_in
        outer_out = aux.Q21 @ state_in + aux.Q22 @ outer_in
        expected = np.vstack(
            [np.zeros((aux.dim_M2, aux.d_out)), adjoint(problem.targets[i])]
        )
        worst = max(
            worst, operator_norm(state_out - h_star), operator_norm(outer_out - expected)
        )
    return worst


def g_identities(
    problem: InterpolationProblem, aux: AuxiliaryFunction, samples: int, seed: int
) -> GIdentities:
    """Interpolation, common-zero and contractivity diagnostics of G."""
    g22_error = 0.0
    g21_norm = 0.0
    for z, target in zip(problem.points, problem.targets):
        value = eval_G(aux, evaluate_family(problem.family, z))
        g22_error = max(g22_error, operator_norm(value.G22 - target))
        g21_norm = max(g21_norm, operator_norm(value.G21))

    at_zero: Optional[float] = None
    if problem.family.common_zero is not None:
        at_zero = operator_norm(
            eval_G(aux, evaluate_family(problem.family, problem.family.common_zero)).G11
        )

    g_norm = 0.0
    g11_norm = 0.0
    for z in sample_interior(problem.family, samples, seed):
        value = eval_G(aux, evaluate_family(problem.family, z))
        g_norm = max(g_norm, operator_norm(value.assembled()))
        g11_norm = max(g11_norm, operator_norm(value.G11))

    return GIdentities(
        max_g22_error=g22_error,
        max_g21_norm=g21_norm,
        g11_at_common_zero=at_zero,
        sampled_max_g_norm=g_norm,
        sampled_max_g11_norm=g11_norm,
        q_unitarity_defect=unitarity_defect(aux.Q),
    )


def aux_to_dict(aux: AuxiliaryFunction) -> dict[str, Any]:
    """Convert G to a dictionary for JSON serialization."""
    return {
        "format_version": FORMAT_VERSION,
        "L1_block_dims": list(aux.L1_block_dims),
        "dim_M1": aux.dim_M1,
        "dim_M2": aux.dim_M2,
        "d_in": aux.d_in,
        "d_out": aux.d_out,
        "decomposition_residual": aux.decomposition_residual,
        "Q11": matrix_to_json(aux.Q11),
        "Q12": matrix_to_json(aux.Q12),
        "Q21": matrix_to_json(aux.Q21),
        "Q22": matrix_to_json(aux.Q22),
    }


def aux_from_dict(data: Any) -> AuxiliaryFunction:
    """
    Rebuild G from ``aux_to_dict`` output.

    Raises:
        ProblemFormatError: If the entry is malformed or has another format version
    """
    if not isinstance(data, dict):
        raise ProblemFormatError("Auxiliary function entry must be an object")
    if data.get("format_version") != FORMAT_VERSION:
        raise ProblemFormatError(
            f"Unsupported format_version: {data.get('format_version')!r}"
        )
    try:
        return AuxiliaryFunction(
            L1_block_dims=tuple(int(r) for r in data["L1_block_dims"]),
            dim_M1=int(data["dim_M1"]),
            dim_M2=int(data["dim_M2"]),
            d_in=int(data["d_in"]),
            d_out=int(data["d_out"]),
            Q11=matrix_from_json(data["Q11"]),
            Q12=matrix_from_json(data["Q12"]),
            Q21=matrix_from_json(data["Q21"]),
            Q22=matrix_from_json(data["Q22"]),
            decomposition_residual=float(data.get("decomposition_residual", 0.0)),
        )
    except (KeyError, TypeError) as e:
        raise ProblemFormatError(f"Malformed auxiliary function entry: {e}")
    except DimensionError as e:
        raise ProblemFormatError(f"Inconsistent auxiliary function entry: {e}")
