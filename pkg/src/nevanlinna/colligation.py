"""
Unitary colligations over a test function family and their transfer functions.

A colligation is a block operator U = [[A, B], [C, D]] on X (+) U_in ->
X (+) Y_out together with the representation rho(delta) = diag(delta_k I_{x_k})
of C^K on the state space X. Its transfer function

    f(z) = D + C rho(E(z)) (I - A rho(E(z)))^{-1} B

is a Schur-Agler class function, and every such function arises this way.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np
import numpy.typing as npt
import scipy.linalg

from .base import matrix_from_json, matrix_to_json
from .cpkernel import CPKernel
from .exceptions import DimensionError, DomainError, ProblemFormatError
from .models import InterpolationProblem
from .numerics import ComplexMatrix, adjoint, haar_unitary, make_rng, operator_norm
from .testfam import EvalVector, TestFunctionFamily, evaluate_family, sample_interior

logger = logging.getLogger(__name__)

UNITARITY_TOL = 1e-10
# Instance points stay inside this polydisc radius to keep Pick data well scaled.
INSTANCE_RADIUS = 0.8


@dataclass(frozen=True)
class Colligation:
    """
    Block operator U on X (+) C^{d_in} -> X (+) C^{d_out} with X = (+)_k C^{x_k}.

    U must be unitary when square. Rectangular U are accepted as isometries
    (tall) or co-isometries (wide); their transfer functions are still
    contractive Schur-Agler functions.
    """

    state_block_dims: tuple[int, ...]
    U: ComplexMatrix

    def __post_init__(self) -> None:
        x = self.state_dim
        rows, cols = self.U.shape
        if rows < x or cols < x:
            raise DimensionError(
                f"Colligation of shape {self.U.shape} cannot hold a state space of dim {x}"
            )
        if rows == cols:
            defect = max(
                operator_norm(adjoint(self.U) @ self.U - np.eye(cols)),
                operator_norm(self.U @ adjoint(self.U) - np.eye(rows)),
            )
        elif rows > cols:
            defect = operator_norm(adjoint(self.U) @ self.U - np.eye(cols))
        else:
            defect = operator_norm(self.U @ adjoint(self.U) - np.eye(rows))
        if defect > UNITARITY_TOL:
            raise DimensionError(f"Colligation operator is not unitary (defect {defect:.3e})")

    @property
    def state_dim(self) -> int:
        return sum(self.state_block_dims)

    @property
    def d_in(self) -> int:
        return int(self.U.shape[1]) - self.state_dim

    @property
    def d_out(self) -> int:
        return int(self.U.shape[0]) - self.state_dim

    @property
    def A(self) -> ComplexMatrix:
        x = self.state_dim
        return self.U[:x, :x]

    @property
    def B(self) -> ComplexMatrix:
        x = self.state_dim
        return self.U[:x, x:]

    @property
    def C(self) -> ComplexMatrix:
        x = self.state_dim
        return self.U[x:, :x]

    @property
    def D(self) -> ComplexMatrix:
        x = self.state_dim
        return self.U[x:, x:]


def _rho_diagonal(c: Colligation, E: EvalVector) -> npt.NDArray[np.complex128]:
    values = np.asarray(E, dtype=np.complex128).reshape(-1)
    if values.size != len(c.state_block_dims):
        raise DimensionError(
            f"Evaluation vector has {values.size} entries, colligation has "
            f"{len(c.state_block_dims)} state blocks"
        )
    return np.repeat(values, c.state_block_dims)


def rho_eval(c: Colligation, E: EvalVector) -> ComplexMatrix:
    """rho(E) = diag(E_1 I_{x_1}, ..., E_K I_{x_K})."""
    return np.diag(_rho_diagonal(c, E))


def _check_resolvent(values: EvalVector) -> None:
    if values.size and np.max(np.abs(values)) >= 1:
        raise DomainError(f"Evaluation vector is not strictly contractive: {values}")


def transfer_eval(c: Colligation, E: EvalVector) -> ComplexMatrix:
    """
    The transfer function D + C rho(E) (I - A rho(E))^{-1} B.

    Raises:
        DomainError: If ||rho(E)|| >= 1
    """
    rho = _rho_diagonal(c, E)
    _check_resolvent(rho)
    if c.state_dim == 0:
        return c.D.copy()
    resolvent = np.eye(c.state_dim) - c.A * rho[None, :]
    return c.D + (c.C * rho[None, :]) @ scipy.linalg.solve(resolvent, c.B)


def transfer_eval_adjoint(c: Colligation, E: EvalVector) -> ComplexMatrix:
    """
    The adjoint form D* + B* (I - rho(E)* A*)^{-1} rho(E)* C*.

    Agrees with ``transfer_eval(c, E)`` conjugate-transposed.
    """
    rho = _rho_diagonal(c, E)
    _check_resolvent(rho)
    if c.state_dim == 0:
        return adjoint(c.D)
    rho_star = rho.conj()
    resolvent = np.eye(c.state_dim) - rho_star[:, None] * adjoint(c.A)
    return adjoint(c.D) + adjoint(c.B) @ scipy.linalg.solve(
        resolvent, rho_star[:, None] * adjoint(c.C)
    )


def random_colligation(
    family: TestFunctionFamily,
    d_in: int,
    d_out: int,
    state_dims: Sequence[int],
    rng: np.random.Generator,
) -> Colligation:
    """
    Random colligation over the family.

    Draws a Haar unitary of size x + max(d_in, d_out) and keeps its leading
    (x + d_out) x (x + d_in) block, which is unitary when d_in == d_out and
    an isometry or co-isometry otherwise.
    """
    dims = tuple(int(x) for x in state_dims)
    if len(dims) != family.size:
        raise DimensionError(
            f"Need one state dimension per test function ({family.size}), got {len(dims)}"
        )
    if any(x < 0 for x in dims):
        raise DimensionError(f"State dimensions must be non-negative: {dims}")
    x = sum(dims)
    unitary = haar_unitary(rng, x + max(d_in, d_out))
    return Colligation(state_block_dims=dims, U=unitary[: x + d_out, : x + d_in])


def random_instance(
    family: TestFunctionFamily,
    n: int,
    d: int,
    state_dims: Sequence[int],
    seed: int,
    points: Optional[Sequence[Any]] = None,
) -> tuple[InterpolationProblem, Colligation]:
    """
    Solvable interpolation data generated by a random unitary colligation.

    Args:
        family: Test functions of the domain
        n: Number of data points (>= 1)
        d: Size of the square targets (>= 1)
        state_dims: State dimension per test function
        seed: Seed of the Philox stream
        points: Use these data points instead of drawing them

    Returns:
        The problem z_i -> f(z_i) and the colligation realizing f
    """
    if n < 1 or d < 1:
        raise DimensionError(f"Need n >= 1 and d >= 1, got n={n}, d={d}")
    rng = make_rng(seed)
    colligation = random_colligation(family, d, d, state_dims, rng)

    if points is None:
        point_seed = int(rng.integers(0, 2**62))
        chosen = sample_interior(family, n, point_seed, radius=INSTANCE_RADIUS)
    else:
        chosen = list(points)
        if len(chosen) != n:
            raise DimensionError(f"Expected {n} points, got {len(chosen)}")

    targets = np.stack(
        [transfer_eval(colligation, evaluate_family(family, z)) for z in chosen]
    )
    problem = InterpolationProblem(family=family, points=tuple(chosen), targets=targets)
    logger.debug("Random instance with n=%d, d=%d, state dims %s", n, d, state_dims)
    return problem, colligation


def realization_kernel(c: Colligation, problem: InterpolationProblem) -> CPKernel:
    """
    Agler decomposition of data interpolated by the colligation's transfer function.

    With g(z) = C (I - rho(E(z)) A)^{-1}, U U* = I gives
    I - f(z) f(w)* = g(z) (I - rho(E(z)) rho(E(w))*) g(w)*, so the kernel
    Gamma_k[i, j] = g(z_i) P_k g(z_j)* solves the decomposition identity.

    Raises:
        DimensionError: If the colligation does not fit the problem or U is
            a tall isometry
    """
    if c.U.shape[0] > c.U.shape[1]:
        raise DimensionError("Realization kernels need U U* = I; got a tall isometry")
    if c.d_out != problem.d_out or len(c.state_block_dims) != problem.family.size:
        raise DimensionError(
            f"Colligation (d_out={c.d_out}, K={len(c.state_block_dims)}) does not fit "
            f"the problem (d_out={problem.d_out}, K={problem.family.size})"
        )
    x = c.state_dim
    rows = []
    for E in problem.eval_vectors():
        rho = _rho_diagonal(c, E)
        resolvent = np.eye(x) - rho[:, None] * c.A
        # g = C resolvent^{-1}, solved from the right.
        rows.append(adjoint(scipy.linalg.solve(adjoint(resolvent), adjoint(c.C))) if x else c.C)
    H = np.vstack(rows)

    offsets = np.cumsum((0,) + c.state_block_dims)
    components = np.stack(
        [
            H[:, offsets[k] : offsets[k + 1]] @ adjoint(H[:, offsets[k] : offsets[k + 1]])
            for k in range(len(c.state_block_dims))
        ]
    )
    return CPKernel(n=problem.n, d=problem.d_out, components=components)


def colligation_to_dict(c: Colligation) -> dict[str, Any]:
    """Convert the colligation to a dictionary for JSON serialization."""
    return {
        "state_block_dims": list(c.state_block_dims),
        "U": matrix_to_json(c.U),
    }


def colligation_from_dict(data: Any) -> Colligation:
    """
    Rebuild a colligation from ``colligation_to_dict`` output.

    Raises:
        ProblemFormatError: If the entry is malformed
    """
    try:
        U = matrix_from_json(data["U"])
        return Colligation(
            state_block_dims=tuple(int(x) for x in data["state_block_dims"]), U=U
        )
    except (KeyError, TypeError, IndexError, ValueError) as e:
        raise ProblemFormatError(f"Malformed colligation entry: {e}")
