"""
Agler decomposition solver.

Finds positive semidefinite Gamma_1..Gamma_K with

    sum_k (1 - psi_k(z_i) conj(psi_k(z_j))) Gamma_k[i, j] = I - B_i B_j*

for all i, j. With one test function the division is exact (the Pick
matrix); with several, Dykstra's alternating projections run between the
product of PSD cones and the affine solution set. Dykstra slows down badly
when every solution is rank deficient, so the iterate is periodically
polished: each component is factored as F_k F_k* and the identity is solved
in the factors by trust-region least squares.
"""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np
import numpy.typing as npt
import scipy.optimize

from .config import DEFAULT_SOLVER_OPTIONS, RANK_FLOOR, SolverOptions
from .cpkernel import CPKernel, apply_one_minus_EE, block_weights
from .exceptions import DimensionError, WrongFamilyError
from .models import InterpolationProblem, SolveReport
from .numerics import ComplexMatrix, hermitian_eig, min_eigenvalue, project_psd

logger = logging.getLogger(__name__)

# Eigenvalue cutoffs, relative to the largest one, for the starting factors.
# The last keeps every direction.
POLISH_RANK_TOLS = (1e-6, 1e-10, -np.inf)
# Smallest starting eigenvalue of a kept direction, relative to the largest.
POLISH_FLOOR = 1e-8
POLISH_MAX_NFEV = 200
POLISH_TOL = 1e-14
# Converged Dykstra iterates above this residual are refined by a polish.
REFINE_ABOVE = 1e-12


def pick_matrix(problem: InterpolationProblem) -> ComplexMatrix:
    """
    Block Pick matrix [(I - B_i B_j*) / (1 - psi(z_i) conj psi(z_j))].

    This is the only candidate decomposition when the family has a single
    test function; the data is solvable iff it is positive semidefinite.

    Raises:
        WrongFamilyError: If the family does not have exactly one function
    """
    if problem.family.size != 1:
        raise WrongFamilyError(
            f"The Pick matrix needs a single test function, family has {problem.family.size}"
        )
    weights = block_weights(problem.eval_vectors(), problem.d_out)[0]
    return problem.target_gram() / weights


def _block_residual(difference: ComplexMatrix, n: int, d: int) -> float:
    blocks = difference.reshape(n, d, n, d).transpose(0, 2, 1, 3)
    return float(np.max(np.linalg.norm(blocks, ord=2, axis=(2, 3))))


def residual(problem: InterpolationProblem, kernel: CPKernel) -> float:
    """
    Largest block error of the decomposition identity.

    Returns:
        max over (i, j) of ||(I - B_i B_j*) - sum_k M_k(i,j) Gamma_k[i,j]||

    Raises:
        DimensionError: If the kernel does not fit the problem
    """
    if (kernel.n, kernel.d, kernel.size) != (
        problem.n,
        problem.d_out,
        problem.family.size,
    ):
        raise DimensionError(
            f"Kernel (n={kernel.n}, d={kernel.d}, K={kernel.size}) does not fit the "
            f"problem (n={problem.n}, d={problem.d_out}, K={problem.family.size})"
        )
    difference = problem.target_gram() - apply_one_minus_EE(kernel, problem.eval_vectors())
    return _block_residual(difference, problem.n, problem.d_out)


def _hermitian(stack: npt.NDArray[np.complex128]) -> npt.NDArray[np.complex128]:
    return (stack + stack.conj().transpose(0, 2, 1)) / 2


def _project_cones(stack: npt.NDArray[np.complex128]) -> npt.NDArray[np.complex128]:
    return np.stack([project_psd(component) for component in stack])


def _starting_factors(
    components: npt.NDArray[np.complex128], rank_tol: float
) -> list[ComplexMatrix]:
    """F_k with F_k F_k* close to the PSD part of each component."""
    spectra = [hermitian_eig(component) for component in components]
    top = max(float(eig.eigenvalues[0]) for eig in spectra)
    scale = max(top, RANK_FLOOR)

    factors = []
    for eig in spectra:
        keep = eig.eigenvalues > rank_tol * scale
        values = np.maximum(eig.eigenvalues[keep], POLISH_FLOOR * scale)
        factors.append(eig.eigenvectors[:, keep] * np.sqrt(values))
    return factors


def _pack(factors: list[ComplexMatrix]) -> npt.NDArray[np.float64]:
    parts = []
    for F in factors:
        parts.extend([F.real.ravel(), F.imag.ravel()])
    return np.concatenate(parts)


def _unpack(
    x: npt.NDArray[np.float64], size: int, ranks: list[int]
) -> list[ComplexMatrix]:
    factors = []
    position = 0
    for r in ranks:
        count = size * r
        real = x[position : position + count]
        imag = x[position + count : position + 2 * count]
        factors.append((real + 1j * imag).reshape(size, r))
        position += 2 * count
    return factors


def _split(values: npt.NDArray[np.complex128]) -> npt.NDArray[np.float64]:
    return np.concatenate([values.real, values.imag], axis=-1)


def polish_on_face(
    problem: InterpolationProblem,
    kernel: CPKernel,
    rank_tol: float,
    tol_solve: float = DEFAULT_SOLVER_OPTIONS.tol_solve,
) -> Optional[CPKernel]:
    """
    Solve the decomposition identity starting from a near-feasible iterate.

    Each component is factored as Gamma_k = F_k F_k*, keeping the directions
    with eigenvalue above ``rank_tol`` times the largest eigenvalue over all
    components (``-inf`` keeps all of them), and the identity is solved for
    the factors by trust-region least squares. The result is positive
    semidefinite by construction. Components may be indefinite.

    Returns:
        The polished kernel, or None if the residual stays above ``tol_solve``
    """
    weights = block_weights(problem.eval_vectors(), problem.d_out)
    target = problem.target_gram()
    size = target.shape[0]

    factors = _starting_factors(kernel.components, rank_tol)
    ranks = [F.shape[1] for F in factors]
    if sum(ranks) == 0:
        return None
    eye = np.eye(size)

    def mismatch(x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        current = _unpack(x, size, ranks)
        gram = sum(
            (w * (F @ F.conj().T) for w, F in zip(weights, current)), np.zeros_like(target)
        )
        return _split((gram - target).ravel())

    def jacobian(x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        columns = []
        for w, F in zip(weights, _unpack(x, size, ranks)):
            # d(F F*) along the unit entry (a, b) of F: e_a f_b* + f_b e_a*.
            left = np.einsum("ai,jb->abij", eye, F.conj())
            right = np.einsum("ib,aj->abij", F, eye)
            r = F.shape[1]
            real_part = (w * (left + right)).reshape(size * r, size * size)
            imag_part = (w * 1j * (left - right)).reshape(size * r, size * size)
            columns.extend([_split(real_part).T, _split(imag_part).T])
        return np.hstack(columns)

    result = scipy.optimize.least_squares(
        mismatch,
        _pack(factors),
        jac=jacobian,
        method="trf",
        x_scale="jac",
        ftol=POLISH_TOL,
        xtol=POLISH_TOL,
        gtol=POLISH_TOL,
        max_nfev=POLISH_MAX_NFEV,
    )
    solved = _unpack(result.x, size, ranks)
    components = np.stack([F @ F.conj().T for F in solved])
    polished = CPKernel(n=problem.n, d=problem.d_out, components=_hermitian(components))
    achieved = residual(problem, polished)
    if achieved > tol_solve:
        logger.debug("Polish with rank tolerance %.0e stopped at residual %.3e", rank_tol, achieved)
        return None
    logger.debug(
        "Polish with ranks %s reached residual %.3e in %d evaluations",
        ranks,
        achieved,
        result.nfev,
    )
    return polished


def _try_polish(
    problem: InterpolationProblem,
    components: npt.NDArray[np.complex128],
    options: SolverOptions,
) -> Optional[CPKernel]:
    kernel = CPKernel(n=problem.n, d=problem.d_out, components=components)
    for rank_tol in POLISH_RANK_TOLS:
        polished = polish_on_face(problem, kernel, rank_tol, options.tol_solve)
        if polished is not None:
            return polished
    return None


def _solve_single(problem: InterpolationProblem, options: SolverOptions) -> SolveReport:
    pick = pick_matrix(problem)
    smallest = min_eigenvalue(pick)
    projected = CPKernel(n=problem.n, d=problem.d_out, components=project_psd(pick)[None])
    achieved = residual(problem, projected)

    if smallest < -options.tol_solve:
        logger.info("Pick matrix has negative eigenvalue %.6e", smallest)
        return SolveReport(
            status="infeasible_certificate_free",
            decomposition=None,
            affine_residual=achieved,
            min_eigenvalue=smallest,
            iterations=0,
            history=[achieved],
        )

    decomposition = projected
    if achieved > options.tol_solve:
        decomposition = CPKernel(n=problem.n, d=problem.d_out, components=pick[None])
        achieved = residual(problem, decomposition)
    return SolveReport(
        status="feasible",
        decomposition=decomposition,
        affine_residual=achieved,
        min_eigenvalue=smallest,
        iterations=0,
        history=[achieved],
    )


def _feasible_report(
    kernel: CPKernel,
    achieved: float,
    iteration: int,
    history: list[float],
    dual_history: list[float],
    polished: bool,
) -> SolveReport:
    return SolveReport(
        status="feasible",
        decomposition=kernel,
        affine_residual=achieved,
        min_eigenvalue=min(min_eigenvalue(c) for c in kernel.components),
        iterations=iteration,
        history=history,
        dual_history=dual_history,
        polished=polished,
    )


def _solve_dykstra(problem: InterpolationProblem, options: SolverOptions) -> SolveReport:
    n, d, K = problem.n, problem.d_out, problem.family.size
    weights = block_weights(problem.eval_vectors(), d)
    normalizer = np.sum(np.abs(weights) ** 2, axis=0)
    target = problem.target_gram()

    def project_affine(stack: npt.NDArray[np.complex128]) -> npt.NDArray[np.complex128]:
        mismatch = target - np.sum(weights * stack, axis=0)
        return _hermitian(stack + weights.conj() * (mismatch / normalizer)[None])

    # Equal split of the one-function formula; already on the affine set.
    start = _hermitian(np.stack([target / (K * weights[k]) for k in range(K)]))
    x = start
    cone_correction = np.zeros_like(x)
    affine_correction = np.zeros_like(x)
    history: list[float] = []
    # Dual objective of the projection of the start onto the intersection;
    # every Dykstra step maximizes it over one block of multipliers.
    dual_history: list[float] = []
    y = x
    next_polish = options.polish_first

    for iteration in range(1, options.max_iter + 1):
        cone_input = x + cone_correction
        y = _project_cones(cone_input)
        cone_correction = cone_input - y
        achieved = _block_residual(target - np.sum(weights * y, axis=0), n, d)
        history.append(achieved)

        if achieved <= options.tol_solve:
            logger.info("Dykstra converged in %d iterations (residual %.3e)", iteration, achieved)
            kernel = CPKernel(n=n, d=d, components=y)
            polished = False
            if achieved > REFINE_ABOVE:
                refined = _try_polish(problem, y, options)
                if refined is not None and residual(problem, refined) < achieved:
                    kernel, achieved, polished = refined, residual(problem, refined), True
            return _feasible_report(kernel, achieved, iteration, history, dual_history, polished)

        if options.polish_first and iteration == next_polish:
            next_polish *= 2
            polished_kernel = _try_polish(problem, y, options)
            if polished_kernel is not None:
                final = residual(problem, polished_kernel)
                logger.info("Polish succeeded after %d iterations (residual %.3e)", iteration, final)
                history.append(final)
                return _feasible_report(
                    polished_kernel, final, iteration, history, dual_history, True
                )

        x_next = project_affine(y + affine_correction)
        affine_correction = y + affine_correction - x_next
        x = x_next
        dual_history.append(
            float(-0.5 * np.vdot(x, x).real - np.vdot(affine_correction, start).real)
        )

    logger.info(
        "Dykstra stopped after %d iterations with residual %.3e",
        options.max_iter,
        history[-1] if history else float("nan"),
    )
    return SolveReport(
        status="max_iterations",
        decomposition=CPKernel(n=n, d=d, components=y),
        affine_residual=history[-1] if history else float("inf"),
        min_eigenvalue=min(min_eigenvalue(c) for c in x),
        iterations=options.max_iter,
        history=history,
        dual_history=dual_history,
    )


def solve_decomposition(
    problem: InterpolationProblem, opts: Optional[SolverOptions] = None
) -> SolveReport:
    """
    Decide solvability of the data by searching for an Agler decomposition.

    Args:
        problem: Interpolation data
        opts: Solver settings (tolerance, iteration limit, first polish)

    Returns:
        Report whose decomposition satisfies the identity within ``tol_solve``
        when the status is ``feasible``. For several test functions a
        non-feasible status is a heuristic verdict, never a certificate.
    """
    options = opts or DEFAULT_SOLVER_OPTIONS
    if problem.family.size == 1:
        return _solve_single(problem, options)
    return _solve_dykstra(problem, options)
