"""
Command implementations behind the ``nevanlinna`` entry point.

Each ``cmd_*`` function returns the process exit status: 0 on success, 2 when
the data is infeasible or a decomposition is unusable, 3 when a verification
fails. Input errors propagate as ``ValueError`` or ``FileNotFoundError`` and
are turned into status 1 by ``__main__.main``.
"""

from __future__ import annotations

import json
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Sequence, Union

from .agler_solver import solve_decomposition
from .aux_function import AuxiliaryFunction, build_aux, g_identities
from .colligation import colligation_to_dict, random_instance
from .config import DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_SOLVER_OPTIONS, SolverOptions
from .exceptions import DecompositionInvalidError, ProblemFormatError
from .models import InterpolationProblem, RunReport, SolveReport, VerificationReport
from .parametrizer import (
    SchurParameter,
    random_parameters,
    roundtrip_check,
    verify,
    zero_parameter,
)
from .problem_file import (
    ProblemFile,
    aux_file_dict,
    decomposition_to_dict,
    load_aux,
    load_decomposition,
    load_parameter_file,
    load_problem,
    problem_to_dict,
    write_json,
)
from .testfam import TestFunctionFamily, make_builtin, recenter, sample_interior

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INFEASIBLE = 2
EXIT_VERIFY_FAILED = 3

PathLike = Union[str, Path]


@dataclass(frozen=True)
class RunOptions:
    """Solver settings plus the sampling controls of one invocation."""

    solver: SolverOptions
    samples: int
    seed: int


def resolve_options(
    file_options: dict[str, Any],
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
) -> RunOptions:
    """
    Merge command-line flags over problem-file options over the defaults.

    Raises:
        ProblemFormatError: If a file option has the wrong type
    """
    try:
        solver = DEFAULT_SOLVER_OPTIONS.with_overrides(
            tol_solve=_first(tol, file_options.get("tol_solve"), float),
            max_iter=_first(max_iter, file_options.get("max_iter"), int),
        )
        resolved_samples = _first(samples, file_options.get("samples"), int)
        resolved_seed = _first(seed, file_options.get("seed"), int)
    except (TypeError, ValueError) as e:
        raise ProblemFormatError(f"Invalid option value: {e}")

    options = RunOptions(
        solver=solver,
        samples=DEFAULT_SAMPLES if resolved_samples is None else resolved_samples,
        seed=DEFAULT_SEED if resolved_seed is None else resolved_seed,
    )
    if options.samples < 1 or options.solver.max_iter < 1 or options.solver.tol_solve <= 0:
        raise ProblemFormatError(f"Options out of range: {options}")
    return options


def _first(flag: Any, from_file: Any, cast: Any) -> Any:
    if flag is not None:
        return cast(flag)
    if from_file is not None:
        return cast(from_file)
    return None


def prepared_problem(problem_file: ProblemFile) -> InterpolationProblem:
    """The problem, recentered at ``options.recenter_at`` when given."""
    w0 = problem_file.recenter_at
    if w0 is None:
        return problem_file.problem
    original = problem_file.problem
    family = recenter(original.family, w0)
    logger.info("Recentered the family at %s", w0)
    return InterpolationProblem(family=family, points=original.points, targets=original.targets)


def parse_params(
    specs: Sequence[str], aux: AuxiliaryFunction, family: TestFunctionFamily
) -> list[SchurParameter]:
    """
    Expand ``--params`` values into parameters.

    Accepted forms are ``zero``, ``random:N:seed``, ``colligation:N:seed`` and
    the path of a JSON file with one parameter entry or a list of them.

    Raises:
        ProblemFormatError: If a spec is malformed
        FileNotFoundError: If a parameter file does not exist
    """
    parameters: list[SchurParameter] = []
    for spec in specs or ["zero"]:
        head = spec.split(":")[0]
        if spec == "zero":
            parameters.append(zero_parameter(aux))
        elif head in ("random", "colligation") and not Path(spec).exists():
            parts = spec.split(":")
            if len(parts) != 3:
                raise ProblemFormatError(f"Expected {head}:N:seed, got {spec!r}")
            try:
                count, seed = int(parts[1]), int(parts[2])
            except ValueError:
                raise ProblemFormatError(f"Expected integers in {spec!r}")
            if count < 1:
                raise ProblemFormatError(f"Parameter count must be >= 1: {spec!r}")
            kind = "constant" if head == "random" else "colligation"
            parameters.extend(random_parameters(aux, family, count, seed, kind))
        else:
            for entry in load_parameter_file(spec):
                parameters.append(SchurParameter.from_dict(entry))
    return parameters


def _emit(data: dict[str, Any], out: Optional[PathLike], name: str) -> None:
    if out is None:
        print(json.dumps(data, indent=2, ensure_ascii=False))
    else:
        target = Path(out) / name
        write_json(target, data)
        print(f"Wrote {target}", file=sys.stderr)


def _print_solve_summary(report: SolveReport) -> None:
    print("\nSolve Summary:", file=sys.stderr)
    print(f"  Status: {report.status}", file=sys.stderr)
    print(f"  Residual: {report.affine_residual:.3e}", file=sys.stderr)
    print(f"  Min eigenvalue: {report.min_eigenvalue:.6e}", file=sys.stderr)
    print(f"  Iterations: {report.iterations}", file=sys.stderr)


def _print_verification_summary(reports: Sequence[VerificationReport]) -> None:
    print("\nVerification Summary:", file=sys.stderr)
    for report in reports:
        verdict = "pass" if report.pass_ else "FAIL"
        print(
            f"  - {report.label or 'parameter'}: {verdict} "
            f"(interp {report.interp_residual:.2e}, sup norm {report.schur_norm_max:.6f})",
            file=sys.stderr,
        )


def _verify_all(
    problem: InterpolationProblem,
    aux: AuxiliaryFunction,
    parameters: Sequence[SchurParameter],
    grid: int,
    options: RunOptions,
) -> list[VerificationReport]:
    grid_points = sample_interior(problem.family, grid, options.seed + 1) if grid > 0 else []
    reports = []
    for t in parameters:
        report = verify(problem, aux, t, options.samples, options.seed)
        if grid_points:
            report.roundtrip_residual = roundtrip_check(
                problem, aux, t, grid_points, options.solver
            )
        reports.append(report)
    return reports


def cmd_solve(
    problem_path: PathLike,
    out: Optional[PathLike] = None,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> int:
    """Search for an Agler decomposition and emit it with the solver status."""
    problem_file = load_problem(problem_path)
    options = resolve_options(problem_file.options, tol=tol, max_iter=max_iter)
    problem = prepared_problem(problem_file)

    report = solve_decomposition(problem, options.solver)
    _emit(decomposition_to_dict(report, problem.family), out, "decomposition.json")
    _print_solve_summary(report)
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def cmd_build_g(
    problem_path: PathLike,
    decomposition_path: PathLike,
    out: Optional[PathLike] = None,
    tol: Optional[float] = None,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
) -> int:
    """Build G from a decomposition file and emit it with its diagnostics."""
    problem_file = load_problem(problem_path)
    options = resolve_options(problem_file.options, tol=tol, samples=samples, seed=seed)
    problem = prepared_problem(problem_file)
    kernel = load_decomposition(decomposition_path)

    try:
        aux = build_aux(problem, kernel, tol_solve=options.solver.tol_solve)
    except DecompositionInvalidError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE

    identities = g_identities(problem, aux, options.samples, options.seed)
    _emit(aux_file_dict(aux, problem.family), out, "aux.json")
    report = RunReport(g_identities=identities)
    if out is not None:
        write_json(Path(out) / "g_identities.json", report.to_dict())

    print("\nG Summary:", file=sys.stderr)
    print(f"  dim L1: {aux.dim_L1} (blocks {list(aux.L1_block_dims)})", file=sys.stderr)
    print(f"  dim M1: {aux.dim_M1}, dim M2: {aux.dim_M2}", file=sys.stderr)
    for key, value in identities.to_dict().items():
        print(f"  {key}: {value}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(
    problem_path: PathLike,
    aux_path: PathLike,
    params: Sequence[str] = (),
    grid: int = 0,
    out: Optional[PathLike] = None,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    max_iter: Optional[int] = None,
) -> int:
    """Verify f_t for every requested parameter; status 3 if any fails."""
    problem_file = load_problem(problem_path)
    options = resolve_options(
        problem_file.options, samples=samples, seed=seed, max_iter=max_iter
    )
    problem = prepared_problem(problem_file)
    aux = load_aux(aux_path)
    parameters = parse_params(params, aux, problem.family)

    start = time.perf_counter()
    reports = _verify_all(problem, aux, parameters, grid, options)
    run = RunReport(verifications=reports, timings={"verify": time.perf_counter() - start})
    _emit(run.to_dict(), out, "report.json")
    _print_verification_summary(reports)
    return EXIT_OK if run.all_passed() else EXIT_VERIFY_FAILED


def cmd_random_instance(
    domain: str,
    n: int,
    d: int,
    seed: int,
    state_dims: Optional[Sequence[int]] = None,
    out: Optional[PathLike] = None,
) -> int:
    """Write a solvable problem generated by a random colligation."""
    family = make_builtin(domain)
    dims = list(state_dims) if state_dims else [1] * family.size
    problem, colligation = random_instance(family, n, d, dims, seed)
    data = problem_to_dict(
        problem, domain, options={"seed": seed}, colligation=colligation_to_dict(colligation)
    )
    _emit(data, out, "problem.json")
    return EXIT_OK


def cmd_run(
    problem_path: PathLike,
    params: Sequence[str] = (),
    grid: int = 0,
    out: Optional[PathLike] = None,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
) -> int:
    """Solve, build G and verify in one process."""
    problem_file = load_problem(problem_path)
    options = resolve_options(problem_file.options, tol, max_iter, samples, seed)
    problem = prepared_problem(problem_file)
    run = RunReport()

    start = time.perf_counter()
    solved = solve_decomposition(problem, options.solver)
    run.timings["solve"] = time.perf_counter() - start
    run.solve = solved.to_dict()
    if out is not None:
        write_json(Path(out) / "decomposition.json", decomposition_to_dict(solved, problem.family))
    _print_solve_summary(solved)

    if not solved.feasible or solved.decomposition is None:
        _emit(run.to_dict(), out, "report.json")
        return EXIT_INFEASIBLE

    start = time.perf_counter()
    try:
        aux = build_aux(problem, solved.decomposition, tol_solve=options.solver.tol_solve)
    except DecompositionInvalidError as e:
        print(f"Error: {e}", file=sys.stderr)
        _emit(run.to_dict(), out, "report.json")
        return EXIT_INFEASIBLE
    run.g_identities = g_identities(problem, aux, options.samples, options.seed)
    run.timings["build_g"] = time.perf_counter() - start
    if out is not None:
        write_json(Path(out) / "aux.json", aux_file_dict(aux, problem.family))

    start = time.perf_counter()
    parameters = parse_params(params, aux, problem.family)
    run.verifications = _verify_all(problem, aux, parameters, grid, options)
    run.timings["verify"] = time.perf_counter() - start

    _emit(run.to_dict(), out, "report.json")
    _print_verification_summary(run.verifications)
    return EXIT_OK if run.all_passed() else EXIT_VERIFY_FAILED
