"""
Main entry point.

This module provides the command-line interface for the interpolation toolkit.
"""

import argparse
import logging
import sys
from typing import Optional, Sequence

from . import __version__
from .cli import (
    EXIT_INPUT,
    cmd_build_g,
    cmd_random_instance,
    cmd_run,
    cmd_solve,
    cmd_verify,
)


def _state_dims(value: str) -> list[int]:
    try:
        dims = [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Expected comma-separated integers: {value!r}")
    if any(x < 0 for x in dims):
        raise argparse.ArgumentTypeError(f"State dimensions must be non-negative: {value!r}")
    return dims


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", type=str, metavar="DIR", help="Write results into DIR")
    parser.add_argument(
        "--verbose", action="store_true", help="Log solver and construction details"
    )


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tol", type=float, help="Decomposition residual tolerance")
    parser.add_argument("--max-iter", type=int, help="Iteration limit of the solver")


def _add_sampling_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--samples", type=int, help="Interior sample points (default: 500)")
    parser.add_argument("--seed", type=int, help="Seed of the sampling stream (default: 0)")


def _add_verify_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--params",
        action="append",
        default=[],
        metavar="SPEC",
        help="zero, random:N:seed, colligation:N:seed or a parameter JSON file "
        "(repeatable, default: zero)",
    )
    parser.add_argument(
        "--grid",
        type=int,
        default=0,
        help="Extra points for the enlarged-problem round trip (default: 0)",
    )


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per pipeline stage."""
    parser = argparse.ArgumentParser(
        prog="nevanlinna",
        description="Operator-valued Nevanlinna-Pick interpolation over test function families",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Decide solvability and write the Agler decomposition:
  nevanlinna solve problem.json --out results

  # Build the auxiliary function G and check its identities:
  nevanlinna build-g problem.json --decomposition results/decomposition.json --out results

  # Verify interpolants for the zero parameter and ten random contractions:
  nevanlinna verify problem.json --aux results/aux.json --params zero --params random:10:42

  # Everything at once on a generated bidisc instance:
  nevanlinna random-instance --domain bidisc --n 3 --d 2 --seed 7 --out inst
  nevanlinna run inst/problem.json --params colligation:5:1 --out inst

Exit status:
  0 success, 1 input error, 2 infeasible or unconverged, 3 verification failure
        """,
    )
    parser.add_argument("--version", action="version", version=f"nevanlinna {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="Search for an Agler decomposition")
    solve.add_argument("problem", help="Path to the problem file")
    _add_solver_flags(solve)
    _add_common(solve)

    build = commands.add_parser("build-g", help="Build the auxiliary function G")
    build.add_argument("problem", help="Path to the problem file")
    build.add_argument("--decomposition", required=True, help="Decomposition file from solve")
    build.add_argument("--tol", type=float, help="Largest accepted decomposition residual")
    _add_sampling_flags(build)
    _add_common(build)

    check = commands.add_parser("verify", help="Verify interpolants f_t")
    check.add_argument("problem", help="Path to the problem file")
    check.add_argument("--aux", required=True, help="Auxiliary function file from build-g")
    check.add_argument("--max-iter", type=int, help="Iteration limit of the round trip solve")
    _add_verify_flags(check)
    _add_sampling_flags(check)
    _add_common(check)

    instance = commands.add_parser("random-instance", help="Generate a solvable problem")
    instance.add_argument("--domain", choices=["disc", "bidisc"], default="bidisc")
    instance.add_argument("--n", type=int, default=3, help="Number of data points")
    instance.add_argument("--d", type=int, default=1, help="Size of the square targets")
    instance.add_argument("--seed", type=int, default=0, help="Seed of the instance")
    instance.add_argument(
        "--state-dims",
        type=_state_dims,
        metavar="A,B,...",
        help="State dimension per test function (default: 1 each)",
    )
    _add_common(instance)

    run = commands.add_parser("run", help="Solve, build G and verify in one go")
    run.add_argument("problem", help="Path to the problem file")
    _add_solver_flags(run)
    _add_verify_flags(run)
    _add_sampling_flags(run)
    _add_common(run)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> None:
    """Main entry point for the CLI."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        if args.command == "solve":
            status = cmd_solve(args.problem, args.out, args.tol, args.max_iter)
        elif args.command == "build-g":
            status = cmd_build_g(
                args.problem, args.decomposition, args.out, args.tol, args.samples, args.seed
            )
        elif args.command == "verify":
            status = cmd_verify(
                args.problem,
                args.aux,
                args.params,
                args.grid,
                args.out,
                args.samples,
                args.seed,
                args.max_iter,
            )
        elif args.command == "random-instance":
            status = cmd_random_instance(
                args.domain, args.n, args.d, args.seed, args.state_dims, args.out
            )
        else:
            status = cmd_run(
                args.problem,
                args.params,
                args.grid,
                args.out,
                args.tol,
                args.max_iter,
                args.samples,
                args.seed,
            )

    except FileNotFoundError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(EXIT_INPUT)

    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(EXIT_INPUT)

    except Exception as e:
        print(f"Unexpected error: {e}", file=sys.stderr)
        sys.exit(EXIT_INPUT)

    sys.exit(status)


if __name__ == "__main__":
    main()
