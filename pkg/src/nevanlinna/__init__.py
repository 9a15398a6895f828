"""Operator-valued Nevanlinna-Pick interpolation over test function families."""

from .agler_solver import pick_matrix, residual, solve_decomposition
from .aux_function import AuxiliaryFunction, GValue, build_aux, central_interpolant, eval_G
from .colligation import Colligation, random_instance, realization_kernel, transfer_eval
from .cpkernel import CPKernel, kolmogorov_decompose
from .models import InterpolationProblem, SolveReport, VerificationReport
from .parametrizer import (
    ColligationParameter,
    ConstantParameter,
    SchurParameter,
    param_eval,
    verify,
)
from .testfam import TestFunctionFamily, make_builtin, recenter

__version__ = "0.1.0"

__all__ = [
    "AuxiliaryFunction",
    "CPKernel",
    "Colligation",
    "ColligationParameter",
    "ConstantParameter",
    "GValue",
    "InterpolationProblem",
    "SchurParameter",
    "SolveReport",
    "TestFunctionFamily",
    "VerificationReport",
    "build_aux",
    "central_interpolant",
    "eval_G",
    "kolmogorov_decompose",
    "make_builtin",
    "param_eval",
    "pick_matrix",
    "random_instance",
    "realization_kernel",
    "recenter",
    "residual",
    "solve_decomposition",
    "transfer_eval",
    "verify",
]
