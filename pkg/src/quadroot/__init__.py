"""Optimal fourth- and eighth-order quadrature-based root finders, with
comparison methods and a high-precision benchmark harness."""

from .analysis import coc, error_constant_m4, error_constant_m8, taylor_coefficients
from .mp_scalar import PrecisionContext, format_scientific, parse_scalar
from .problems import PROBLEMS, EvalCounter, Kind, Problem, evaluate, get_problem, reference_root
from .quadrature import approx_dfy, approx_dfz, solve_nu, solve_omega
from .solvers import MethodId, MethodParams, Status, StoppingCriteria, solve

__all__ = [
    "PROBLEMS", "EvalCounter", "Kind", "MethodId", "MethodParams", "PrecisionContext", "Problem",
    "Status", "StoppingCriteria", "approx_dfy", "approx_dfz", "coc", "error_constant_m4",
    "error_constant_m8", "evaluate", "format_scientific", "get_problem", "parse_scalar",
    "reference_root", "solve", "solve_nu", "solve_omega", "taylor_coefficients",
]
