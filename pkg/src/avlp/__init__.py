"""Toolkit for linear programs with absolute values: problems of the form
max c^T x subject to Ax - D|x| <= b with D >= 0."""

from .core import (
    AvlpProblem,
    DimensionError,
    RawProblem,
    SignVector,
    membership,
    normalize,
    orthant_restriction,
    sgn,
)
from .exact import (
    SolveReport,
    SolveStatus,
    find_feasible_point,
    relaxation_bound,
    solve_exact,
    vertex_candidacy,
)
from .simplex import LinearProgram, LpOutcome, LpStatus, SimplexError, solve_lp

__all__ = [
    "AvlpProblem",
    "DimensionError",
    "LinearProgram",
    "LpOutcome",
    "LpStatus",
    "RawProblem",
    "SignVector",
    "SimplexError",
    "SolveReport",
    "SolveStatus",
    "find_feasible_point",
    "membership",
    "normalize",
    "orthant_restriction",
    "relaxation_bound",
    "sgn",
    "solve_exact",
    "solve_lp",
    "vertex_candidacy",
]

__version__ = "0.1.0"
