"""Polynomial homotopy continuation in double precision."""

from polycont.homotopy import Homotopy, evaluate_homotopy, make_homotopy, random_gamma, total_degree_start
from polycont.linalg import SingularMatrix, inf_norm, lu_solve
from polycont.parser import PolySyntaxError, format_system, parse_complex, parse_points, parse_system
from polycont.polynomial import Polynomial, PolynomialSystem, evaluate_dense, ring, total_degree
from polycont.slp import SLProgram, attach_jacobian, compile_horner, compile_system, evaluate_slp
from polycont.tracker import (
    PathStatus,
    SolveResult,
    TrackedPath,
    TrackerSettings,
    correct,
    davidenko_rhs,
    predict,
    refine,
    solve_system,
    track,
    track_path,
)

__all__ = [
    "Homotopy",
    "PathStatus",
    "PolySyntaxError",
    "Polynomial",
    "PolynomialSystem",
    "SLProgram",
    "SingularMatrix",
    "SolveResult",
    "TrackedPath",
    "TrackerSettings",
    "attach_jacobian",
    "compile_horner",
    "compile_system",
    "correct",
    "davidenko_rhs",
    "evaluate_dense",
    "evaluate_homotopy",
    "evaluate_slp",
    "format_system",
    "inf_norm",
    "lu_solve",
    "make_homotopy",
    "parse_complex",
    "parse_points",
    "parse_system",
    "predict",
    "random_gamma",
    "refine",
    "ring",
    "solve_system",
    "total_degree",
    "total_degree_start",
    "track",
    "track_path",
]

__version__ = "0.1.0"
