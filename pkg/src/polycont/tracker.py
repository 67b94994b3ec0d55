"""Predictor-corrector path tracking and the black-box solver built on it."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numba import types
from numba.typed import List

from polycont import _engine
from polycont.homotopy import Homotopy, make_homotopy, random_gamma, total_degree_start
from polycont.linalg import SingularMatrix
from polycont.polynomial import DimensionError, PolynomialSystem, require_square
from polycont.slp import SLPOverflowError, compile_system

PREDICTORS = {"tangent": _engine.PRED_TANGENT, "rk4": _engine.PRED_RK4}

DEDUP_RTOL = 1e-4


@dataclass(frozen=True)
class TrackerSettings:
    """Step control for :func:`track_path`."""

    predictor: str = "rk4"
    initial_step: float = 0.05
    min_step: float = 1e-6
    max_step: float = 0.1
    corrector_tolerance: float = 1e-6
    max_corrector_iterations: int = 3
    step_increase_factor: float = 2.0
    step_decrease_factor: float = 0.5
    successes_before_increase: int = 3
    divergence_threshold: float = 1e6
    endpoint_tolerance: float = 1e-8

    def __post_init__(self):
        if self.predictor not in PREDICTORS:
            raise ValueError(f"unknown predictor {self.predictor!r}; choose from {sorted(PREDICTORS)}")
        if not 0 < self.min_step <= self.initial_step <= self.max_step <= 1:
            raise ValueError("need 0 < min_step <= initial_step <= max_step <= 1")
        if not 0 < self.step_decrease_factor < 1 < self.step_increase_factor:
            raise ValueError("need 0 < step_decrease_factor < 1 < step_increase_factor")
        for name in ("corrector_tolerance", "endpoint_tolerance", "divergence_threshold"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_corrector_iterations < 1 or self.successes_before_increase < 1:
            raise ValueError("iteration counts must be at least 1")

    def as_array(self) -> np.ndarray:
        order = [
            self.initial_step,
            self.min_step,
            self.max_step,
            self.corrector_tolerance,
            self.max_corrector_iterations,
            self.step_increase_factor,
            self.step_decrease_factor,
            self.successes_before_increase,
            self.divergence_threshold,
            self.endpoint_tolerance,
            PREDICTORS[self.predictor],
        ]
        return np.array(order, dtype=np.float64)


@dataclass(frozen=True)
class PathStatus:
    tag: str
    t_fail: float | None = None

    REGULAR = "Regular"
    MIN_STEP = "MinStepFailure"
    INFINITY = "Infinity"
    SINGULAR = "SingularEndpoint"
    NUMERICAL = "NumericalFailure"

    @property
    def is_regular(self) -> bool:
        return self.tag == self.REGULAR

    @property
    def reached_end(self) -> bool:
        return self.tag in (self.REGULAR, self.SINGULAR)

    def __str__(self) -> str:
        if self.t_fail is None:
            return self.tag
        return f"{self.tag}(t={self.t_fail:.4g})"

    def marker(self) -> str:
        """Short form in the style ``[M,t=.04762]``."""
        letter = {self.MIN_STEP: "M", self.INFINITY: "I", self.NUMERICAL: "N", self.SINGULAR: "S"}[self.tag]
        if self.t_fail is None:
            return f"[{letter}]"
        return f"[{letter},t={self.t_fail:.4g}]"


_STATUS_FROM_CODE = {
    _engine.REGULAR: PathStatus.REGULAR,
    _engine.MIN_STEP: PathStatus.MIN_STEP,
    _engine.INFINITY: PathStatus.INFINITY,
    _engine.SINGULAR_END: PathStatus.SINGULAR,
    _engine.NUMERICAL: PathStatus.NUMERICAL,
}


@dataclass(frozen=True, eq=False)
class TrackedPath:
    start_point: np.ndarray
    end_point: np.ndarray
    status: PathStatus
    residual: float
    steps_taken: int
    newton_iterations_total: int
    step_history: tuple[tuple[float, float], ...] | None = field(default=None, repr=False)


def _point(x, n: int) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=complex)
    if x.shape != (n,):
        raise DimensionError(f"expected {n} coordinates, got shape {x.shape}")
    return x


# -- single steps -------------------------------------------------------------


def davidenko_rhs(h: Homotopy, x, t: float, workspace=None) -> np.ndarray:
    """Tangent of the path through (x, t): solves Hx dx/dt = -Ht."""
    x = _point(x, h.nvars)
    ws = workspace if workspace is not None else h.workspace()
    out = np.empty_like(x)
    evaluated, solved = _engine.davidenko(h.kernel_args(), x, float(t), ws, out)
    if not evaluated:
        raise SLPOverflowError("non-finite homotopy value")
    if not solved:
        raise SingularMatrix(f"homotopy Jacobian is singular at t={t}")
    return out


def predict(h: Homotopy, x, t: float, dt: float, predictor: str = "rk4", workspace=None) -> np.ndarray:
    """Predicted point at ``t + dt``; ``predictor`` is ``"tangent"`` or ``"rk4"``."""
    x = _point(x, h.nvars)
    if not dt > 0 or t + dt > 1 + 1e-15:
        raise ValueError("need dt > 0 and t + dt <= 1")
    ws = workspace if workspace is not None else h.workspace()
    out = np.empty_like(x)
    evaluated, solved = _engine.predict(h.kernel_args(), x, float(t), float(dt), PREDICTORS[predictor], ws, out)
    if not evaluated:
        raise SLPOverflowError("non-finite homotopy value during prediction")
    if not solved:
        raise SingularMatrix("singular Jacobian during prediction")
    return out


def correct(h: Homotopy, x, t: float, settings: TrackerSettings | None = None, workspace=None):
    """Newton at fixed t. Returns ``(point, converged, iterations)``."""
    settings = settings or TrackerSettings()
    x = _point(x, h.nvars)
    ws = workspace if workspace is not None else h.workspace()
    out = np.empty_like(x)
    converged, iterations, _ = _engine.correct(
        h.kernel_args(),
        x,
        float(t),
        settings.corrector_tolerance,
        settings.max_corrector_iterations,
        ws,
        out,
    )
    return out, bool(converged), int(iterations)


# -- paths --------------------------------------------------------------------


def _new_history():
    return List.empty_list(types.float64)


def _run_path(h: Homotopy, args: tuple, x0, settings_arr: np.ndarray, ws, record: bool) -> TrackedPath:
    try:
        x0 = _point(x0, h.nvars)
    except (DimensionError, TypeError, ValueError):
        bad = np.asarray(x0, dtype=object)
        return TrackedPath(bad, bad, PathStatus(PathStatus.NUMERICAL, 0.0), math.inf, 0, 0)
    if not np.all(np.isfinite(x0)):
        return TrackedPath(x0, x0.copy(), PathStatus(PathStatus.NUMERICAL, 0.0), math.inf, 0, 0)
    history = _new_history()
    end, code, t_fail, steps, newton, residual = _engine.track_path(args, x0, settings_arr, ws, record, history)
    tag = _STATUS_FROM_CODE[code]
    status = PathStatus(tag, None if code in (_engine.REGULAR, _engine.SINGULAR_END) else float(t_fail))
    hist = None
    if record:
        flat = list(history)
        hist = tuple(zip(flat[0::2], flat[1::2]))
    return TrackedPath(x0.copy(), end, status, float(residual), int(steps), int(newton), hist)


def track_path(h: Homotopy, x0, settings: TrackerSettings | None = None, *, record_steps: bool = False) -> TrackedPath:
    """Follow the path starting at ``x0`` from t=0 to t=1.

    Failures are reported in the returned status, never raised.
    """
    settings = settings or TrackerSettings()
    return _run_path(h, h.kernel_args(), x0, settings.as_array(), h.workspace(), record_steps)


def track_homotopy(
    h: Homotopy,
    start_solutions: Sequence,
    settings: TrackerSettings | None = None,
    threads: int = 1,
) -> list[TrackedPath]:
    """Track every start solution; output order follows input order.

    Paths share nothing mutable, so the result does not depend on ``threads``.
    """
    settings = settings or TrackerSettings()
    args = h.kernel_args()
    sarr = settings.as_array()
    starts = list(start_solutions)
    if not starts:
        return []

    def run_chunk(chunk):
        ws = h.workspace()
        return [_run_path(h, args, x0, sarr, ws, False) for x0 in chunk]

    threads = max(1, min(int(threads), len(starts)))
    if threads == 1:
        return run_chunk(starts)
    bounds = np.linspace(0, len(starts), threads + 1).astype(int)
    chunks = [starts[a:b] for a, b in zip(bounds[:-1], bounds[1:])]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(run_chunk, chunks))
    return [p for chunk in results for p in chunk]


def track(
    start: PolynomialSystem,
    target: PolynomialSystem,
    start_solutions: Sequence,
    gamma: complex = 1.0,
    settings: TrackerSettings | None = None,
    threads: int = 1,
) -> list[TrackedPath]:
    """Track ``(1 - t) start + gamma t target`` from the given start solutions."""
    return track_homotopy(make_homotopy(start, target, gamma), start_solutions, settings, threads)


# -- refinement and solving ---------------------------------------------------


def refine(system: PolynomialSystem, approx, tolerance: float = 1e-12, max_iterations: int = 30, program=None):
    """Newton-polish ``approx`` against ``system``. Returns ``(point, converged)``."""
    require_square(system)
    prog = program if program is not None else compile_system(system)
    x = _point(approx, system.nvars)
    n = system.nvars
    out = np.empty_like(x)
    converged, _, _ = _engine.refine_target(
        prog.as_kernel_args(),
        x,
        float(tolerance),
        int(max_iterations),
        prog.workspace(),
        np.empty(n, complex),
        np.empty((n, n), complex),
        np.empty((n, n), complex),
        np.empty(n, np.int64),
        np.empty(n),
        np.empty(n, complex),
        out,
    )
    return out, bool(converged)


@dataclass(frozen=True, eq=False)
class Solution:
    point: np.ndarray
    status: PathStatus
    residual: float
    steps: int
    path_index: int
    multiplicity: int = 1


@dataclass(frozen=True, eq=False)
class SolveResult:
    """Distinct endpoints plus the per-path record they came from.

    ``len(solutions) + failures + duplicates == len(paths)``.
    """

    solutions: list[Solution]
    paths: list[TrackedPath]
    gamma: complex
    failures: int
    duplicates: int

    @property
    def regular_solutions(self) -> list[Solution]:
        return [s for s in self.solutions if s.status.is_regular]

    def points(self, regular_only: bool = True) -> np.ndarray:
        sols = self.regular_solutions if regular_only else self.solutions
        if not sols:
            return np.empty((0, len(self.paths[0].start_point) if self.paths else 0), dtype=complex)
        return np.array([s.point for s in sols])

    @property
    def all_regular(self) -> bool:
        return all(p.status.is_regular for p in self.paths)


def same_point(a, b, rtol: float = DEDUP_RTOL) -> bool:
    a = np.asarray(a)
    return float(np.max(np.abs(a - np.asarray(b)))) <= rtol * max(1.0, float(np.max(np.abs(a))))


def deduplicate(paths: Sequence[TrackedPath], rtol: float = DEDUP_RTOL) -> tuple[list[Solution], int]:
    """Collapse endpoints that agree to ``rtol``; keep the smallest residual.

    Returns the distinct solutions in path order and the number collapsed.
    """
    finished = [i for i, p in enumerate(paths) if p.status.reached_end]
    finished.sort(key=lambda i: (paths[i].residual, i))
    reps: list[int] = []
    counts: list[int] = []
    rep_points = np.empty((0, 0), dtype=complex)
    for i in finished:
        x = paths[i].end_point
        if reps:
            diff = np.max(np.abs(rep_points - x), axis=1)
            scale = np.maximum(1.0, np.max(np.abs(rep_points), axis=1))
            hit = np.flatnonzero(diff <= rtol * scale)
            if hit.size:
                counts[hit[0]] += 1
                continue
            rep_points = np.vstack([rep_points, x])
        else:
            rep_points = x[None, :].copy()
        reps.append(i)
        counts.append(1)
    order = sorted(range(len(reps)), key=lambda k: reps[k])
    solutions = []
    for k in order:
        p = paths[reps[k]]
        solutions.append(Solution(p.end_point, p.status, p.residual, p.steps_taken, reps[k], counts[k]))
    return solutions, len(finished) - len(reps)


def summarize(paths: list[TrackedPath], gamma: complex) -> SolveResult:
    solutions, duplicates = deduplicate(paths)
    failures = sum(not p.status.reached_end for p in paths)
    return SolveResult(solutions, paths, gamma, failures, duplicates)


def solve_system(
    target: PolynomialSystem,
    seed: int | None = None,
    settings: TrackerSettings | None = None,
    threads: int = 1,
) -> SolveResult:
    """Total-degree homotopy with a random unit-circle gamma drawn from ``seed``."""
    require_square(target)
    start, start_solutions = total_degree_start(target)
    gamma = random_gamma(seed)
    paths = track(start, target, start_solutions, gamma, settings, threads)
    return summarize(paths, gamma)
