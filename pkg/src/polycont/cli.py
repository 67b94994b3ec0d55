"""Command-line front end.

Exit codes: 0 when every path is Regular (or every point converged), 1 when
numerical failures are present, 2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from polycont import bench
from polycont.homotopy import random_gamma
from polycont.parser import PolySyntaxError, format_system, parse_complex, parse_points, parse_system
from polycont.polynomial import DimensionError, PolynomialSystem, require_square
from polycont.slp import SLPOverflowError, compile_system, evaluate_slp
from polycont.tracker import (
    SolveResult,
    TrackedPath,
    TrackerSettings,
    deduplicate,
    refine,
    solve_system,
    summarize,
    track,
)

EXIT_OK, EXIT_NUMERICAL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


# -- formatting ---------------------------------------------------------------


def _pair(c: complex) -> list[float]:
    return [float(c.real), float(c.imag)]


def _short(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return f"{c.real:.4g}"
    if c.real == 0:
        return f"{c.imag:.4g}*i"
    sign = "-" if c.imag < 0 else "+"
    return f"{c.real:.4g}{sign}{abs(c.imag):.4g}*i"


def _point_text(x) -> str:
    # display only: parts below roundoff relative to the point read as 0
    x = np.asarray(x, dtype=complex)
    floor = 1e-14 * max(1.0, float(np.max(np.abs(x)))) if x.size else 0.0
    re = np.where(np.abs(x.real) < floor, 0.0, x.real)
    im = np.where(np.abs(x.imag) < floor, 0.0, x.imag)
    return "{" + ", ".join(_short(complex(a, b)) for a, b in zip(re, im)) + "}"


def _finite(r: float) -> float | None:
    return float(r) if np.isfinite(r) else None


def _entry(point, status, residual, steps) -> dict:
    d = {
        "point": [_pair(c) for c in point],
        "status": status.tag,
        "residual": _finite(residual),
        "steps": int(steps),
    }
    if status.t_fail is not None:
        d["t_fail"] = status.t_fail
    return d


def _report(gamma, entries, failures, duplicates, wall_time) -> dict:
    return {
        "gamma": _pair(complex(gamma)),
        "solutions": entries,
        "failures": int(failures),
        "duplicates": int(duplicates),
        "wall_time_s": wall_time,
    }


def _emit_json(report: dict) -> None:
    print(json.dumps(report))


def _print_solutions(result: SolveResult, wall_time: float) -> None:
    print(f"gamma = {_short(result.gamma)}")
    for k, s in enumerate(result.solutions, start=1):
        print(f"{k:4d}  {s.status.tag:16s}  res={s.residual:.2e}  steps={s.steps:<4d}  {_point_text(s.point)}")
    for p in result.paths:
        if not p.status.reached_end:
            print(f"      {p.status.marker()}  from {_point_text(p.start_point)}")
    print(
        f"{len(result.solutions)} solutions, {result.failures} failed paths, "
        f"{result.duplicates} duplicates, {wall_time:.3f} s"
    )


# -- inputs -------------------------------------------------------------------


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def _load_system(path: str) -> PolynomialSystem:
    try:
        system = parse_system(_read(path))
        require_square(system)
    except PolySyntaxError as exc:
        raise InputError(f"{path}: {exc}") from exc
    except (DimensionError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc
    return system


def _load_points(path: str, n: int) -> list[np.ndarray]:
    try:
        points = parse_points(_read(path))
    except PolySyntaxError as exc:
        raise InputError(f"{path}: {exc}") from exc
    for k, p in enumerate(points, start=1):
        if len(p) != n:
            raise InputError(f"{path}: point {k} has {len(p)} coordinates, expected {n}")
    return [np.array(p, dtype=complex) for p in points]


def _settings(args) -> TrackerSettings:
    kw = {}
    for name in ("initial_step", "min_step", "max_step"):
        value = getattr(args, name, None)
        if value is not None:
            kw[name] = value
    if getattr(args, "tol", None) is not None:
        kw["endpoint_tolerance"] = args.tol
    if getattr(args, "predictor", None):
        kw["predictor"] = args.predictor
    try:
        return TrackerSettings(**kw)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _gamma(text: str, seed) -> complex:
    if text == "random":
        return random_gamma(seed)
    try:
        g = parse_complex(text)
    except PolySyntaxError as exc:
        raise InputError(f"--gamma: {exc}") from exc
    if g == 0:
        raise InputError("--gamma must be nonzero")
    return g


# -- commands -----------------------------------------------------------------


def _finish_solve(args, result: SolveResult, wall_time: float) -> int:
    if args.json:
        entries = [_entry(s.point, s.status, s.residual, s.steps) for s in result.solutions]
        _emit_json(_report(result.gamma, entries, result.failures, result.duplicates, wall_time))
    else:
        _print_solutions(result, wall_time)
    return EXIT_OK if result.all_regular else EXIT_NUMERICAL


def _wall(args, t0: float) -> float:
    return 0.0 if args.no_timing else time.perf_counter() - t0


def cmd_solve(args) -> int:
    system = _load_system(args.file)
    if args.dump_slp:
        print(compile_system(system).dump(system.variables), end="")
        return EXIT_OK
    t0 = time.perf_counter()
    result = solve_system(system, args.seed, _settings(args), args.threads)
    return _finish_solve(args, result, _wall(args, t0))


def cmd_track(args) -> int:
    start = _load_system(args.start)
    target = _load_system(args.target)
    if start.variables != target.variables:
        raise InputError("start and target systems must declare the same variables")
    points = _load_points(args.solutions, target.nvars)
    gamma = _gamma(args.gamma, args.seed)
    settings = _settings(args)
    if args.dump_slp:
        print(compile_system(target).dump(target.variables), end="")
        return EXIT_OK
    t0 = time.perf_counter()
    paths = track(start, target, points, gamma, settings, args.threads)
    wall = _wall(args, t0)
    _, duplicates = deduplicate(paths)
    failures = sum(not p.status.reached_end for p in paths)
    if args.json:
        entries = [_entry(p.end_point, p.status, p.residual, p.steps_taken) for p in paths]
        _emit_json(_report(gamma, entries, failures, duplicates, wall))
    else:
        print(f"gamma = {_short(gamma)}")
        print("{" + ", ".join(_path_text(p) for p in paths) + "}")
        print(f"{len(paths)} paths, {failures} failed, {duplicates} duplicates, {wall:.3f} s")
    return EXIT_OK if all(p.status.is_regular for p in paths) else EXIT_NUMERICAL


def _path_text(p: TrackedPath) -> str:
    if p.status.is_regular:
        return _point_text(p.end_point)
    if p.status.reached_end:
        return p.status.marker() + _point_text(p.end_point)
    return p.status.marker()


def cmd_refine(args) -> int:
    system = _load_system(args.file)
    points = _load_points(args.solutions, system.nvars)
    tol = args.tol if args.tol is not None else 1e-12
    prog = compile_system(system)
    t0 = time.perf_counter()
    results = [refine(system, p, tol, program=prog) for p in points]
    wall = _wall(args, t0)
    failures = sum(not ok for _, ok in results)
    if args.json:
        entries = [
            {
                "point": [_pair(c) for c in x],
                "status": "Regular" if ok else "NotConverged",
                "residual": _finite(_residual(prog, x)),
                "steps": 0,
            }
            for x, ok in results
        ]
        _emit_json(_report(1.0, entries, failures, 0, wall))
    else:
        for x, ok in results:
            flag = "converged" if ok else "NOT converged"
            print(f"{_point_text(x)}  {flag}")
    return EXIT_OK if failures == 0 else EXIT_NUMERICAL


def _residual(prog, x) -> float:
    try:
        return float(np.max(np.abs(evaluate_slp(prog, x)[0])))
    except SLPOverflowError:
        return math.inf


def cmd_bench(args) -> int:
    if args.seed is None:
        args.seed = 0
    try:
        spec = bench.BenchmarkSpec(args.family, args.n, args.d if args.d is not None else 2, args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if args.family == "random" and args.d is None:
        raise InputError("bench random needs both N and D")
    target, start, start_solutions = bench.build(spec)
    if args.dump_system:
        print(format_system(target), end="")
        return EXIT_OK
    if args.dump_slp:
        print(compile_system(target).dump(target.variables), end="")
        return EXIT_OK
    settings = _settings(args)
    t0 = time.perf_counter()
    if start is None:
        result = solve_system(target, args.seed, settings, args.threads)
    else:
        gamma = random_gamma(args.seed)
        result = summarize(track(start, target, start_solutions, gamma, settings, args.threads), gamma)
    wall = _wall(args, t0)
    code = _finish_solve(args, result, wall)
    if not args.json:
        print(
            f"bench {args.family} n={spec.n}"
            + (f" d={spec.d}" if args.family == "random" else "")
            + f": {len(result.regular_solutions)} regular solutions"
            f" (expected {spec.expected_solutions}), {len(result.paths)} paths, {wall:.3f} s"
        )
    return code


# -- argument parsing ---------------------------------------------------------


def _add_tracking_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="seed for the random gamma")
    p.add_argument("--predictor", choices=["tangent", "rk4"], default=None)
    p.add_argument("--initial-step", type=float, default=None)
    p.add_argument("--min-step", type=float, default=None)
    p.add_argument("--max-step", type=float, default=None)
    p.add_argument("--tol", type=float, default=None, help="endpoint tolerance")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--dump-slp", action="store_true", help="print the target program and exit")


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true")
    p.add_argument("--no-timing", action="store_true", help="report wall time as 0 for reproducible output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polycont", description="Polynomial homotopy continuation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a square system with a total-degree homotopy")
    p.add_argument("file")
    _add_tracking_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("track", help="track given start solutions from START to TARGET")
    p.add_argument("start")
    p.add_argument("target")
    p.add_argument("solutions")
    p.add_argument("--gamma", default="1", help="a+bi literal or 'random' (default 1)")
    _add_tracking_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("refine", help="Newton-polish points against a system")
    p.add_argument("file")
    p.add_argument("solutions")
    p.add_argument("--tol", type=float, default=None)
    _add_output_flags(p)
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("bench", help="generate and solve a benchmark system")
    p.add_argument("family", choices=["random", "katsura", "gevp"])
    p.add_argument("n", type=int)
    p.add_argument("d", type=int, nargs="?", default=None, help="degree (random family only)")
    p.add_argument("--dump-system", action="store_true", help="print the generated system and exit")
    _add_tracking_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
