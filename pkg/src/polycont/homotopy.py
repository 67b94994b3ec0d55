"""Linear gamma-trick homotopy ``H = (1 - t) g + gamma t f`` and total-degree starts."""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from polycont import _engine
from polycont.polynomial import (
    DimensionError,
    Polynomial,
    PolynomialSystem,
    require_square,
    roots_of_unity,
)
from polycont.slp import SLPOverflowError, SLProgram, compile_magnitude, compile_system


def total_degree_start(target: PolynomialSystem) -> tuple[PolynomialSystem, list[np.ndarray]]:
    """Start system ``x_i^{d_i} - 1`` and all tuples of roots of unity solving it."""
    require_square(target)
    n = target.nvars
    degrees = target.degrees
    polys = []
    for k, d in enumerate(degrees):
        mono = [0] * n
        mono[k] = d
        polys.append(Polynomial(n, {tuple(mono): 1.0, (0,) * n: -1.0}))
    start = PolynomialSystem(target.variables, polys)
    roots = [roots_of_unity(d) for d in degrees]
    solutions = [np.array(p, dtype=complex) for p in itertools.product(*roots)]
    return start, solutions


def random_gamma(seed: int | None = None) -> complex:
    """Uniform draw from the unit circle."""
    theta = np.random.default_rng(seed).uniform(0.0, 2.0 * math.pi)
    return cmath.exp(1j * theta)


@dataclass(frozen=True, eq=False)
class Homotopy:
    start: PolynomialSystem
    target: PolynomialSystem
    gamma: complex
    start_program: SLProgram = field(repr=False)
    target_program: SLProgram = field(repr=False)
    magnitude_program: SLProgram = field(repr=False)

    @property
    def nvars(self) -> int:
        return self.target.nvars

    def kernel_args(self) -> tuple:
        return (
            self.start_program.as_kernel_args(),
            self.target_program.as_kernel_args(),
            self.gamma,
            self.magnitude_program.as_kernel_args(),
        )

    def workspace(self) -> tuple:
        """Scratch buffers for one evaluating thread."""
        return _engine.make_workspace(
            self.nvars, len(self.start_program), len(self.target_program), len(self.magnitude_program)
        )


def make_homotopy(start: PolynomialSystem, target: PolynomialSystem, gamma: complex = 1.0) -> Homotopy:
    if start.variables != target.variables:
        raise DimensionError(f"variable lists differ: {start.variables} vs {target.variables}")
    require_square(start)
    require_square(target)
    gamma = complex(gamma)
    if gamma == 0:
        raise ValueError("gamma must be nonzero")
    if not cmath.isfinite(gamma):
        raise ValueError("gamma must be finite")
    return Homotopy(
        start, target, gamma, compile_system(start), compile_system(target), compile_magnitude(target)
    )


def evaluate_homotopy(h: Homotopy, x, t: float, workspace: tuple | None = None):
    """Return ``(H, Hx, Ht)`` at ``(x, t)``."""
    x = np.ascontiguousarray(x, dtype=complex)
    if x.shape != (h.nvars,):
        raise DimensionError(f"expected {h.nvars} coordinates, got {x.shape}")
    ws = workspace if workspace is not None else h.workspace()
    if not _engine.eval_homotopy(h.kernel_args(), x, float(t), ws):
        raise SLPOverflowError("non-finite homotopy value")
    return ws[6].copy(), ws[7].copy(), ws[8].copy()
