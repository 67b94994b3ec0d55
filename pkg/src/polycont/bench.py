"""Benchmark families: random dense systems, Katsura, generalized eigenproblems."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from polycont.polynomial import Polynomial, PolynomialSystem, monomials_up_to


@dataclass(frozen=True)
class BenchmarkSpec:
    family: str  # "random", "katsura" or "gevp"
    n: int
    d: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.family not in ("random", "katsura", "gevp"):
            raise ValueError(f"unknown benchmark family {self.family!r}")
        if self.n < 1 or self.d < 1:
            raise ValueError("n and d must be at least 1")

    @property
    def expected_solutions(self) -> int:
        if self.family == "random":
            return self.d**self.n
        if self.family == "katsura":
            return 2 ** (self.n - 1)
        return self.n


def _complex_normal(rng: np.random.Generator, size) -> np.ndarray:
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / math.sqrt(2.0)


def random_dense(n: int, d: int, seed: int = 0) -> PolynomialSystem:
    """n polynomials in n variables with every monomial of degree <= d present."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be at least 1")
    rng = np.random.default_rng(seed)
    monos = list(monomials_up_to(n, d))
    polys = []
    for _ in range(n):
        coeffs = _complex_normal(rng, len(monos))
        polys.append(Polynomial(n, dict(zip(monos, coeffs))))
    return PolynomialSystem(tuple(f"x{k + 1}" for k in range(n)), polys)


def katsura(n: int) -> PolynomialSystem:
    """Katsura system in u0..u_{n-1}: n-1 quadratic equations, then the linear one."""
    if n < 1:
        raise ValueError("n must be at least 1")
    m = n - 1
    u = [Polynomial.variable(n, k) for k in range(n)]

    def var(k: int) -> Polynomial | None:
        k = abs(k)
        return u[k] if k <= m else None

    polys = []
    for i in range(m):
        p = -u[i]
        for j in range(-m, m + 1):
            a, b = var(j), var(i - j)
            if a is not None and b is not None:
                p = p + a * b
        polys.append(p)
    linear = u[0] - 1.0
    for j in range(1, m + 1):
        linear = linear + 2.0 * u[j]
    polys.append(linear)
    return PolynomialSystem(tuple(f"u{k}" for k in range(n)), polys)


def gevp_data(n: int, seed: int = 0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Random complex Gaussian A, B and normalization row c (no zero entries)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    A = _complex_normal(rng, (n, n))
    B = _complex_normal(rng, (n, n))
    c = _complex_normal(rng, n)
    while np.any(np.abs(c) < 1e-3):
        small = np.abs(c) < 1e-3
        c[small] = _complex_normal(rng, int(small.sum()))
    return A, B, c


def _gevp_system(A: np.ndarray, B: np.ndarray, c: np.ndarray) -> PolynomialSystem:
    n = len(c)
    nv = n + 1
    v = [Polynomial.variable(nv, k) for k in range(n)]
    lam = Polynomial.variable(nv, n)
    polys = []
    for i in range(n):
        p = Polynomial(nv)
        for j in range(n):
            p = p + complex(A[i, j]) * v[j] - complex(B[i, j]) * (lam * v[j])
        polys.append(p)
    norm = Polynomial.constant(nv, -1.0)
    for j in range(n):
        norm = norm + complex(c[j]) * v[j]
    polys.append(norm)
    return PolynomialSystem(tuple(f"v{k + 1}" for k in range(n)) + ("lam",), polys)


def gevp(n: int, seed: int = 0, A=None, B=None, c=None):
    """``A v = lam B v`` with ``c . v = 1``, plus a start pair with exactly n solutions.

    Returns ``(target, start, start_solutions)``.  The start system uses
    ``diag(1..n)`` and the identity, whose solutions are ``lam = k``,
    ``v = e_k / c_k``.  Any of ``A``, ``B``, ``c`` may be supplied to
    override the random draw.
    """
    A0, B0, c0 = gevp_data(n, seed)
    A = A0 if A is None else np.asarray(A, dtype=complex)
    B = B0 if B is None else np.asarray(B, dtype=complex)
    c = c0 if c is None else np.asarray(c, dtype=complex)
    if A.shape != (n, n) or B.shape != (n, n) or c.shape != (n,):
        raise ValueError("matrix shapes do not match n")
    if np.any(c == 0):
        raise ValueError("normalization row must have no zero entries")
    target = _gevp_system(A, B, c)
    start = _gevp_system(np.diag(np.arange(1.0, n + 1)), np.eye(n), c)
    start_solutions = []
    for k in range(n):
        x = np.zeros(n + 1, dtype=complex)
        x[k] = 1.0 / c[k]
        x[n] = k + 1
        start_solutions.append(x)
    return target, start, start_solutions


def build(spec: BenchmarkSpec):
    """Return ``(target, start, start_solutions)``; start parts are None for total-degree families."""
    if spec.family == "random":
        return random_dense(spec.n, spec.d, spec.seed), None, None
    if spec.family == "katsura":
        return katsura(spec.n), None, None
    return gevp(spec.n, spec.seed)
