"""Dense multivariate polynomials over the complex numbers.

A polynomial is stored as a map from exponent tuples to complex
coefficients ("dense" in the sense of fully expanded monomial form).
Zero coefficients are never stored.
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

Monomial = tuple[int, ...]


class DimensionError(ValueError):
    """Raised when a point or system has the wrong number of coordinates."""


def _check_finite(c: complex) -> complex:
    c = complex(c)
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise ValueError(f"non-finite coefficient {c!r}")
    return c


@dataclass(frozen=True)
class Polynomial:
    """Immutable polynomial in ``nvars`` variables.

    ``terms`` maps exponent tuples to nonzero complex coefficients.
    """

    nvars: int
    terms: Mapping[Monomial, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for mono, c in self.terms.items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != self.nvars:
                raise DimensionError(
                    f"monomial {mono} has {len(mono)} exponents, expected {self.nvars}"
                )
            if any(e < 0 for e in mono):
                raise ValueError(f"negative exponent in {mono}")
            c = _check_finite(c)
            if c != 0:
                clean[mono] = c
        object.__setattr__(self, "terms", clean)

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, nvars: int, c: complex) -> Polynomial:
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, k: int) -> Polynomial:
        mono = [0] * nvars
        mono[k] = 1
        return cls(nvars, {tuple(mono): 1.0})

    # -- properties -------------------------------------------------------

    @property
    def degree(self) -> int:
        """Maximum total degree; 0 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    # -- arithmetic (only what the parser and generators need) ------------

    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise DimensionError("polynomials live in different rings")
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return Polynomial.constant(self.nvars, complex(other))
        return NotImplemented

    def __add__(self, other) -> Polynomial:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Polynomial(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> Polynomial:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> Polynomial:
        return (-self) + other

    def __mul__(self, other) -> Polynomial:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Monomial, complex] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Polynomial:
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Polynomial.constant(self.nvars, 1.0)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def sorted_terms(self) -> list[tuple[Monomial, complex]]:
        """Terms in graded-lexicographic order, highest first."""
        return sorted(self.terms.items(), key=lambda mc: (sum(mc[0]), mc[0]), reverse=True)


@dataclass(frozen=True)
class PolynomialSystem:
    """A list of polynomials sharing one ordered variable list."""

    variables: tuple[str, ...]
    polys: tuple[Polynomial, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "polys", tuple(self.polys))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable names in {self.variables}")
        for p in self.polys:
            if p.nvars != len(self.variables):
                raise DimensionError(
                    f"polynomial in {p.nvars} variables, system has {len(self.variables)}"
                )

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(p.degree for p in self.polys)

    def is_square(self) -> bool:
        return len(self.polys) == len(self.variables)

    def __len__(self) -> int:
        return len(self.polys)

    def __iter__(self):
        return iter(self.polys)

    def __getitem__(self, i) -> Polynomial:
        return self.polys[i]

    def gens(self) -> list[Polynomial]:
        """The variables as polynomials, handy for building systems in code."""
        return [Polynomial.variable(self.nvars, k) for k in range(self.nvars)]

    def __str__(self) -> str:
        from polycont.parser import format_system

        return format_system(self)


def ring(*names: str) -> list[Polynomial]:
    """Return generator polynomials for the given variable names."""
    return [Polynomial.variable(len(names), k) for k in range(len(names))]


def require_square(sys: PolynomialSystem) -> None:
    if not sys.is_square():
        raise DimensionError(
            f"system has {len(sys.polys)} equations in {sys.nvars} unknowns; a square system is required"
        )
    for i, p in enumerate(sys.polys):
        if p.is_zero():
            raise ValueError(f"equation {i} is the zero polynomial")


def evaluate_dense(p: Polynomial, x: Sequence[complex]) -> complex:
    """Evaluate term by term: sum of coefficient times product of powers."""
    if len(x) != p.nvars:
        raise DimensionError(f"point has {len(x)} coordinates, expected {p.nvars}")
    x = [complex(v) for v in x]
    total = 0j
    for mono, c in p.terms.items():
        term = c
        for xi, e in zip(x, mono):
            for _ in range(e):
                term *= xi
        total += term
    return total


def evaluate_system_dense(sys: PolynomialSystem, x: Sequence[complex]) -> np.ndarray:
    return np.array([evaluate_dense(p, x) for p in sys.polys], dtype=complex)


def total_degree(sys: PolynomialSystem) -> int:
    """Bezout number: the product of the equation degrees."""
    require_square(sys)
    return math.prod(sys.degrees)


def roots_of_unity(d: int) -> list[complex]:
    # angle form keeps residuals at rounding level for large d
    return [cmath.exp(2j * math.pi * k / d) for k in range(d)]


def monomials_up_to(nvars: int, degree: int) -> Iterable[Monomial]:
    """All exponent tuples of total degree at most ``degree``."""
    if nvars == 0:
        yield ()
        return
    for e in range(degree, -1, -1):
        for rest in monomials_up_to(nvars - 1, degree - e):
            yield (e, *rest)
