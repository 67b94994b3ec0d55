"""Straight-line programs for evaluating a polynomial system and its Jacobian.

Polynomials are compiled through an extended Horner scheme: a polynomial is
split as ``p = q * x_k + r`` where ``r`` does not involve ``x_k``, and both
parts are compiled recursively.  Derivatives are appended by differentiating
each instruction forward, so one sweep yields values and the Jacobian.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from polycont import _engine
from polycont.parser import format_complex
from polycont.polynomial import DimensionError, Monomial, Polynomial, PolynomialSystem

OPCODES = {
    _engine.OP_CONST: "const",
    _engine.OP_INPUT: "input",
    _engine.OP_ADD: "add",
    _engine.OP_SUB: "sub",
    _engine.OP_MUL: "mul",
}


class SLPOverflowError(ArithmeticError):
    """A program produced a non-finite output."""


class SLPInstruction(NamedTuple):
    opcode: str
    operands: tuple
    result: int


@dataclass(frozen=True, eq=False)
class SLProgram:
    """Branch-free program; instruction ``k`` writes slot ``k``.

    ``jacobian_outputs`` is ``None`` until :func:`attach_jacobian` is applied.
    """

    ops: np.ndarray
    arg1: np.ndarray
    arg2: np.ndarray
    consts: np.ndarray
    input_arity: int
    value_outputs: np.ndarray
    jacobian_outputs: np.ndarray | None = None

    def __post_init__(self):
        for k, (op, a, b) in enumerate(zip(self.ops, self.arg1, self.arg2)):
            if op in (_engine.OP_ADD, _engine.OP_SUB, _engine.OP_MUL):
                if not (0 <= a < k and 0 <= b < k):
                    raise ValueError(f"instruction {k} reads a slot that is not yet written")
            elif op == _engine.OP_INPUT and not 0 <= a < self.input_arity:
                raise ValueError(f"instruction {k} reads input {a} out of range")
        outs = [self.value_outputs]
        if self.jacobian_outputs is not None:
            outs.append(self.jacobian_outputs.ravel())
        for o in outs:
            if len(o) and not (0 <= o.min() and o.max() < len(self.ops)):
                raise ValueError("output refers to an unwritten slot")
        for arr in (self.ops, self.arg1, self.arg2, self.consts, self.value_outputs):
            arr.setflags(write=False)

    def __len__(self) -> int:
        return len(self.ops)

    @property
    def has_jacobian(self) -> bool:
        return self.jacobian_outputs is not None

    @property
    def instructions(self) -> list[SLPInstruction]:
        out = []
        for k, (op, a, b) in enumerate(zip(self.ops.tolist(), self.arg1.tolist(), self.arg2.tolist())):
            if op == _engine.OP_CONST:
                operands = (complex(self.consts[a]),)
            elif op == _engine.OP_INPUT:
                operands = (a,)
            else:
                operands = (a, b)
            out.append(SLPInstruction(OPCODES[op], operands, k))
        return out

    def count(self, opcode: str) -> int:
        code = {v: k for k, v in OPCODES.items()}[opcode]
        return int(np.count_nonzero(self.ops == code))

    def workspace(self) -> np.ndarray:
        return np.empty(max(len(self.ops), 1), dtype=complex)

    def as_kernel_args(self) -> tuple:
        jac = self.jacobian_outputs
        if jac is None:
            jac = np.zeros((len(self.value_outputs), 0), dtype=np.int64)
        return (self.ops, self.arg1, self.arg2, self.consts, self.value_outputs, jac)

    def dump(self, variables: Sequence[str] | None = None) -> str:
        """One instruction per line as ``slot := op(args)``, then the outputs."""
        lines = []
        for ins in self.instructions:
            if ins.opcode == "const":
                args = format_complex(ins.operands[0])
            elif ins.opcode == "input":
                k = ins.operands[0]
                args = variables[k] if variables else str(k)
            else:
                args = ", ".join(map(str, ins.operands))
            lines.append(f"{ins.result} := {ins.opcode}({args})")
        for i, s in enumerate(self.value_outputs):
            lines.append(f"value[{i}] := {s}")
        if self.jacobian_outputs is not None:
            for (i, j), s in np.ndenumerate(self.jacobian_outputs):
                lines.append(f"jacobian[{i},{j}] := {s}")
        return "\n".join(lines) + "\n"


_ONE = -1  # structural derivative 1, never materialised unless needed


class _Builder:
    """Accumulates instructions, deduplicating identical ones."""

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.ops: list[int] = []
        self.arg1: list[int] = []
        self.arg2: list[int] = []
        self.consts: list[complex] = []
        self._const_idx: dict[complex, int] = {}
        self._memo: dict[tuple[int, int, int], int] = {}

    @classmethod
    def from_program(cls, slp: SLProgram) -> _Builder:
        b = cls(slp.input_arity)
        b.consts = [complex(c) for c in slp.consts]
        b._const_idx = {c: i for i, c in enumerate(b.consts)}
        for op, a1, a2 in zip(slp.ops.tolist(), slp.arg1.tolist(), slp.arg2.tolist()):
            b._emit(op, a1, a2)
        return b

    def _emit(self, op: int, a: int, b: int) -> int:
        key = (op, a, b)
        slot = self._memo.get(key)
        if slot is None:
            slot = len(self.ops)
            self.ops.append(op)
            self.arg1.append(a)
            self.arg2.append(b)
            self._memo[key] = slot
        return slot

    def const(self, c: complex) -> int:
        c = complex(c)
        idx = self._const_idx.get(c)
        if idx is None:
            idx = self._const_idx[c] = len(self.consts)
            self.consts.append(c)
        return self._emit(_engine.OP_CONST, idx, 0)

    def input(self, k: int) -> int:
        return self._emit(_engine.OP_INPUT, k, 0)

    def add(self, a: int, b: int) -> int:
        return self._emit(_engine.OP_ADD, min(a, b), max(a, b))

    def sub(self, a: int, b: int) -> int:
        return self._emit(_engine.OP_SUB, a, b)

    def mul(self, a: int, b: int) -> int:
        return self._emit(_engine.OP_MUL, min(a, b), max(a, b))

    def program(self, value_outputs, jacobian_outputs=None) -> SLProgram:
        jac = None
        if jacobian_outputs is not None:
            jac = np.array(jacobian_outputs, dtype=np.int64).reshape(len(value_outputs), self.nvars)
        return SLProgram(
            ops=np.array(self.ops, dtype=np.int64),
            arg1=np.array(self.arg1, dtype=np.int64),
            arg2=np.array(self.arg2, dtype=np.int64),
            consts=np.array(self.consts, dtype=complex),
            input_arity=self.nvars,
            value_outputs=np.array(value_outputs, dtype=np.int64),
            jacobian_outputs=jac,
        )


def frequency_order(sys: PolynomialSystem) -> list[int]:
    """Variables sorted by how many terms they occur in, most frequent first."""
    counts = Counter()
    for p in sys.polys:
        for mono in p.terms:
            counts.update(k for k, e in enumerate(mono) if e)
    return sorted(range(sys.nvars), key=lambda k: (-counts[k], k))


def _horner(b: _Builder, terms: dict[Monomial, complex], order: Sequence[int]) -> int:
    for k in order:
        if any(m[k] for m in terms):
            break
    else:
        return b.const(next(iter(terms.values())))
    quotient: dict[Monomial, complex] = {}
    rest: dict[Monomial, complex] = {}
    for m, c in terms.items():
        if m[k]:
            quotient[m[:k] + (m[k] - 1,) + m[k + 1 :]] = c
        else:
            rest[m] = c
    slot = b.mul(_horner(b, quotient, order), b.input(k))
    if rest:
        slot = b.add(slot, _horner(b, rest, order))
    return slot


def compile_horner(sys: PolynomialSystem, var_order: Sequence[int] | None = None) -> SLProgram:
    """Compile every polynomial of ``sys`` into one value-only program."""
    if var_order is None:
        var_order = frequency_order(sys)
    if sorted(var_order) != list(range(sys.nvars)):
        raise ValueError(f"{var_order} is not a permutation of the variables")
    b = _Builder(sys.nvars)
    outputs = []
    for p in sys.polys:
        outputs.append(_horner(b, dict(p.terms), var_order) if p.terms else b.const(0))
    return b.program(outputs)


def attach_jacobian(slp: SLProgram, sys: PolynomialSystem) -> SLProgram:
    """Append forward-mode derivative instructions for all partials."""
    if slp.input_arity != sys.nvars or len(slp.value_outputs) != len(sys.polys):
        raise DimensionError("program was not compiled from this system")
    b = _Builder.from_program(slp)
    nprimal = len(slp.ops)

    def materialise(d: int) -> int:
        return b.const(1) if d == _ONE else d

    def scaled(d: int, factor: int) -> int:
        return factor if d == _ONE else b.mul(d, factor)

    deriv: list[dict[int, int]] = []
    for k in range(nprimal):
        op, a, c = int(slp.ops[k]), int(slp.arg1[k]), int(slp.arg2[k])
        if op == _engine.OP_CONST:
            deriv.append({})
        elif op == _engine.OP_INPUT:
            deriv.append({a: _ONE})
        elif op in (_engine.OP_ADD, _engine.OP_SUB):
            da, dc = deriv[a], deriv[c]
            d = {}
            for j in sorted(da.keys() | dc.keys()):
                if j in da and j in dc:
                    x, y = materialise(da[j]), materialise(dc[j])
                    d[j] = b.add(x, y) if op == _engine.OP_ADD else b.sub(x, y)
                elif j in da:
                    d[j] = da[j]
                else:
                    d[j] = dc[j] if op == _engine.OP_ADD else b.sub(b.const(0), materialise(dc[j]))
            deriv.append(d)
        else:
            da, dc = deriv[a], deriv[c]
            d = {}
            for j in sorted(da.keys() | dc.keys()):
                if j in da and j in dc:
                    d[j] = b.add(scaled(da[j], c), scaled(dc[j], a))
                elif j in da:
                    d[j] = scaled(da[j], c)
                else:
                    d[j] = scaled(dc[j], a)
            deriv.append(d)

    jac = []
    for s in slp.value_outputs.tolist():
        for j in range(sys.nvars):
            d = deriv[s].get(j)
            jac.append(b.const(0) if d is None else materialise(d))
    return b.program(slp.value_outputs.tolist(), jac)


def compile_magnitude(sys: PolynomialSystem, var_order: Sequence[int] | None = None) -> SLProgram:
    """Value-only program for sum |c| * |x|^m; evaluate it at |x|."""
    absolute = PolynomialSystem(
        sys.variables,
        [Polynomial(p.nvars, {m: abs(c) for m, c in p.terms.items()}) for p in sys.polys],
    )
    return compile_horner(absolute, var_order)


def compile_system(sys: PolynomialSystem, var_order: Sequence[int] | None = None) -> SLProgram:
    """Horner program with Jacobian attached."""
    return attach_jacobian(compile_horner(sys, var_order), sys)


def evaluate_slp(slp: SLProgram, x, workspace: np.ndarray | None = None):
    """Run the program once; returns ``(values, jacobian)``.

    ``jacobian`` is ``None`` for a value-only program.  Pass a buffer from
    :meth:`SLProgram.workspace` to avoid allocating scratch per call.
    """
    x = np.ascontiguousarray(x, dtype=complex)
    if x.shape != (slp.input_arity,):
        raise DimensionError(f"expected {slp.input_arity} inputs, got {x.shape}")
    if workspace is None:
        workspace = slp.workspace()
    n = len(slp.value_outputs)
    values = np.empty(n, dtype=complex)
    jac = np.empty((n, slp.input_arity if slp.has_jacobian else 0), dtype=complex)
    if not _engine.eval_program(slp.as_kernel_args(), x, workspace, values, jac):
        raise SLPOverflowError("non-finite value in straight-line program output")
    return values, (jac if slp.has_jacobian else None)


def naive_multiplication_count(sys: PolynomialSystem) -> int:
    """Multiplications used by per-monomial evaluation: the sum of term degrees."""
    return sum(sum(m) for p in sys.polys for m in p.terms)
