"""Text format for polynomial systems.

Grammar (one statement per line, ``#`` starts a comment)::

    ring v1, v2, ..., vn
    poly <expr>
    ...

    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' INT)*          right-associative, literal exponents only
    atom   := NUMBER | NUMBER 'i' | 'i' | IDENT | '(' expr ')'

``i`` is reserved for the imaginary unit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from polycont.polynomial import Polynomial, PolynomialSystem

IMAGINARY_UNIT = "i"

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*^(),])
    """,
    re.VERBOSE,
)


class PolySyntaxError(ValueError):
    """Malformed input; carries 1-based line and column."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass
class _Token:
    kind: str  # number, imag, ident, op, end
    text: str
    col: int


def _tokenize(text: str, line: int, col0: int) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise PolySyntaxError(f"unexpected character {text[pos]!r}", line, col0 + pos)
        kind = m.lastgroup
        if kind == "number":
            # a literal glued to the imaginary unit, e.g. 2.5i
            end = m.end()
            if text.startswith(IMAGINARY_UNIT, end) and not re.match(
                r"[A-Za-z_0-9]", text[end + 1 : end + 2]
            ):
                tokens.append(_Token("imag", m.group(), col0 + pos))
                pos = end + 1
                continue
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), col0 + pos))
        pos = m.end()
    tokens.append(_Token("end", "", col0 + len(text)))
    return tokens


class _ExprParser:
    def __init__(self, tokens: list[_Token], variables: dict[str, int], line: int):
        self.tokens = tokens
        self.pos = 0
        self.variables = variables
        self.nvars = len(variables)
        self.line = line

    def error(self, msg: str, tok: _Token | None = None):
        tok = tok or self.peek()
        raise PolySyntaxError(msg, self.line, tok.col)

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def accept(self, text: str) -> bool:
        tok = self.peek()
        if tok.kind == "op" and tok.text == text:
            self.pos += 1
            return True
        return False

    def parse(self) -> Polynomial:
        p = self.expr()
        if self.peek().kind != "end":
            self.error(f"unexpected {self.peek().text!r}")
        return p

    def expr(self) -> Polynomial:
        p = self.term()
        while True:
            if self.accept("+"):
                p = p + self.term()
            elif self.accept("-"):
                p = p - self.term()
            else:
                return p

    def term(self) -> Polynomial:
        p = self.unary()
        while self.accept("*"):
            p = p * self.unary()
        return p

    def unary(self) -> Polynomial:
        if self.accept("-"):
            return -self.unary()
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.peek().text != "^":
            return base
        return base ** self.exponent()

    def exponent(self) -> int:
        self.take()  # '^'
        tok = self.take()
        if tok.kind != "number" or not tok.text.isdigit():
            self.error("exponent must be a non-negative integer literal", tok)
        e = int(tok.text)
        if self.peek().text == "^":
            e = e ** self.exponent()
        return e

    def atom(self) -> Polynomial:
        tok = self.take()
        if tok.kind == "number":
            return Polynomial.constant(self.nvars, float(tok.text))
        if tok.kind == "imag":
            return Polynomial.constant(self.nvars, complex(0.0, float(tok.text)))
        if tok.kind == "ident":
            if tok.text == IMAGINARY_UNIT:
                return Polynomial.constant(self.nvars, 1j)
            if tok.text not in self.variables:
                self.error(f"unknown identifier {tok.text!r}", tok)
            return Polynomial.variable(self.nvars, self.variables[tok.text])
        if tok.kind == "op" and tok.text == "(":
            p = self.expr()
            if not self.accept(")"):
                self.error("expected ')'")
            return p
        if tok.kind == "end":
            self.error("unexpected end of expression", tok)
        self.error(f"unexpected {tok.text!r}", tok)


def parse_expression(text: str, variables=(), line: int = 1, column: int = 1) -> Polynomial:
    """Parse one expression in the given variables."""
    varmap = {v: k for k, v in enumerate(variables)}
    return _ExprParser(_tokenize(text, line, column), varmap, line).parse()


def parse_complex(text: str, line: int = 1, column: int = 1) -> complex:
    """Parse a constant expression such as ``0.6+0.8*i`` or ``-3i``."""
    p = parse_expression(text, (), line, column)
    return p.terms.get((), 0j)


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0]


def parse_system(text: str) -> PolynomialSystem:
    variables: list[str] | None = None
    polys = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        stripped = line.strip()
        keyword, _, rest = stripped.partition(" ")
        rest_col = indent + len(keyword) + 2 + (len(rest) - len(rest.lstrip()))
        rest = rest.strip()
        if variables is None:
            if keyword != "ring":
                raise PolySyntaxError("expected 'ring' declaration", lineno, indent + 1)
            variables = _parse_ring(rest, lineno, rest_col)
        elif keyword == "poly":
            if not rest:
                raise PolySyntaxError("empty polynomial", lineno, rest_col)
            polys.append(parse_expression(rest, variables, lineno, rest_col))
        else:
            raise PolySyntaxError(f"unknown statement {keyword!r}", lineno, indent + 1)
    if variables is None:
        raise PolySyntaxError("missing 'ring' declaration", 1, 1)
    return PolynomialSystem(tuple(variables), tuple(polys))


def _parse_ring(rest: str, lineno: int, col: int) -> list[str]:
    names = [n.strip() for n in rest.split(",")]
    for n in names:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", n):
            raise PolySyntaxError(f"bad variable name {n!r}", lineno, col)
        if n == IMAGINARY_UNIT:
            raise PolySyntaxError("'i' is reserved for the imaginary unit", lineno, col)
    if len(set(names)) != len(names):
        raise PolySyntaxError("duplicate variable name", lineno, col)
    return names


def parse_points(text: str) -> list[list[complex]]:
    """Solutions file: one point per line, coordinates separated by commas."""
    points = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        coords = []
        col = 1
        for field in line.split(","):
            if not field.strip():
                raise PolySyntaxError("empty coordinate", lineno, col)
            coords.append(parse_complex(field, lineno, col))
            col += len(field) + 1
        points.append(coords)
    return points


# -- printing ----------------------------------------------------------------


def format_real(x: float) -> str:
    return format(x, ".17g")


def format_complex(c: complex) -> str:
    c = complex(c)
    im = format_real(abs(c.imag))
    sign = "-" if c.imag < 0 or (c.imag == 0 and str(c.imag).startswith("-")) else "+"
    return f"{format_real(c.real)}{sign}{im}i"


def format_polynomial(p: Polynomial, variables) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for mono, c in p.sorted_terms():
        factors = [f"({format_complex(c)})"]
        for name, e in zip(variables, mono):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        parts.append("*".join(factors))
    return " + ".join(parts)


def format_system(sys: PolynomialSystem) -> str:
    lines = ["ring " + ", ".join(sys.variables)]
    lines += ["poly " + format_polynomial(p, sys.variables) for p in sys.polys]
    return "\n".join(lines) + "\n"


def format_point(x) -> str:
    return ", ".join(format_complex(c) for c in x)
