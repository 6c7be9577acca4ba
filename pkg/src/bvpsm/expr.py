"""Parser for target-space polynomials.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := ('+' | '-') factor | atom ('^' uint)*
    atom   := rational | symbol | '(' expr ')'
    rational := uint ('/' uint)?
    symbol := ('x' | 'p') uint

A leading sign on a factor is accepted so that printed polynomials such as
``-1/2*x1*p2`` read back unchanged.  Only the chart coordinates x1..xm and
p1..pm can be entered; odd source coordinates and jets are internal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Union

from .graded import GradedPoly
from .target import TargetChart

__all__ = [
    "Num",
    "Sym",
    "Neg",
    "Add",
    "Mul",
    "Pow",
    "Expr",
    "ParseError",
    "UnknownSymbol",
    "IndexOutOfRange",
    "DegreeExceeded",
    "GRAMMAR",
    "parse",
    "to_poly",
    "parse_poly",
    "x_degree_bound",
]

GRAMMAR = """\
expr     := term (('+'|'-') term)*
term     := factor ('*' factor)*
factor   := ('+'|'-') factor | atom ('^' uint)*
atom     := rational | symbol | '(' expr ')'
rational := uint ('/' uint)?
symbol   := ('x'|'p') uint        e.g. x1, p3
S_alpha is entered directly, e.g. "x3*p1*p2 + x1*p2*p3 + x2*p3*p1"."""


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Sym:
    letter: str  # "x" | "p"
    index: int
    line: int = field(default=1, compare=False)
    col: int = field(default=1, compare=False)


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"
    sign: int = 1  # right operand enters with this sign


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


Expr = Union[Num, Sym, Neg, Add, Mul, Pow]


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class UnknownSymbol(ParseError):
    pass


class IndexOutOfRange(ParseError):
    pass


class DegreeExceeded(ValueError):
    pass


_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()])"
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokens(src: str) -> Iterator[_Tok]:
    pos, line, start = 0, 1, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind != "ws":
            yield _Tok(kind, m.group(), line, pos - start + 1)
        pos = m.end()
    yield _Tok("eof", "", line, pos - start + 1)


class _Parser:
    def __init__(self, src: str):
        self.toks = list(_tokens(src))
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, what: str):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"expected {what}, found {found}", t.line, t.col)

    def at(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def expr(self) -> Expr:
        node = self.term()
        while self.at("+") or self.at("-"):
            sign = 1 if self.advance().text == "+" else -1
            node = Add(node, self.term(), sign)
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.at("*"):
            self.advance()
            node = Mul(node, self.factor())
        return node

    def factor(self) -> Expr:
        if self.at("-"):
            self.advance()
            return Neg(self.factor())
        if self.at("+"):
            self.advance()
            return self.factor()
        node = self.atom()
        while self.at("^"):
            self.advance()
            if self.tok.kind != "num":
                self.fail("a non-negative integer exponent")
            node = Pow(node, int(self.advance().text))
        return node

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.advance()
            value = Fraction(int(t.text))
            if self.at("/"):
                self.advance()
                if self.tok.kind != "num":
                    self.fail("a denominator")
                den = self.advance()
                if int(den.text) == 0:
                    raise ParseError("zero denominator", den.line, den.col)
                value /= int(den.text)
            return Num(value)
        if t.kind == "name":
            self.advance()
            m = re.fullmatch(r"([xp])(\d+)", t.text)
            if m is None:
                raise UnknownSymbol(f"unknown symbol {t.text!r} (expected x<i> or p<i>)", t.line, t.col)
            return Sym(m.group(1), int(m.group(2)), t.line, t.col)
        if self.at("("):
            self.advance()
            node = self.expr()
            if not self.at(")"):
                self.fail("')'")
            self.advance()
            return node
        self.fail("a number, a symbol or '('")


def parse(src: str) -> Expr:
    """Parse text into an AST, with line/column positions on errors."""
    p = _Parser(src)
    if p.tok.kind == "eof":
        p.fail("an expression")
    node = p.expr()
    if p.tok.kind != "eof":
        p.fail("an operator or end of input")
    return node


def x_degree_bound(node: Expr) -> int:
    """Upper bound on the degree in the x's, computed without expanding."""
    if isinstance(node, Num):
        return 0
    if isinstance(node, Sym):
        return 1 if node.letter == "x" else 0
    if isinstance(node, Neg):
        return x_degree_bound(node.arg)
    if isinstance(node, Add):
        return max(x_degree_bound(node.left), x_degree_bound(node.right))
    if isinstance(node, Mul):
        return x_degree_bound(node.left) + x_degree_bound(node.right)
    return x_degree_bound(node.base) * node.exponent


def to_poly(node: Expr, chart: TargetChart) -> GradedPoly:
    if isinstance(node, Num):
        return GradedPoly.const(node.value)
    if isinstance(node, Sym):
        if not 1 <= node.index <= chart.dim:
            raise IndexOutOfRange(
                f"{node.letter}{node.index} is outside the chart (indices 1..{chart.dim})", node.line, node.col
            )
        return chart.xs(node.index) if node.letter == "x" else chart.ps(node.index)
    if isinstance(node, Neg):
        return -to_poly(node.arg, chart)
    if isinstance(node, Add):
        right = to_poly(node.right, chart)
        return to_poly(node.left, chart) + (right if node.sign > 0 else -right)
    if isinstance(node, Mul):
        return to_poly(node.left, chart) * to_poly(node.right, chart)
    return to_poly(node.base, chart) ** node.exponent


def parse_poly(src: str, chart: TargetChart, max_degree: int | None = None) -> GradedPoly:
    """Parse and expand; p1*p1 silently becomes 0."""
    node = parse(src)
    if max_degree is not None:
        bound = x_degree_bound(node)
        if bound > max_degree:
            raise DegreeExceeded(f"polynomial degree in x may reach {bound}, above the cap {max_degree}")
    return to_poly(node, chart)
