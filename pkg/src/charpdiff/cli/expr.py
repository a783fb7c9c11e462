"""Expression language for operators, symbols and functions.

Grammar (LL(1), explicit ``*`` required)::

    sum     := negated (("+" | "-") negated)*
    negated := "-" negated | product
    product := power ("*" power)*
    power   := atom ("^" INT)?
    atom    := INT | NAME | "(" sum ")"
    NAME    := ("x" | "d" | "y") INDEX | "finv"

So ``^`` binds tighter than ``*``, which binds tighter than unary minus,
which binds tighter than binary ``+``/``-``.  Products are evaluated strictly
left to right, which matters for operators.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..coeffring import Chart
from ..diffop import DiffOperator
from ..frobcenter import SymbolPolynomial

MODES = ("operator", "symbol", "function")


class ParseError(ValueError):
    """Malformed expression; carries a 1-based line and column."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Num:
    value: int
    pos: tuple


@dataclass(frozen=True)
class Atom:
    kind: str  # "x", "d", "y" or "finv"
    index: int
    pos: tuple


@dataclass(frozen=True)
class Neg:
    operand: object
    pos: tuple


@dataclass(frozen=True)
class BinOp:
    op: str  # "+", "-", "*"
    left: object
    right: object
    pos: tuple


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int
    pos: tuple


_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*^()]))")
_NAME = re.compile(r"(?P<kind>[xdy])(?P<index>[1-9]\d*)\Z")


def _tokenize(text):
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while True:
        # skip whitespace while tracking newlines
        while pos < len(text) and text[pos].isspace():
            if text[pos] == "\n":
                line += 1
                line_start = pos + 1
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        where = (line, pos - line_start + 1)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", *where)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), where))
        pos = m.end()
    tokens.append(("end", "", (line, pos - line_start + 1)))
    return tokens


class _Parser:
    def __init__(self, text, mode):
        self.tokens = _tokenize(text)
        self.i = 0
        self.mode = mode

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, found {val or 'end of input'!r}", *pos)

    def parse(self):
        node = self.sum()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r}", *pos)
        return node

    def sum(self):
        node = self.negated()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                node = BinOp(val, node, self.negated(), pos)
            else:
                return node

    def negated(self):
        kind, val, pos = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Neg(self.negated(), pos)
        return self.product()

    def product(self):
        node = self.power()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val == "*":
                self.take()
                node = BinOp("*", node, self.power(), pos)
            else:
                return node

    def power(self):
        node = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val, epos = self.take()
            if kind != "int":
                raise ParseError("exponent must be a nonnegative integer literal", *epos)
            node = Pow(node, int(val), pos)
        return node

    def atom(self):
        kind, val, pos = self.take()
        if kind == "int":
            return Num(int(val), pos)
        if kind == "name":
            if val == "finv":
                return Atom("finv", 0, pos)
            m = _NAME.match(val)
            if m is None:
                raise ParseError(f"unknown atom {val!r}", *pos)
            atom = Atom(m["kind"], int(m["index"]), pos)
            if atom.kind == "y" and self.mode == "operator":
                raise ParseError(f"fiber coordinate {val!r} not allowed in an operator", *pos)
            if atom.kind == "d" and self.mode != "operator":
                raise ParseError(f"derivation {val!r} not allowed in a {self.mode}", *pos)
            if atom.kind == "y" and self.mode == "function":
                raise ParseError(f"fiber coordinate {val!r} not allowed in a function", *pos)
            return atom
        if kind == "op" and val == "(":
            node = self.sum()
            self.expect_op(")")
            return node
        raise ParseError(f"unexpected {val or 'end of input'!r}", *pos)


def parse_expr(text: str, mode: str = "operator"):
    """Parse ``text`` into an AST, enforcing the atom rules of ``mode``."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    return _Parser(text, mode).parse()


def _atom_value(node, chart, mode):
    if node.kind == "finv":
        if chart.is_affine:
            raise ParseError("finv needs a chart with f != 1", *node.pos)
        return (DiffOperator.finv(chart) if mode == "operator"
                else SymbolPolynomial.finv(chart))
    if node.index > chart.n:
        raise ParseError(f"index {node.index} exceeds n = {chart.n}", *node.pos)
    if node.kind == "x":
        return (DiffOperator.x(chart, node.index) if mode == "operator"
                else SymbolPolynomial.x(chart, node.index))
    if node.kind == "d":
        return DiffOperator.d(chart, node.index)
    return SymbolPolynomial.y(chart, node.index)


def _eval(node, chart, mode):
    if isinstance(node, Num):
        if mode == "operator":
            return DiffOperator.constant(chart, node.value)
        return SymbolPolynomial.constant(chart, node.value)
    if isinstance(node, Atom):
        return _atom_value(node, chart, mode)
    if isinstance(node, Neg):
        return -_eval(node.operand, chart, mode)
    if isinstance(node, Pow):
        return _eval(node.base, chart, mode) ** node.exponent
    left = _eval(node.left, chart, mode)
    right = _eval(node.right, chart, mode)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    return left * right


def eval_expr(ast, chart: Chart, mode: str = "operator"):
    """Evaluate to a DiffOperator, SymbolPolynomial or LocalizedFunction."""
    value = _eval(ast, chart, "operator" if mode == "operator" else "symbol")
    if mode == "function":
        return value.as_function()
    return value


def evaluate(text: str, chart: Chart, mode: str = "operator"):
    return eval_expr(parse_expr(text, mode), chart, mode)


def parse_denominator(text: str, p: int, n: int, e: int = 1):
    """Parse the chart polynomial ``f`` (only ``x`` atoms and integers).

    It is read over Z/p; for ``e = 2`` the canonical lift is returned.
    """
    ast = parse_expr(text, "function")
    f = eval_expr(ast, Chart.affine(p, n), "function").num
    return f.lift_canonical() if e == 2 else f


def make_chart(p: int, n: int, f_text: str = "1", e: int = 1) -> Chart:
    f = parse_denominator(f_text, p, n, e)
    return Chart(p, n, f, e)
