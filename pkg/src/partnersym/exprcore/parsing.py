"""Recursive-descent parser for the expression text grammar.

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' INT)?
    atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Division is only allowed by constants.  The same machinery parses jet
polynomials (``u_tx*phi_t - 2``) by swapping the symbol factory.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional

from .charts import CHARTS, Chart, get_chart
from .expression import Expression, NotLinearError
from .scalars import scalar

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][-+]?\d+)?|\d*\.\d+(?:[eE][-+]?\d+)?|\d+[eE][-+]?\d+|\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


class ParseError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


@dataclass
class _Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", start, text)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append(_Token(kind, m.group(kind), start))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class Parser:
    """Generic parser; ``symbol`` maps a name to an algebra element."""

    def __init__(self, text: str, symbol: Callable[[str, int], object],
                 number: Callable[[object], object],
                 function: Optional[Callable[[str, object, int], object]] = None):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.symbol = symbol
        self.number = number
        self.function = function

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def take(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.take()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok.pos, self.text)
        return tok

    def parse(self):
        if self.peek().kind == "end":
            raise ParseError("empty expression", 0, self.text)
        value = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected {tok.text!r}", tok.pos, self.text)
        return value

    def expr(self):
        value = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek().text in ("*", "/"):
            tok = self.take()
            rhs = self.unary()
            if tok.text == "*":
                value = value * rhs
            else:
                try:
                    value = value / rhs
                except (ValueError, TypeError) as exc:
                    raise ParseError(f"division by a non-constant ({exc})", tok.pos, self.text) from None
                except ZeroDivisionError:
                    raise ParseError("division by zero", tok.pos, self.text) from None
        return value

    def unary(self):
        tok = self.peek()
        if tok.text == "-":
            self.take()
            return -self.unary()
        if tok.text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().text == "^":
            self.take()
            tok = self.take()
            if tok.kind != "num" or not tok.text.isdigit():
                raise ParseError("exponent must be a nonnegative integer", tok.pos, self.text)
            return base ** int(tok.text)
        return base

    def atom(self):
        tok = self.take()
        if tok.kind == "num":
            return self.number(scalar(tok.text))
        if tok.text == "(":
            value = self.expr()
            self.expect(")")
            return value
        if tok.kind == "name":
            if self.peek().text == "(":
                if self.function is None:
                    raise ParseError(f"unknown function {tok.text!r}", tok.pos, self.text)
                self.take()
                arg = self.expr()
                self.expect(")")
                return self.function(tok.text, arg, tok.pos)
            return self.symbol(tok.text, tok.pos)
        raise ParseError(f"unexpected {tok.text or 'end of input'!r}", tok.pos, self.text)


def _infer_chart(text: str) -> Chart:
    names = {t.text for t in tokenize(text) if t.kind == "name"} - {"exp", "sin", "cos"}
    for chart in CHARTS.values():
        if names <= set(chart.variables):
            return chart
    raise ParseError(f"no known chart contains variables {sorted(names)}", 0, text)


def parse_expression(text: str, chart=None) -> Expression:
    """Parse closed-class expression text over ``chart`` (inferred when omitted)."""
    chart = _infer_chart(text) if chart is None else get_chart(chart)

    def symbol(name, pos):
        if name not in chart:
            raise ParseError(f"unknown variable {name!r} for chart {chart}", pos, text)
        return Expression.variable(chart, name)

    def function(name, arg, pos):
        if name not in ("exp", "sin", "cos"):
            raise ParseError(f"unknown function {name!r}", pos, text)
        try:
            return getattr(Expression, name)(arg)
        except NotLinearError:
            raise ParseError(f"argument of {name} is not a linear form", pos, text) from None

    return Parser(text, symbol, lambda v: Expression.constant(chart, v), function).parse()
