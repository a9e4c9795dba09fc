"""Tokenizer and recursive-descent parser for polynomial-style expressions.

Grammar (whitespace insignificant)::

    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' signed_int)?
    atom   := number | NAME | '(' expr ')'
    number := INT ('/' INT)?

The caller supplies the atom table and a scalar constructor, so the same
parser builds Laurent polynomials, symmetric-algebra polynomials, Weyl
algebra elements and so on.  Multiplication is evaluated left to right, which
keeps noncommutative products in reading order.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Callable, Mapping

from .errors import ParseError

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>e_\{-?\d+\}|e_-?\d+|[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


def tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, atoms: Callable[[str, int], object], scalar: Callable[[Fraction], object]):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.atoms = atoms
        self.scalar = scalar

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, tok, what: str):
        kind, val, pos = tok
        shown = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"{what}, found {shown}", self.text, pos)

    def expect_op(self, op: str):
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            self.fail(tok, f"expected {op!r}")

    def parse(self):
        if self.peek()[0] == "end":
            self.fail(self.peek(), "empty expression")
        value = self.expr()
        if self.peek()[0] != "end":
            self.fail(self.peek(), "unexpected token")
        return value

    def expr(self):
        value = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                value = value + rhs if val == "+" else value - rhs
            else:
                return value

    def term(self):
        value = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            value = value * self.unary()
        return value

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            inner = self.unary()
            return -inner if val == "-" else inner
        return self.power()

    def power(self):
        base_tok = self.peek()
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            sign = 1
            tok = self.take()
            if tok[0] == "op" and tok[1] in "+-":
                sign = -1 if tok[1] == "-" else 1
                tok = self.take()
            if tok[0] != "num":
                self.fail(tok, "expected integer exponent")
            exp = sign * int(tok[1])
            try:
                return base ** exp
            except (ZeroDivisionError, ValueError, TypeError) as exc:
                raise ParseError(f"cannot raise to power {exp}: {exc}", self.text, base_tok[2]) from None
        return base

    def atom(self):
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            num = int(val)
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "/":
                self.take()
                den_tok = self.take()
                if den_tok[0] != "num":
                    self.fail(den_tok, "expected integer denominator")
                den = int(den_tok[1])
                if den == 0:
                    raise ParseError("zero denominator", self.text, den_tok[2])
                return self.scalar(Fraction(num, den))
            return self.scalar(Fraction(num))
        if kind == "name":
            return self.atoms(val, pos)
        if kind == "op" and val == "(":
            value = self.expr()
            self.expect_op(")")
            return value
        self.fail(tok, "expected number, name or '('")


def parse_expression(
    text: str,
    atoms: Mapping[str, object] | Callable[[str, int], object],
    scalar: Callable[[Fraction], object],
):
    """Parse ``text`` using ``atoms`` for names and ``scalar`` for numbers."""
    if isinstance(text, str) is False:
        raise ParseError("expression must be a string")
    if callable(atoms):
        lookup = atoms
    else:
        table = dict(atoms)

        def lookup(name: str, pos: int):
            if name not in table:
                raise ParseError(f"unknown symbol {name!r}", text, pos)
            return table[name]

    return _Parser(text, lookup, scalar).parse()


def parse_rational(value) -> Fraction:
    """Rational from an int, Fraction or a string like ``"-3/4"``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    if isinstance(value, str):
        s = value.strip()
        if re.fullmatch(r"[-+]?\d+(/\d+)?", s):
            num, _, den = s.partition("/")
            if den and int(den) == 0:
                raise ParseError(f"zero denominator in {value!r}", value, s.index("/") + 1)
            return Fraction(int(num), int(den) if den else 1)
        raise ParseError(f"not a rational literal: {value!r}", value, 0)
    raise ParseError(f"not a rational literal: {value!r}")
