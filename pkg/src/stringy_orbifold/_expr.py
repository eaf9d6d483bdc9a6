"""Tokenizer and recursive-descent parser for the shared expression grammar.

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | factor
    factor   := base ('^' exponent)?
    base     := integer | identifier | '(' expr ')'
    exponent := ['-'] integer | '(' ['-'] integer '/' integer ')'

The parser is generic over the value type: callers hand in an ``Algebra``
that turns integers and identifiers into values and knows how to raise to a
power.  ``+``, ``-``, ``*`` and ``/`` are applied with the Python operators.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

from .errors import ParseError

MAX_EXPONENT_DENOMINATOR = 10**6

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "name", "op", "end"
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        if m.group(1) is not None:
            tokens.append(Token("int", m.group(1), start))
        elif m.group(2) is not None:
            tokens.append(Token("name", m.group(2), start))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", start)
            tokens.append(Token("op", ch, start))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


@dataclass
class Algebra:
    """Value constructors used by :func:`parse`."""

    integer: Callable[[int], Any]
    name: Callable[[str, int], Any]
    power: Callable[[Any, Fraction, int], Any]
    divide: Callable[[Any, Any, int], Any] | None = None


class _Parser:
    def __init__(self, text: str, algebra: Algebra):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.alg = algebra

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if self.tok.kind != "op" or self.tok.text != text:
            found = self.tok.text or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", self.tok.pos)
        return self.advance()

    def at(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def parse(self):
        if self.tok.kind == "end":
            raise ParseError("empty expression", 0)
        value = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return value

    def expr(self):
        value = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.at("*") or self.at("/"):
            op = self.advance()
            rhs = self.unary()
            if op.text == "*":
                value = value * rhs
            elif self.alg.divide is None:
                raise ParseError("division is not allowed here", op.pos)
            else:
                value = self.alg.divide(value, rhs, op.pos)
        return value

    def unary(self):
        if self.at("-"):
            self.advance()
            return -self.unary()
        return self.factor()

    def factor(self):
        base_pos = self.tok.pos
        value = self.base()
        if self.at("^"):
            self.advance()
            exp_pos = self.tok.pos
            value = self.alg.power(value, self.exponent(), exp_pos if exp_pos else base_pos)
        return value

    def base(self):
        t = self.tok
        if t.kind == "int":
            self.advance()
            return self.alg.integer(int(t.text))
        if t.kind == "name":
            self.advance()
            return self.alg.name(t.text, t.pos)
        if self.at("("):
            self.advance()
            value = self.expr()
            self.expect(")")
            return value
        found = t.text or "end of input"
        raise ParseError(f"expected a number, variable or '(', found {found!r}", t.pos)

    def _signed_int(self) -> int:
        sign = 1
        if self.at("-"):
            self.advance()
            sign = -1
        t = self.tok
        if t.kind != "int":
            raise ParseError("expected an integer exponent", t.pos)
        self.advance()
        return sign * int(t.text)

    def exponent(self) -> Fraction:
        if self.at("("):
            self.advance()
            num = self._signed_int()
            den = 1
            if self.at("/"):
                self.advance()
                den_tok = self.tok
                den = self._signed_int()
                if den == 0:
                    raise ParseError("zero exponent denominator", den_tok.pos)
                if abs(den) > MAX_EXPONENT_DENOMINATOR:
                    raise ParseError(
                        f"exponent denominator {den} exceeds {MAX_EXPONENT_DENOMINATOR}",
                        den_tok.pos,
                    )
            self.expect(")")
            return Fraction(num, den)
        return Fraction(self._signed_int())


def parse(text: str, algebra: Algebra):
    return _Parser(text, algebra).parse()
