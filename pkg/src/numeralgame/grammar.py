"""Numeral meta-grammar: expression trees, evaluation, complexity, text form.

The grammar shared by every language is::

    Num    = D | Phrase | Phrase + Num | Phrase - Num
    Phrase = Num * M

A concrete grammar instance fixes the digit set ``D`` and multiplier set ``M``
(a :class:`DMPair`).  Expressions are immutable trees built from
:class:`Digit`, :class:`Phrase`, :class:`Sum` and :class:`Diff`.

Text form: tokens are integer literals and the operators ``*``, ``+`` and
``-`` with no whitespace.  ``*`` binds tighter than ``+``/``-`` and chains to
the left; ``+``/``-`` nest to the right.  The only case the operator layout
cannot express is a multiplicand that is itself a sum or difference; such a
multiplicand is wrapped in parentheses, which are not symbols and do not count
towards complexity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Union

OPERATORS = ("*", "+", "-")


@dataclass(frozen=True)
class DMPair:
    """A grammar instance: lexicalised digits, multipliers and the numeral range."""

    digits: tuple[int, ...]
    multipliers: tuple[int, ...]
    range_max: int

    def __post_init__(self):
        digits = tuple(sorted(set(int(d) for d in self.digits)))
        multipliers = tuple(sorted(set(int(m) for m in self.multipliers)))
        object.__setattr__(self, "digits", digits)
        object.__setattr__(self, "multipliers", multipliers)
        if self.range_max < 1:
            raise ValueError(f"range_max must be positive, got {self.range_max}")
        if not digits:
            raise ValueError("digit set must be non-empty")
        overlap = set(digits) & set(multipliers)
        if overlap:
            raise ValueError(f"digits and multipliers overlap: {sorted(overlap)}")
        for n in digits + multipliers:
            if not 1 <= n <= self.range_max:
                raise ValueError(f"numeral {n} outside [1, {self.range_max}]")

    @classmethod
    def of(cls, digits: Iterable[int], multipliers: Iterable[int], range_max: int = 99) -> "DMPair":
        return cls(tuple(digits), tuple(multipliers), range_max)

    def with_range(self, range_max: int) -> "DMPair":
        return DMPair(self.digits, self.multipliers, range_max)

    @property
    def size(self) -> int:
        return len(self.digits) + len(self.multipliers)

    def __str__(self):
        return f"D={list(self.digits)} M={list(self.multipliers)}"


@dataclass(frozen=True)
class Digit:
    digit: int

    def __post_init__(self):
        if self.digit < 1:
            raise ValueError(f"digit must be >= 1, got {self.digit}")


@dataclass(frozen=True)
class Phrase:
    multiplicand: "NumExpr"
    multiplier: int

    def __post_init__(self):
        if not isinstance(self.multiplicand, (Digit, Phrase, Sum, Diff)):
            raise TypeError("multiplicand must be a numeral expression")
        if self.multiplier < 1:
            raise ValueError(f"multiplier must be >= 1, got {self.multiplier}")


@dataclass(frozen=True)
class Sum:
    phrase: Phrase
    rest: "NumExpr"

    def __post_init__(self):
        if not isinstance(self.phrase, Phrase):
            raise TypeError("left operand of '+' must be a Phrase")


@dataclass(frozen=True)
class Diff:
    phrase: Phrase
    rest: "NumExpr"

    def __post_init__(self):
        if not isinstance(self.phrase, Phrase):
            raise TypeError("left operand of '-' must be a Phrase")
        if value(self.phrase) - value(self.rest) < 1:
            raise ValueError(
                f"difference {render(self.phrase)}-{render(self.rest)} is not a positive numeral"
            )


NumExpr = Union[Digit, Phrase, Sum, Diff]


def value(expr: NumExpr) -> int:
    """Integer denoted by ``expr``."""
    match expr:
        case Digit(d):
            return d
        case Phrase(q, m):
            return value(q) * m
        case Sum(p, r):
            return value(p) + value(r)
        case Diff(p, r):
            return value(p) - value(r)
    raise TypeError(f"not a numeral expression: {expr!r}")


def ms_complexity(expr: NumExpr) -> int:
    """Number of symbols (numeral literals and operators) in ``expr``."""
    match expr:
        case Digit():
            return 1
        case Phrase(q, _):
            return ms_complexity(q) + 2
        case Sum(p, r) | Diff(p, r):
            return ms_complexity(p) + 1 + ms_complexity(r)
    raise TypeError(f"not a numeral expression: {expr!r}")


def render(expr: NumExpr) -> str:
    match expr:
        case Digit(d):
            return str(d)
        case Phrase(q, m):
            inner = render(q)
            if isinstance(q, (Sum, Diff)):
                inner = f"({inner})"
            return f"{inner}*{m}"
        case Sum(p, r):
            return f"{render(p)}+{render(r)}"
        case Diff(p, r):
            return f"{render(p)}-{render(r)}"
    raise TypeError(f"not a numeral expression: {expr!r}")


def symbols(expr: NumExpr) -> list[str]:
    """Symbols of ``expr`` in rendering order (parentheses dropped)."""
    return [t for t in _TOKEN_RE.findall(render(expr)) if t not in "()"]


def uses_lexicon(expr: NumExpr, dm: DMPair) -> bool:
    """True when every leaf is in ``dm.digits`` and every multiplier in ``dm.multipliers``."""
    match expr:
        case Digit(d):
            return d in dm.digits
        case Phrase(q, m):
            return m in dm.multipliers and uses_lexicon(q, dm)
        case Sum(p, r) | Diff(p, r):
            return uses_lexicon(p, dm) and uses_lexicon(r, dm)
    return False


class ParseError(ValueError):
    """Raised when text is not a well-formed expression for the given grammar."""


_TOKEN_RE = re.compile(r"\d+|[*+\-()]|\S")


class _Parser:
    def __init__(self, text: str, dm: DMPair):
        self.tokens = _TOKEN_RE.findall(text.replace(" ", ""))
        self.pos = 0
        self.dm = dm
        for tok in self.tokens:
            if not (tok.isdigit() or tok in "*+-()"):
                raise ParseError(f"unknown token {tok!r} in {text!r}")

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of expression")
        self.pos += 1
        return tok

    def num(self) -> NumExpr:
        left = self.product()
        op = self.peek()
        if op not in ("+", "-"):
            return left
        if not isinstance(left, Phrase):
            raise ParseError(f"left operand of {op!r} must be a phrase, got {render(left)!r}")
        self.take()
        rest = self.num()
        if op == "+":
            return Sum(left, rest)
        try:
            return Diff(left, rest)
        except ValueError as exc:
            raise ParseError(str(exc)) from None

    def product(self) -> NumExpr:
        tok = self.take()
        if tok == "(":
            expr = self.num()
            if self.take() != ")":
                raise ParseError("expected ')'")
            if self.peek() != "*":
                raise ParseError("parenthesised expression must be a multiplicand")
        elif tok.isdigit():
            n = int(tok)
            if n not in self.dm.digits:
                raise ParseError(f"{n} is not in D")
            expr = Digit(n)
        else:
            raise ParseError(f"unexpected token {tok!r}")
        while self.peek() == "*":
            self.take()
            tok = self.take()
            if not tok.isdigit():
                raise ParseError(f"expected a multiplier after '*', got {tok!r}")
            m = int(tok)
            if m not in self.dm.multipliers:
                raise ParseError(f"{m} is not in M")
            expr = Phrase(expr, m)
        return expr


def parse(text: str, dm: DMPair) -> NumExpr:
    """Inverse of :func:`render`, checking D/M membership against ``dm``."""
    parser = _Parser(text, dm)
    if not parser.tokens:
        raise ParseError("empty expression")
    expr = parser.num()
    if parser.peek() is not None:
        raise ParseError(f"trailing input at token {parser.peek()!r} in {text!r}")
    return expr
