"""Recursive-descent parser for the formula concrete syntax.

    formula   := disj ('->' formula)?           right-associative, lowest
    disj      := conj ('||' conj)*
    conj      := unary ('&&' unary)*
    unary     := '!' unary | aggregate | 'true' | 'false' | ident
               | ('G'|'F'|'P'|'H') interval? '(' formula ')'
               | '(' formula ')' (('U'|'S'|'R'|'T') interval? '(' formula ')')?
    interval  := '[' nat ',' (nat | 'inf') ']'
    aggregate := 'C[' K ']' cmp n '(' p ')'
               | 'V[' K ',' h ']' cmp n '(' p ')'
               | 'M[' K ',' h ']' cmp n '(' p ')'
               | 'D[' K ']' cmp n '(' p ',' q ')'

Omitted intervals default to [0, inf).  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import (
    INF,
    And,
    Atom,
    Avg,
    ComparisonOp,
    Count,
    Dist,
    Eventually,
    FalseF,
    Formula,
    FormulaError,
    Globally,
    Historically,
    Implies,
    Interval,
    Max,
    Not,
    Or,
    PastEventually,
    Release,
    Since,
    Trigger,
    TrueF,
    UNBOUNDED,
    Until,
)


class ParseError(FormulaError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class _Tok:
    kind: str  # 'nat', 'ident', 'op', 'eof'
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
    r"|(?P<nat>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>->|&&|\|\||<=|>=|==|[<>()\[\],!])"
)

_PREFIX = {"G": Globally, "F": Eventually, "P": PastEventually, "H": Historically}
_BINARY = {"U": Until, "S": Since, "R": Release, "T": Trigger}
_AGGREGATES = {"C", "V", "M", "D"}
_KEYWORDS = {"true", "false", "inf"}


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind in ("nat", "ident", "op"):
            toks.append(_Tok(kind, m.group(), line, col))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    # token helpers

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, message: str, tok: _Tok | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "ident") and self.tok.text == text

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        tok = self.tok
        self.i += 1
        return tok

    def nat(self) -> int:
        if self.tok.kind != "nat":
            raise self.error(f"expected a natural number, found {self.tok.text or 'end of input'!r}")
        value = int(self.tok.text)
        self.i += 1
        return value

    def ident(self) -> str:
        tok = self.tok
        if tok.kind != "ident" or tok.text in _KEYWORDS:
            raise self.error(f"expected an atom, found {tok.text or 'end of input'!r}")
        if tok.text.startswith("__"):
            raise self.error(f"{tok.text!r}: names starting with '__' are reserved")
        self.i += 1
        return tok.text

    # grammar

    def parse(self) -> Formula:
        f = self.formula()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")
        return f

    def formula(self) -> Formula:
        left = self.disj()
        if self.at("->"):
            self.i += 1
            return Implies(left, self.formula())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.at("||"):
            self.i += 1
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.at("&&"):
            self.i += 1
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.tok
        if self.at("!"):
            self.i += 1
            return Not(self.unary())
        if self.at("("):
            self.i += 1
            left = self.formula()
            self.expect(")")
            if self.tok.kind == "ident" and self.tok.text in _BINARY and self.peek().text in ("(", "["):
                cls = _BINARY[self.tok.text]
                self.i += 1
                interval = self.interval()
                self.expect("(")
                right = self.formula()
                self.expect(")")
                return cls(interval, left, right)
            return left
        if tok.kind == "ident":
            nxt = self.peek().text
            if tok.text in _PREFIX and nxt in ("(", "["):
                self.i += 1
                interval = self.interval()
                self.expect("(")
                arg = self.formula()
                self.expect(")")
                return _PREFIX[tok.text](interval, arg)
            if tok.text in _AGGREGATES and nxt == "[":
                return self.aggregate()
            if tok.text == "true":
                self.i += 1
                return TrueF()
            if tok.text == "false":
                self.i += 1
                return FalseF()
            return Atom(self.ident())
        raise self.error(f"unexpected {tok.text or 'end of input'!r}")

    def interval(self) -> Interval:
        if not self.at("["):
            return UNBOUNDED
        start = self.expect("[")
        lo = self.nat()
        self.expect(",")
        if self.at("inf"):
            self.i += 1
            hi: float = INF
        else:
            hi = self.nat()
        self.expect("]")
        try:
            return Interval(lo, hi)
        except FormulaError as exc:
            raise self.error(str(exc), start) from None

    def comparison(self) -> ComparisonOp:
        for op in ComparisonOp:
            if self.at(op.value):
                self.i += 1
                return op
        raise self.error(f"expected a comparison operator, found {self.tok.text!r}")

    def aggregate_args(self, count: int) -> list[str]:
        self.expect("(")
        names = []
        for k in range(count):
            if k:
                self.expect(",")
            tok = self.tok
            if tok.kind != "ident" or self.peek().text not in (",", ")"):
                raise self.error("aggregate arguments must be atoms", tok)
            names.append(self.ident())
        if not self.at(")"):
            raise self.error("aggregate arguments must be atoms")
        self.i += 1
        return names

    def aggregate(self) -> Formula:
        start = self.tok
        kind = start.text
        self.i += 1
        self.expect("[")
        window = self.nat()
        sub = None
        if kind in ("V", "M"):
            self.expect(",")
            sub = self.nat()
        self.expect("]")
        op = self.comparison()
        bound = self.nat()
        try:
            if kind == "D":
                p, q = self.aggregate_args(2)
                return Dist(window, op, bound, p, q)
            (p,) = self.aggregate_args(1)
            if kind == "C":
                return Count(window, op, bound, p)
            if kind == "V":
                return Avg(window, sub, op, bound, p)
            return Max(window, sub, op, bound, p)
        except ParseError:
            raise
        except FormulaError as exc:
            raise self.error(str(exc), start) from None


def parse_formula(text: str) -> Formula:
    """Parse concrete syntax into a :class:`Formula`.

    Raises :class:`ParseError` (carrying ``line`` and ``column``) on syntax
    errors and on structurally invalid aggregates or intervals.
    """
    return _Parser(text).parse()
