"""Formula AST for the aggregate metric temporal logic.

All nodes are frozen dataclasses, so formulas are hashable and can be shared
freely.  Aggregate modalities take atom *names*, never subformulas.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, Union

#: Reserved atom used to encode true/false after desugaring.
TRUE_ATOM = "__true"

INF = math.inf


class FormulaError(ValueError):
    """A structurally invalid formula (bad window, bad interval, ...)."""


class ComparisonOp(enum.Enum):
    LT = "<"
    LE = "<="
    GE = ">="
    GT = ">"
    EQ = "=="

    def holds(self, lhs: int, rhs: int) -> bool:
        if self is ComparisonOp.LT:
            return lhs < rhs
        if self is ComparisonOp.LE:
            return lhs <= rhs
        if self is ComparisonOp.GE:
            return lhs >= rhs
        if self is ComparisonOp.GT:
            return lhs > rhs
        return lhs == rhs

    def negated(self) -> ComparisonOp:
        """The relation denoting the complement; undefined for EQ."""
        try:
            return _NEGATION[self]
        except KeyError:
            raise FormulaError("== has no complement in the comparison set") from None

    def __str__(self) -> str:
        return self.value


_NEGATION = {
    ComparisonOp.LT: ComparisonOp.GE,
    ComparisonOp.GE: ComparisonOp.LT,
    ComparisonOp.LE: ComparisonOp.GT,
    ComparisonOp.GT: ComparisonOp.LE,
}


@dataclass(frozen=True)
class Interval:
    lo: int = 0
    hi: float = INF

    def __post_init__(self) -> None:
        if self.lo < 0:
            raise FormulaError(f"interval lower bound must be natural, got {self.lo}")
        if self.hi != INF and self.hi != int(self.hi):
            raise FormulaError(f"interval upper bound must be natural or inf, got {self.hi}")
        if self.lo > self.hi:
            raise FormulaError(f"empty interval [{self.lo},{self.hi}]")

    def contains(self, d: int) -> bool:
        return self.lo <= d <= self.hi

    @property
    def bounded(self) -> bool:
        return self.hi != INF

    def __str__(self) -> str:
        hi = "inf" if self.hi == INF else str(int(self.hi))
        return f"[{self.lo},{hi}]"


UNBOUNDED = Interval()


class Formula:
    """Base class of every formula node."""

    __slots__ = ()

    def children(self) -> tuple[Formula, ...]:
        return ()

    def walk(self) -> Iterator[Formula]:
        stack: list[Formula] = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children()))

    def __str__(self) -> str:
        from .printer import to_text

        return to_text(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class _Binary(Formula):
    interval: Interval
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


class Until(_Binary):
    pass


class Since(_Binary):
    pass


class Release(_Binary):
    pass


class Trigger(_Binary):
    pass


@dataclass(frozen=True)
class _Prefix(Formula):
    interval: Interval
    arg: Formula

    def children(self):
        return (self.arg,)


class Globally(_Prefix):
    pass


class Eventually(_Prefix):
    pass


class PastEventually(_Prefix):
    pass


class Historically(_Prefix):
    pass


def _check_window(window: int) -> None:
    if window < 1:
        raise FormulaError(f"time window must be >= 1, got {window}")


def _check_bound(bound: int) -> None:
    if bound < 0:
        raise FormulaError(f"comparison bound must be natural, got {bound}")


@dataclass(frozen=True)
class Count(Formula):
    window: int
    op: ComparisonOp
    bound: int
    atom: str

    def __post_init__(self) -> None:
        _check_window(self.window)
        _check_bound(self.bound)


@dataclass(frozen=True)
class Avg(Formula):
    window: int
    sub: int
    op: ComparisonOp
    bound: int
    atom: str

    def __post_init__(self) -> None:
        _check_window(self.window)
        _check_bound(self.bound)
        if self.sub < 1:
            raise FormulaError(f"subinterval length must be >= 1, got {self.sub}")
        if self.sub > self.window:
            raise FormulaError(
                f"average subinterval {self.sub} exceeds window {self.window}"
            )


@dataclass(frozen=True)
class Max(Formula):
    window: int
    sub: int
    op: ComparisonOp
    bound: int
    atom: str

    def __post_init__(self) -> None:
        _check_window(self.window)
        _check_bound(self.bound)
        if self.sub < 1:
            raise FormulaError(f"subinterval length must be >= 1, got {self.sub}")


@dataclass(frozen=True)
class Dist(Formula):
    window: int
    op: ComparisonOp
    bound: int
    left: str
    right: str

    def __post_init__(self) -> None:
        _check_window(self.window)
        _check_bound(self.bound)
        if self.left == self.right:
            raise FormulaError(f"distance pair needs two different atoms, got {self.left!r} twice")


Aggregate = Union[Count, Avg, Max, Dist]
AGGREGATES = (Count, Avg, Max, Dist)


# Positive-normal-form leaves.


@dataclass(frozen=True)
class NegAtom(Formula):
    name: str


@dataclass(frozen=True)
class NegAggregate(Formula):
    """Exact boolean negation of an aggregate that cannot be flipped."""

    inner: Formula

    def __post_init__(self) -> None:
        if not isinstance(self.inner, AGGREGATES):
            raise FormulaError("NegAggregate wraps aggregate modalities only")

    def children(self):
        return (self.inner,)


def aggregate_atoms(node: Formula) -> tuple[str, ...]:
    if isinstance(node, Dist):
        return (node.left, node.right)
    if isinstance(node, (Count, Avg, Max)):
        return (node.atom,)
    return ()


def atoms(f: Formula) -> set[str]:
    """Every atom name mentioned in ``f``, aggregate arguments included."""
    out: set[str] = set()
    for node in f.walk():
        if isinstance(node, (Atom, NegAtom)):
            out.add(node.name)
        out.update(aggregate_atoms(node))
    return out
