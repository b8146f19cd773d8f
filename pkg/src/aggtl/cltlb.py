"""Counter-augmented temporal target logic and the translation into it.

Formulas here talk about positions of the dense word (timestamps), the
validity proposition :data:`VALID`, and integer counters read through
arithmetic temporal terms: ``c`` (now), ``X(c)`` (next position) and
``Y^k(c)`` (``k`` positions back).  Each aggregate is compiled into a
comparison between counter readings; the counters themselves are pinned
down by axioms asserted at the origin.
"""

from __future__ import annotations

import enum
import operator
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .formula import ast as sf
from .formula.ast import UNBOUNDED, ComparisonOp, Interval

#: Validity proposition: true exactly at positions that carry events.
VALID = "__e"


class Rel(enum.Enum):
    LT = "<"
    LE = "<="
    GE = ">="
    GT = ">"
    EQ = "="
    NE = "!="

    @classmethod
    def of(cls, op: ComparisonOp) -> Rel:
        return cls.EQ if op is ComparisonOp.EQ else cls(op.value)

    def holds(self, lhs: int, rhs: int) -> bool:
        return REL_FN[self.value](lhs, rhs)


REL_FN = {"<": operator.lt, "<=": operator.le, ">=": operator.ge, ">": operator.gt, "=": operator.eq, "!=": operator.ne}


# Arithmetic temporal terms.


@dataclass(frozen=True)
class Counter:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Next:
    name: str

    def __str__(self) -> str:
        return f"X({self.name})"


@dataclass(frozen=True)
class Prev:
    depth: int
    name: str

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise ValueError("Prev depth must be >= 1; use Counter for depth 0")

    def __str__(self) -> str:
        return f"Y({self.name})" if self.depth == 1 else f"Y^{self.depth}({self.name})"


Term = Union[Counter, Next, Prev]


def past(depth: int, name: str) -> Term:
    """Reading of ``name`` ``depth`` positions back; depth 0 is the current value."""
    return Counter(name) if depth == 0 else Prev(depth, name)


@dataclass(frozen=True)
class Lin:
    """Integer linear combination ``sum(coef * term) + const``."""

    terms: tuple[tuple[int, Term], ...] = ()
    const: int = 0

    @classmethod
    def of(cls, *terms: Union[Term, tuple[int, Term]], const: int = 0) -> Lin:
        norm = tuple(t if isinstance(t, tuple) else (1, t) for t in terms)
        return cls(norm, const)

    def __add__(self, k: int) -> Lin:
        return Lin(self.terms, self.const + k)

    def scaled(self, k: int) -> Lin:
        return Lin(tuple((c * k, t) for c, t in self.terms), self.const * k)

    def size(self) -> int:
        return len(self.terms) + (1 if self.const or not self.terms else 0)

    def __str__(self) -> str:
        parts = []
        for coef, term in self.terms:
            mag = abs(coef)
            body = str(term) if mag == 1 else f"{mag}*{term}"
            if not parts:
                parts.append(body if coef > 0 else f"-{body}")
            else:
                parts.append(f"{'+' if coef > 0 else '-'} {body}")
        if self.const or not parts:
            if not parts:
                parts.append(str(self.const))
            else:
                parts.append(f"{'+' if self.const > 0 else '-'} {abs(self.const)}")
        return " ".join(parts)


def lin(*terms, const: int = 0) -> Lin:
    return Lin.of(*terms, const=const)


# Formulas.


class CFormula:
    __slots__ = ()

    def children(self) -> tuple[CFormula, ...]:
        return ()

    def walk(self) -> Iterator[CFormula]:
        stack: list[CFormula] = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children()))

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Prop(CFormula):
    name: str


@dataclass(frozen=True)
class NegProp(CFormula):
    name: str


@dataclass(frozen=True)
class Compare(CFormula):
    lhs: Lin
    rel: Rel
    rhs: Lin


@dataclass(frozen=True)
class Not(CFormula):
    arg: CFormula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class And(CFormula):
    left: CFormula
    right: CFormula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Or(CFormula):
    left: CFormula
    right: CFormula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class _Temporal(CFormula):
    interval: Interval
    left: CFormula
    right: CFormula

    def children(self):
        return (self.left, self.right)


class Until(_Temporal):
    pass


class Since(_Temporal):
    pass


class Release(_Temporal):
    pass


class Trigger(_Temporal):
    pass


@dataclass(frozen=True)
class NextF(CFormula):
    """Next-position operator; weak at the end of the evaluation horizon."""

    arg: CFormula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Yesterday(CFormula):
    """``Y^depth``.  Before the origin the operand is read on an empty
    pre-history where no proposition holds and every counter is 0."""

    depth: int
    arg: CFormula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Globally(CFormula):
    arg: CFormula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class WeakUntil(CFormula):
    left: CFormula
    right: CFormula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class IfThenElse(CFormula):
    """``(cond ∧ then) ∨ (¬cond ∧ other)``."""

    cond: CFormula
    then: CFormula
    other: CFormula

    def children(self):
        return (self.cond, self.then, self.other)


def conj(*fs: CFormula) -> CFormula:
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def disj(*fs: CFormula) -> CFormula:
    out = fs[0]
    for f in fs[1:]:
        out = Or(out, f)
    return out


def yesterday(depth: int, f: CFormula) -> CFormula:
    return f if depth == 0 else Yesterday(depth, f)


def eq(lhs: Lin, rhs: Lin) -> Compare:
    return Compare(lhs, Rel.EQ, rhs)


class StateFormulaError(TypeError):
    pass


def pre_origin_value(f: CFormula) -> bool:
    """Value of a state formula on the empty pre-history (counters read 0)."""
    if isinstance(f, Prop):
        return False
    if isinstance(f, NegProp):
        return True
    if isinstance(f, Compare):
        return f.rel.holds(f.lhs.const, f.rhs.const)
    if isinstance(f, Not):
        return not pre_origin_value(f.arg)
    if isinstance(f, And):
        return pre_origin_value(f.left) and pre_origin_value(f.right)
    if isinstance(f, Or):
        return pre_origin_value(f.left) or pre_origin_value(f.right)
    if isinstance(f, IfThenElse):
        return pre_origin_value(f.then if pre_origin_value(f.cond) else f.other)
    if isinstance(f, Yesterday):
        return pre_origin_value(f.arg)
    raise StateFormulaError(f"{type(f).__name__} has no pre-origin value")


# Counters and the translation.


class Role(str, enum.Enum):
    COUNT = "count"
    FLAG = "g"
    CLOSED = "h"
    RUNNING = "s"
    CLOSED_SUM = "a"
    LOOKAHEAD = "b"


@dataclass(frozen=True)
class CounterDecl:
    name: str
    role: Role
    atoms: tuple[str, ...]
    modulo: Optional[int] = None


@dataclass(frozen=True)
class Axiom:
    group: str
    label: str
    formula: CFormula


@dataclass(frozen=True)
class Translation:
    goal: CFormula
    axioms: tuple[Axiom, ...] = ()
    counters: tuple[CounterDecl, ...] = ()

    @property
    def axiom_formulas(self) -> list[CFormula]:
        return [a.formula for a in self.axioms]

    def counter(self, name: str) -> CounterDecl:
        for c in self.counters:
            if c.name == name:
                return c
        raise KeyError(name)


def count_counter(atom: str) -> str:
    return f"c_{atom}"


def pair_counter(role: str, p: str, q: str) -> str:
    return f"{role}_{p}.{q}"


def count_axioms(atom: str, modulo: Optional[int] = None) -> list[Axiom]:
    """Initialisation, increment on a valid occurrence, hold otherwise."""
    c = count_counter(atom)
    if modulo is None:
        step: CFormula = eq(lin(Next(c)), lin(Counter(c), const=1))
    else:
        step = IfThenElse(
            eq(lin(Counter(c)), lin(const=modulo - 1)),
            eq(lin(Next(c)), lin()),
            eq(lin(Next(c)), lin(Counter(c), const=1)),
        )
    return [
        Axiom(c, "A1", eq(lin(Counter(c)), lin())),
        Axiom(c, "A2", Globally(Or(Or(NegProp(VALID), NegProp(atom)), step))),
        Axiom(c, "A3", Globally(Or(And(Prop(VALID), Prop(atom)), eq(lin(Next(c)), lin(Counter(c)))))),
    ]


def dist_axioms(p: str, q: str) -> list[Axiom]:
    """Axioms for the pair flag g, closed count h, running sum s, closed
    sum a and look-ahead b of the (p, q) pair."""
    if p == q:
        raise ValueError("distance pair needs two different atoms")
    g, h, s, a, b = (pair_counter(r, p, q) for r in "ghsab")
    group = f"pair_{p}.{q}"

    def keep(x: str) -> Compare:
        return eq(lin(Next(x)), lin(Counter(x)))

    def bump(x: str) -> Compare:
        return eq(lin(Next(x)), lin(Counter(x), const=1))

    hold_b = WeakUntil(keep(b), And(Prop(VALID), Prop(q)))
    a4 = conj(*(eq(lin(Counter(x)), lin()) for x in (g, h, a, s)))
    a6 = Globally(
        Or(
            disj(NegProp(VALID), NegProp(p), Prop(q)),
            conj(eq(lin(Next(g)), lin(const=1)), bump(s), keep(h), keep(a)),
        )
    )
    a7 = Globally(
        Or(
            disj(NegProp(VALID), NegProp(q), Prop(p)),
            conj(
                eq(lin(Next(g)), lin()),
                bump(h),
                eq(lin(Next(a)), lin(Counter(s))),
                keep(s),
                eq(lin(Counter(b)), lin(Counter(s))),
                NextF(hold_b),
            ),
        )
    )
    a8 = Globally(
        Or(
            And(Prop(VALID), Or(Prop(p), Prop(q))),
            conj(
                keep(g),
                keep(h),
                keep(a),
                Or(Compare(lin(Counter(g)), Rel.NE, lin(const=1)), bump(s)),
                Or(Compare(lin(Counter(g)), Rel.NE, lin()), keep(s)),
            ),
        )
    )
    a9 = Globally(
        Or(
            disj(NegProp(VALID), NegProp(p), NegProp(q)),
            conj(keep(g), bump(h), keep(a), keep(s), NextF(hold_b)),
        )
    )
    return [
        Axiom(group, label, f)
        for label, f in (("A4", a4), ("A5", hold_b), ("A6", a6), ("A7", a7), ("A8", a8), ("A9", a9))
    ]


def translate_count(window: int, op: ComparisonOp, bound: int, atom: str) -> CFormula:
    c = count_counter(atom)
    return Compare(lin(Next(c), (-1, past(window - 1, c))), Rel.of(op), lin(const=bound))


def window_difference(next_value: int, past_value: int, modulus: int) -> int:
    """Occurrences in a window from two readings of a modulo counter."""
    diff = next_value - past_value
    return diff if diff >= 0 else diff + modulus


def translate_optimized_count(
    window: int, op: ComparisonOp, bound: int, atom: str, kmax: int
) -> CFormula:
    """Count check over a counter kept modulo ``kmax + 1``; the wrap-around
    is undone by adding the modulus when the raw difference is negative."""
    if window > kmax:
        raise ValueError(f"window {window} exceeds the largest window {kmax}")
    c = count_counter(atom)
    diff = lin(Next(c), (-1, past(window - 1, c)))
    rel = Rel.of(op)
    return IfThenElse(
        Compare(diff, Rel.GE, lin()),
        Compare(diff, rel, lin(const=bound)),
        Compare(diff + (kmax + 1), rel, lin(const=bound)),
    )


def translate_dist(window: int, op: ComparisonOp, bound: int, p: str, q: str) -> CFormula:
    d = window - 1
    g, h, a, b = (pair_counter(r, p, q) for r in "ghab")
    rel = Rel.of(op)
    closed = lin(Next(h), (-1, past(d, h)))
    n = bound
    # Left-open pair at the window start: discount it and start the sum at b.
    then = Or(
        Compare(closed, Rel.LE, lin(const=1)),
        Compare(lin(Next(a), (-1, past(d, b))), rel, (closed + -1).scaled(n)),
    )
    other = Or(
        Compare(closed, Rel.LE, lin()),
        Compare(lin(Next(a), (-1, past(d, a))), rel, closed.scaled(n)),
    )
    return IfThenElse(eq(lin(past(d, g)), lin(const=1)), then, other)


@dataclass
class _Builder:
    optimized: bool = False
    kmax: int = 0
    decls: dict[str, CounterDecl] = field(default_factory=dict)
    axioms: dict[str, list[Axiom]] = field(default_factory=dict)

    def count(self, window: int, op: ComparisonOp, bound: int, atom: str) -> CFormula:
        name = count_counter(atom)
        if name not in self.decls:
            modulo = self.kmax + 1 if self.optimized else None
            self.decls[name] = CounterDecl(name, Role.COUNT, (atom,), modulo)
            self.axioms[name] = count_axioms(atom, modulo)
        if self.optimized:
            return translate_optimized_count(window, op, bound, atom, self.kmax)
        return translate_count(window, op, bound, atom)

    def pair(self, p: str, q: str) -> None:
        group = f"pair_{p}.{q}"
        if group in self.axioms:
            return
        roles = [Role.FLAG, Role.CLOSED, Role.RUNNING, Role.CLOSED_SUM, Role.LOOKAHEAD]
        for role in roles:
            name = pair_counter(role.value, p, q)
            self.decls[name] = CounterDecl(name, role, (p, q))
        self.axioms[group] = dist_axioms(p, q)

    def max_(self, window: int, sub: int, op: ComparisonOp, bound: int, atom: str) -> CFormula:
        if op is ComparisonOp.EQ:
            return And(
                self.max_(window, sub, ComparisonOp.GE, bound, atom),
                self.max_(window, sub, ComparisonOp.LE, bound, atom),
            )
        m, tail = divmod(window, sub)
        parts = [yesterday(k * sub, self.count(sub, op, bound, atom)) for k in range(m)]
        if tail:
            parts.append(yesterday(m * sub, self.count(tail, op, bound, atom)))
        combine = conj if op in (ComparisonOp.LT, ComparisonOp.LE) else disj
        return combine(*parts)

    def rho(self, f: sf.Formula) -> CFormula:
        if isinstance(f, sf.Atom):
            return Prop(f.name)
        if isinstance(f, sf.NegAtom):
            return NegProp(f.name)
        if isinstance(f, sf.And):
            return And(self.rho(f.left), self.rho(f.right))
        if isinstance(f, sf.Or):
            return Or(self.rho(f.left), self.rho(f.right))
        if isinstance(f, (sf.Until, sf.Since)):
            cls = Until if isinstance(f, sf.Until) else Since
            return cls(
                f.interval,
                Or(NegProp(VALID), self.rho(f.left)),
                And(Prop(VALID), self.rho(f.right)),
            )
        if isinstance(f, (sf.Release, sf.Trigger)):
            cls = Release if isinstance(f, sf.Release) else Trigger
            return cls(
                f.interval,
                And(Prop(VALID), self.rho(f.left)),
                Or(NegProp(VALID), self.rho(f.right)),
            )
        if isinstance(f, sf.Count):
            return self.count(f.window, f.op, f.bound, f.atom)
        if isinstance(f, sf.Avg):
            m = f.window // f.sub
            return self.count(m * f.sub, f.op, f.bound * m, f.atom)
        if isinstance(f, sf.Max):
            return self.max_(f.window, f.sub, f.op, f.bound, f.atom)
        if isinstance(f, sf.Dist):
            self.pair(f.left, f.right)
            return translate_dist(f.window, f.op, f.bound, f.left, f.right)
        if isinstance(f, sf.NegAggregate):
            return Not(self.rho(f.inner))
        raise TypeError(f"formula is not in positive normal form: {type(f).__name__}")


def translate(f: sf.Formula, *, optimized: bool = False, kmax: Optional[int] = None) -> Translation:
    """Compile a positive-normal-form formula.

    With ``optimized`` the count counters are kept modulo ``kmax + 1``
    (``kmax`` defaults to the largest window in ``f``).
    """
    from .formula.normal import max_window

    if optimized:
        needed = max_window(f)
        kmax = needed if kmax is None else kmax
        if kmax < needed:
            raise ValueError(f"kmax {kmax} is smaller than the largest window {needed}")
    b = _Builder(optimized=optimized, kmax=kmax or 0)
    goal = b.rho(f)
    axioms = tuple(ax for group in sorted(b.axioms) for ax in b.axioms[group])
    counters = tuple(b.decls[n] for n in sorted(b.decls))
    return Translation(goal, axioms, counters)


def formula_nodes(f: CFormula) -> int:
    """Node count; comparison terms count one each, exponents count nothing."""
    total = 0
    for node in f.walk():
        total += 1
        if isinstance(node, Compare):
            total += node.lhs.size() + node.rhs.size()
    return total


def translation_size(t: Translation) -> int:
    return formula_nodes(t.goal) + sum(formula_nodes(a.formula) for a in t.axioms)


# Printing.


def _iv(iv: Interval) -> str:
    return "" if iv == UNBOUNDED else str(iv)


_TEMPORAL = {Until: "U", Since: "S", Release: "R", Trigger: "T"}


def to_text(f: CFormula) -> str:
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, NegProp):
        return f"!{f.name}"
    if isinstance(f, Compare):
        return f"{f.lhs} {f.rel.value} {f.rhs}"
    if isinstance(f, Not):
        return f"!({to_text(f.arg)})"
    if isinstance(f, And):
        return f"({to_text(f.left)} && {to_text(f.right)})"
    if isinstance(f, Or):
        return f"({to_text(f.left)} || {to_text(f.right)})"
    if type(f) in _TEMPORAL:
        return f"({to_text(f.left)}) {_TEMPORAL[type(f)]}{_iv(f.interval)} ({to_text(f.right)})"
    if isinstance(f, NextF):
        return f"X({to_text(f.arg)})"
    if isinstance(f, Yesterday):
        return f"Y^{f.depth}({to_text(f.arg)})"
    if isinstance(f, Globally):
        return f"G({to_text(f.arg)})"
    if isinstance(f, WeakUntil):
        return f"({to_text(f.left)}) W ({to_text(f.right)})"
    if isinstance(f, IfThenElse):
        return f"if ({to_text(f.cond)}) then ({to_text(f.then)}) else ({to_text(f.other)})"
    raise TypeError(f"not a target formula: {f!r}")


def render(t: Translation) -> str:
    lines = ["goal:", f"  {to_text(t.goal)}", "counters:"]
    for c in t.counters:
        mod = f" mod {c.modulo}" if c.modulo else ""
        lines.append(f"  {c.name}: {c.role.value}({', '.join(c.atoms)}){mod}")
    lines.append("axioms:")
    for ax in t.axioms:
        lines.append(f"  [{ax.group} {ax.label}] {to_text(ax.formula)}")
    return "\n".join(lines) + "\n"
