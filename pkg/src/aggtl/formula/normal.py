"""Desugaring, positive normal form, and size measures."""

from __future__ import annotations

import dataclasses

from .ast import (
    AGGREGATES,
    TRUE_ATOM,
    And,
    Atom,
    Dist,
    ComparisonOp,
    Eventually,
    FalseF,
    Formula,
    Globally,
    Historically,
    Implies,
    NegAggregate,
    NegAtom,
    Not,
    Or,
    PastEventually,
    Release,
    Since,
    Trigger,
    TrueF,
    Until,
    aggregate_atoms,
)

TOP: Formula = Or(Atom(TRUE_ATOM), Not(Atom(TRUE_ATOM)))
BOTTOM: Formula = And(Atom(TRUE_ATOM), Not(Atom(TRUE_ATOM)))

_DUAL = {Until: Release, Release: Until, Since: Trigger, Trigger: Since}


def desugar(f: Formula) -> Formula:
    """Rewrite derived operators into the core syntax.

    ``G φ = ¬(⊤ U ¬φ)``, ``F φ = ⊤ U φ``, ``P φ = ⊤ S φ``,
    ``H φ = ¬(⊤ S ¬φ)``, ``a → b = ¬a ∨ b``; ⊤/⊥ use the reserved atom.
    """
    if isinstance(f, TrueF):
        return TOP
    if isinstance(f, FalseF):
        return BOTTOM
    if isinstance(f, Implies):
        return Or(Not(desugar(f.left)), desugar(f.right))
    if isinstance(f, Globally):
        return Not(Until(f.interval, TOP, Not(desugar(f.arg))))
    if isinstance(f, Eventually):
        return Until(f.interval, TOP, desugar(f.arg))
    if isinstance(f, PastEventually):
        return Since(f.interval, TOP, desugar(f.arg))
    if isinstance(f, Historically):
        return Not(Since(f.interval, TOP, Not(desugar(f.arg))))
    if isinstance(f, Not):
        return Not(desugar(f.arg))
    if isinstance(f, (And, Or)):
        return type(f)(desugar(f.left), desugar(f.right))
    if isinstance(f, (Until, Since, Release, Trigger)):
        return type(f)(f.interval, desugar(f.left), desugar(f.right))
    return f


def _negate_aggregate(agg: Formula) -> Formula:
    if isinstance(agg, Dist) or agg.op is ComparisonOp.EQ:
        return NegAggregate(agg)
    return dataclasses.replace(agg, op=agg.op.negated())


def _pnf(f: Formula, neg: bool) -> Formula:
    if isinstance(f, Atom):
        return NegAtom(f.name) if neg else f
    if isinstance(f, NegAtom):
        return Atom(f.name) if neg else f
    if isinstance(f, Not):
        return _pnf(f.arg, not neg)
    if isinstance(f, NegAggregate):
        return f.inner if neg else f
    if isinstance(f, (And, Or)):
        cls = type(f)
        if neg:
            cls = Or if cls is And else And
        return cls(_pnf(f.left, neg), _pnf(f.right, neg))
    if isinstance(f, (Until, Since, Release, Trigger)):
        cls = _DUAL[type(f)] if neg else type(f)
        return cls(f.interval, _pnf(f.left, neg), _pnf(f.right, neg))
    if isinstance(f, AGGREGATES):
        return _negate_aggregate(f) if neg else f
    raise TypeError(f"unexpected node in desugared formula: {f!r}")


def to_pnf(f: Formula) -> Formula:
    """Push negations to the leaves.

    Negated aggregates are flipped in place when the comparison has a
    complement (<, <=, >=, >); EQ-bounded ones and every negated Dist stay
    wrapped in :class:`NegAggregate` because Dist is vacuously true on an
    empty window and flipping would not be a negation.
    """
    return _pnf(desugar(f), False)


def is_pnf(f: Formula) -> bool:
    allowed = (Atom, NegAtom, NegAggregate, And, Or, Until, Since, Release, Trigger) + AGGREGATES
    return all(isinstance(node, allowed) for node in f.walk())


def formula_size(f: Formula) -> int:
    """Node count; aggregate arguments count one node per atom, windows none."""
    return sum(1 + len(aggregate_atoms(node)) for node in f.walk())


def max_window(f: Formula) -> int:
    return max((node.window for node in f.walk() if isinstance(node, AGGREGATES)), default=0)
