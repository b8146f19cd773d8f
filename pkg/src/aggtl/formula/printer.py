"""Concrete-syntax printer; output re-parses to an equal AST."""

from __future__ import annotations

from .ast import (
    And,
    Atom,
    Avg,
    Count,
    Dist,
    Eventually,
    FalseF,
    Formula,
    Globally,
    Historically,
    Implies,
    Max,
    NegAggregate,
    NegAtom,
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

_PREFIX = {Globally: "G", Eventually: "F", PastEventually: "P", Historically: "H"}
_BINARY = {Until: "U", Since: "S", Release: "R", Trigger: "T"}


def _interval(iv) -> str:
    return "" if iv == UNBOUNDED else str(iv)


def to_text(f: Formula) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, NegAtom):
        return f"!{f.name}"
    if isinstance(f, (Not, NegAggregate)):
        inner = f.arg if isinstance(f, Not) else f.inner
        return f"!{to_text(inner)}"
    if isinstance(f, And):
        return f"({to_text(f.left)} && {to_text(f.right)})"
    if isinstance(f, Or):
        return f"({to_text(f.left)} || {to_text(f.right)})"
    if isinstance(f, Implies):
        return f"({to_text(f.left)} -> {to_text(f.right)})"
    if type(f) in _PREFIX:
        return f"{_PREFIX[type(f)]}{_interval(f.interval)}({to_text(f.arg)})"
    if type(f) in _BINARY:
        return (
            f"({to_text(f.left)}) {_BINARY[type(f)]}{_interval(f.interval)} "
            f"({to_text(f.right)})"
        )
    if isinstance(f, Count):
        return f"C[{f.window}]{f.op}{f.bound}({f.atom})"
    if isinstance(f, Avg):
        return f"V[{f.window},{f.sub}]{f.op}{f.bound}({f.atom})"
    if isinstance(f, Max):
        return f"M[{f.window},{f.sub}]{f.op}{f.bound}({f.atom})"
    if isinstance(f, Dist):
        return f"D[{f.window}]{f.op}{f.bound}({f.left}, {f.right})"
    raise TypeError(f"not a formula node: {f!r}")
