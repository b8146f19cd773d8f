from .ast import (
    AGGREGATES,
    INF,
    TRUE_ATOM,
    UNBOUNDED,
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
    atoms,
)
from .normal import BOTTOM, TOP, desugar, formula_size, is_pnf, max_window, to_pnf
from .parser import ParseError, parse_formula
from .printer import to_text

__all__ = [
    "AGGREGATES", "INF", "TRUE_ATOM", "UNBOUNDED", "And", "Atom", "Avg", "BOTTOM",
    "ComparisonOp", "Count", "Dist", "Eventually", "FalseF", "Formula", "FormulaError",
    "Globally", "Historically", "Implies", "Interval", "Max", "NegAggregate", "NegAtom",
    "Not", "Or", "ParseError", "PastEventually", "Release", "Since", "TOP", "Trigger",
    "TrueF", "Until", "atoms", "desugar", "formula_size", "is_pnf", "max_window",
    "parse_formula", "to_pnf", "to_text",
]
