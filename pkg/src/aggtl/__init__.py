"""Trace checking for a metric temporal logic with aggregate modalities.

Formulas are checked either directly (``oracle``), through a counter
translation evaluated over the trace (``counters``), or by handing the same
translation to an external SMT solver (``smt``).
"""

from .checker import CheckReport, check, compute_counters, eval_cltlb
from .cltlb import Translation, translate, translation_size
from .formula import formula_size, parse_formula, to_pnf
from .oracle import evaluate
from .trace import TimedWord, expand, generate_trace, parse_trace, serialize

__all__ = [
    "CheckReport", "TimedWord", "Translation", "check", "compute_counters", "eval_cltlb",
    "evaluate", "expand", "formula_size", "generate_trace", "parse_formula", "parse_trace",
    "serialize", "to_pnf", "translate", "translation_size",
]
