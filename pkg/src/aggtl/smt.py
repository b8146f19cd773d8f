"""Bounded SMT-LIB2 encoding and an external-solver driver.

The script asserts the trace exactly, the counter axioms unrolled over the
dense word, and the negated goal at the chosen instant; ``unsat`` therefore
means the property holds.  Variable names::

    e_<i>            validity proposition at position i        (Bool)
    p_<atom>_<i>     atom at position i                        (Bool)
    c_<counter>_<i>  counter value at position i               (Int)

Temporal subformulas are unrolled through auxiliary per-position symbols
(``u<k>_<i>``), defined by equalities over the next or previous position.
"""

from __future__ import annotations

import os
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass
from typing import Optional, Sequence

from . import cltlb as cl
from .formula.ast import INF
from .trace import DenseWord

DEFAULT_TIMEOUT = 60.0
SOLVER_ENV = "AGGTL_SOLVER"


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class SmtScript:
    text: str
    bound: int
    variables: tuple[str, ...]


@dataclass(frozen=True)
class SolverConfig:
    path: str
    timeout: float = DEFAULT_TIMEOUT
    args: tuple[str, ...] = ()

    @classmethod
    def resolve(cls, path: Optional[str] = None, timeout: float = DEFAULT_TIMEOUT) -> SolverConfig:
        """Explicit path, else ``$AGGTL_SOLVER``, else z3 or cvc5 on PATH."""
        candidate = path or os.environ.get(SOLVER_ENV)
        if not candidate:
            candidate = shutil.which("z3") or shutil.which("cvc5")
        if not candidate:
            raise SolverError(
                f"no SMT solver found; install z3 or cvc5, set {SOLVER_ENV}, "
                "or use the counters backend"
            )
        name = os.path.basename(candidate)
        args = ("--lang=smt2",) if name.startswith("cvc") else ()
        return cls(candidate, timeout, args)


@dataclass(frozen=True)
class SolverOutcome:
    status: str  # sat | unsat | unknown | solver-error
    raw: str
    wall_time: float


def atom_var(name: str, i: int) -> str:
    return f"e_{i}" if name == cl.VALID else f"p_{name}_{i}"


def counter_var(name: str, i: int) -> str:
    return f"c_{name}_{i}"


def _and(parts: Sequence[str]) -> str:
    parts = [p for p in parts if p != "true"]
    if "false" in parts:
        return "false"
    if not parts:
        return "true"
    return parts[0] if len(parts) == 1 else f"(and {' '.join(parts)})"


def _or(parts: Sequence[str]) -> str:
    parts = [p for p in parts if p != "false"]
    if "true" in parts:
        return "true"
    if not parts:
        return "false"
    return parts[0] if len(parts) == 1 else f"(or {' '.join(parts)})"


def _not(x: str) -> str:
    if x == "true":
        return "false"
    if x == "false":
        return "true"
    return f"(not {x})"


def _int(v: int) -> str:
    return str(v) if v >= 0 else f"(- {-v})"


_REL = {cl.Rel.LT: "<", cl.Rel.LE: "<=", cl.Rel.GE: ">=", cl.Rel.GT: ">", cl.Rel.EQ: "="}


class _Emitter:
    def __init__(self, w: DenseWord):
        self.w = w
        self.B = w.length
        self.decls: list[str] = []
        self.defs: list[str] = []
        self.aux: dict[tuple[int, int], list[str]] = {}
        self.next_id = 0

    def fresh(self, sort: str, count: int) -> list[str]:
        k = self.next_id
        self.next_id += 1
        names = [f"u{k}_{i}" for i in range(count)]
        self.decls.extend(f"(declare-fun {n} () {sort})" for n in names)
        return names

    def define(self, name: str, expr: str) -> None:
        self.defs.append(f"(assert (= {name} {expr}))")

    def read(self, term: cl.Term, i: int) -> str:
        if isinstance(term, cl.Counter):
            pos = i
        elif isinstance(term, cl.Next):
            pos = min(i + 1, self.B - 1)
        else:
            pos = i - term.depth
        return "0" if pos < 0 else counter_var(term.name, pos)

    def lin(self, e: cl.Lin, i: int) -> str:
        parts = []
        for coef, term in e.terms:
            v = self.read(term, i)
            parts.append(v if coef == 1 else f"(* {_int(coef)} {v})")
        if e.const or not parts:
            parts.append(_int(e.const))
        return parts[0] if len(parts) == 1 else f"(+ {' '.join(parts)})"

    def at(self, f: cl.CFormula, i: int, H: int) -> str:
        """Boolean expression for ``f`` at position ``i`` under horizon ``H``."""
        if isinstance(f, cl.Prop):
            return atom_var(f.name, i)
        if isinstance(f, cl.NegProp):
            return _not(atom_var(f.name, i))
        if isinstance(f, cl.Compare):
            lhs, rhs = self.lin(f.lhs, i), self.lin(f.rhs, i)
            if f.rel is cl.Rel.NE:
                return f"(not (= {lhs} {rhs}))"
            return f"({_REL[f.rel]} {lhs} {rhs})"
        if isinstance(f, cl.Not):
            return _not(self.at(f.arg, i, H))
        if isinstance(f, cl.And):
            return _and([self.at(f.left, i, H), self.at(f.right, i, H)])
        if isinstance(f, cl.Or):
            return _or([self.at(f.left, i, H), self.at(f.right, i, H)])
        if isinstance(f, cl.IfThenElse):
            c = self.at(f.cond, i, H)
            return f"(ite {c} {self.at(f.then, i, H)} {self.at(f.other, i, H)})"
        if isinstance(f, cl.Yesterday):
            if i >= f.depth:
                return self.at(f.arg, i - f.depth, H)
            return "true" if cl.pre_origin_value(f.arg) else "false"
        if isinstance(f, cl.NextF):
            return self.at(f.arg, i + 1, H) if i + 1 < H else "true"
        return self.unrolled(f, H)[i]

    def unrolled(self, f: cl.CFormula, H: int) -> list[str]:
        key = (id(f), H)
        if key not in self.aux:
            self.aux[key] = self._unroll(f, H)
        return self.aux[key]

    def _unroll(self, f: cl.CFormula, H: int) -> list[str]:
        if isinstance(f, (cl.Globally, cl.WeakUntil)):
            out = self.fresh("Bool", H)
            for j in range(H - 1, -1, -1):
                later = out[j + 1] if j + 1 < H else "true"
                if isinstance(f, cl.Globally):
                    expr = _and([self.at(f.arg, j, H), later])
                else:
                    expr = _or([self.at(f.right, j, H), _and([self.at(f.left, j, H), later])])
                self.define(out[j], expr)
            return out
        if isinstance(f, (cl.Until, cl.Since, cl.Release, cl.Trigger)):
            dual = isinstance(f, (cl.Release, cl.Trigger))
            left = [self.at(f.left, j, H) for j in range(H)]
            right = [self.at(f.right, j, H) for j in range(H)]
            if dual:
                left, right = [_not(x) for x in left], [_not(x) for x in right]
            if isinstance(f, (cl.Until, cl.Release)):
                vals = self._until(f.interval, left, right, H)
            else:
                vals = self._since(f.interval, left, right, H)
            return [_not(v) for v in vals] if dual else vals
        raise TypeError(f"not a target formula: {f!r}")

    def _until(self, iv, left, right, H) -> list[str]:
        # nxt[j]: first witness at or after j (H if none); ff[j]: first failure of left.
        nxt, ff = self.fresh("Int", H), self.fresh("Int", H)
        for j in range(H - 1, -1, -1):
            n_later = nxt[j + 1] if j + 1 < H else str(H)
            f_later = ff[j + 1] if j + 1 < H else str(H)
            self.define(nxt[j], f"(ite {right[j]} {j} {n_later})")
            self.define(ff[j], f"(ite {left[j]} {f_later} {j})")
        out = []
        for i in range(H):
            m = i + iv.lo
            if m >= H:
                out.append("false")
                continue
            parts = [f"(< {nxt[m]} {H})", f"(>= {ff[i]} {nxt[m]})"]
            if iv.hi != INF:
                parts.append(f"(<= {nxt[m]} {i + int(iv.hi)})")
            out.append(_and(parts))
        return out

    def _since(self, iv, left, right, H) -> list[str]:
        prv, lf = self.fresh("Int", H), self.fresh("Int", H)
        for j in range(H):
            p_before = prv[j - 1] if j else "(- 1)"
            l_before = lf[j - 1] if j else "(- 1)"
            self.define(prv[j], f"(ite {right[j]} {j} {p_before})")
            self.define(lf[j], f"(ite {left[j]} {l_before} {j})")
        out = []
        for i in range(H):
            m = i - iv.lo
            if m < 0:
                out.append("false")
                continue
            parts = [f"(>= {prv[m]} 0)", f"(<= {lf[i]} {prv[m]})"]
            if iv.hi != INF:
                parts.append(f"(>= {prv[m]} {i - int(iv.hi)})")
            out.append(_and(parts))
        return out


def emit(t: cl.Translation, w: DenseWord, instant: int) -> SmtScript:
    """SMT-LIB2 script that is unsat iff the goal holds at ``instant``."""
    if not 0 <= instant <= w.last:
        raise ValueError(f"instant {instant} outside the trace [0, {w.last}]")
    B = w.length
    atoms = set(w.alphabet)
    for f in [t.goal, *t.axiom_formulas]:
        atoms.update(n.name for n in f.walk() if isinstance(n, (cl.Prop, cl.NegProp)))
    atoms.discard(cl.VALID)
    atom_names = sorted(atoms)

    em = _Emitter(w)
    trace_lines = []
    variables: list[str] = []
    for i in range(B):
        lits = [atom_var(cl.VALID, i) if w.e(i) else _not(atom_var(cl.VALID, i))]
        variables.append(atom_var(cl.VALID, i))
        for a in atom_names:
            v = atom_var(a, i)
            variables.append(v)
            lits.append(v if w.holds(a, i) else _not(v))
        trace_lines.append(f"(assert (and {' '.join(lits)}))" if len(lits) > 1 else f"(assert {lits[0]})")
    for c in t.counters:
        variables.extend(counter_var(c.name, i) for i in range(B))

    axiom_lines = [
        f"(assert {em.at(ax.formula, 0, B - 1)}) ; {ax.group} {ax.label}" for ax in t.axioms
    ]
    goal = f"(assert {_not(em.at(t.goal, instant, B))})"

    header = ["(set-logic QF_LIA)"]
    header += [f"(declare-fun {v} () Bool)" for v in variables if not v.startswith("c_")]
    header += [f"(declare-fun {v} () Int)" for v in variables if v.startswith("c_")]
    body = header + em.decls + trace_lines + em.defs + axiom_lines + [goal, "(check-sat)", "(exit)"]
    return SmtScript("\n".join(body) + "\n", B, tuple(variables))


def run(script: SmtScript, solver: SolverConfig) -> SolverOutcome:
    """Write ``script`` to a temp file and run the solver on it."""
    with tempfile.NamedTemporaryFile("w", suffix=".smt2", delete=False) as fh:
        fh.write(script.text)
        path = fh.name
    start = time.perf_counter()
    try:
        proc = subprocess.run(
            [solver.path, *solver.args, path],
            capture_output=True,
            text=True,
            timeout=solver.timeout,
        )
    except subprocess.TimeoutExpired:
        return SolverOutcome("unknown", "timeout", time.perf_counter() - start)
    except OSError as exc:
        return SolverOutcome(
            "solver-error",
            f"cannot run {solver.path!r}: {exc}; use the counters backend instead",
            time.perf_counter() - start,
        )
    finally:
        os.unlink(path)
    elapsed = time.perf_counter() - start
    raw = proc.stdout + proc.stderr
    tokens = proc.stdout.split()
    first = tokens[0] if tokens else ""
    if first in ("sat", "unsat", "unknown"):
        return SolverOutcome(first, raw, elapsed)
    return SolverOutcome("solver-error", raw, elapsed)


def interpret(outcome: SolverOutcome) -> bool:
    """``unsat`` (the negated goal is impossible) means the property holds."""
    if outcome.status == "unsat":
        return True
    if outcome.status == "sat":
        return False
    detail = outcome.raw.strip().splitlines()[:3]
    raise SolverError(f"solver returned {outcome.status}: {' | '.join(detail)}")
