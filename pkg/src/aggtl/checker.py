"""Deterministic backend: compute every counter over a concrete trace, then
evaluate the translated goal, no solver involved.

On a concrete trace the axioms leave each counter no choice, so one forward
pass (count, flag, closed, running and closed-sum counters) and one backward
pass (the look-ahead counter) produce the valuation directly.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import Literal, Optional, Union

from . import cltlb as cl
from . import oracle
from .formula.ast import Formula
from .formula.normal import formula_size, to_pnf
from .trace import DenseWord, TimedWord, expand

BACKENDS = ("oracle", "counters", "smt")
Backend = Literal["oracle", "counters", "smt"]


@dataclass(frozen=True)
class CounterValuation:
    """Counter values per position ``0..B-1``.

    Reads before the origin give 0.  Reads past the end give the value at
    ``B-1``: that position carries no events, so no counter changes there.
    """

    values: dict[str, list[int]]
    length: int

    def __getitem__(self, name: str) -> list[int]:
        return self.values[name]

    def read(self, name: str, pos: int) -> int:
        if pos < 0:
            return 0
        return self.values[name][min(pos, self.length - 1)]

    def snapshot(self, pos: int, names) -> tuple[int, ...]:
        return tuple(self.read(n, pos) for n in names)


def _pair_case(w: DenseWord, p: str, q: str, t: int) -> str:
    has_p, has_q = w.holds(p, t), w.holds(q, t)
    if has_p and has_q:
        return "both"
    if has_p:
        return "open"
    if has_q:
        return "close"
    return "idle"


def compute_counters(t: cl.Translation, w: DenseWord, *, lax: bool = False) -> CounterValuation:
    """The valuation the axioms force on ``w``.

    Raises :class:`~aggtl.trace.AlternationError` when a distance pair does
    not alternate, unless ``lax`` is set.
    """
    B = w.length
    values: dict[str, list[int]] = {}
    pairs: set[tuple[str, str]] = set()
    for decl in t.counters:
        if decl.role is cl.Role.COUNT:
            (atom,) = decl.atoms
            c = [0] * B
            for i in range(B - 1):
                step = c[i] + 1 if w.holds(atom, i) else c[i]
                c[i + 1] = step % decl.modulo if decl.modulo else step
            values[decl.name] = c
        else:
            pairs.add(decl.atoms)

    for p, q in sorted(pairs):
        if not lax:
            oracle.pair_instances(w, p, q)
        g, h, s, a, b = ([0] * B for _ in range(5))
        for i in range(B - 1):
            case = _pair_case(w, p, q, i)
            g[i + 1], h[i + 1], s[i + 1], a[i + 1] = g[i], h[i], s[i], a[i]
            if case == "open":
                g[i + 1], s[i + 1] = 1, s[i] + 1
            elif case == "close":
                g[i + 1], h[i + 1], a[i + 1] = 0, h[i] + 1, s[i]
            elif case == "both":
                h[i + 1] = h[i] + 1
            elif g[i] == 1:
                s[i + 1] = s[i] + 1
        # b is pinned to s at each close and held constant in between; after
        # the last close nothing constrains it and it takes the final s.
        b[B - 1] = s[B - 1]
        for i in range(B - 2, -1, -1):
            b[i] = s[i] if _pair_case(w, p, q, i) == "close" else b[i + 1]
        for role, arr in zip("ghsab", (g, h, s, a, b)):
            values[cl.pair_counter(role, p, q)] = arr
    return CounterValuation(values, B)


class _VectorEval:
    """Evaluates target formulas at every position below ``horizon`` at once."""

    def __init__(self, w: DenseWord, delta: CounterValuation, horizon: int):
        self.w = w
        self.delta = delta
        self.H = horizon
        self.memo: dict[int, list[bool]] = {}

    def term(self, term: cl.Term) -> list[int]:
        values, H = self.delta[term.name], self.H
        if isinstance(term, cl.Counter):
            shift = 0
        elif isinstance(term, cl.Next):
            shift = 1
        else:
            shift = -term.depth
        # pad with zeros before the origin and the final value past the end
        lo = max(0, -shift)
        head = [0] * min(lo, H)
        body = values[lo + shift : H + shift] if lo < H else []
        tail = [values[-1]] * (H - len(head) - len(body))
        return head + body + tail

    def lin(self, e: cl.Lin) -> list[int]:
        out = [e.const] * self.H
        for coef, term in e.terms:
            out = [x + coef * v for x, v in zip(out, self.term(term))]
        return out

    def vec(self, f: cl.CFormula) -> list[bool]:
        hit = self.memo.get(id(f))
        if hit is None:
            hit = self.memo[id(f)] = self._vec(f)
        return hit

    def _until(self, lo, hi, left: list[bool], right: list[bool]) -> list[bool]:
        H = self.H
        nxt = [H] * (H + 1)
        ff = [H] * (H + 1)
        for j in range(H - 1, -1, -1):
            nxt[j] = j if right[j] else nxt[j + 1]
            ff[j] = ff[j + 1] if left[j] else j
        out = []
        for i in range(H):
            m = i + lo
            ok = m < H and nxt[m] < H and nxt[m] - i <= hi and ff[i] >= nxt[m]
            out.append(ok)
        return out

    def _since(self, lo, hi, left: list[bool], right: list[bool]) -> list[bool]:
        H = self.H
        prv, lf = [-1] * H, [-1] * H
        for j in range(H):
            prv[j] = j if right[j] else (prv[j - 1] if j else -1)
            lf[j] = (lf[j - 1] if j else -1) if left[j] else j
        out = []
        for i in range(H):
            m = i - lo
            ok = m >= 0 and prv[m] >= 0 and i - prv[m] <= hi and lf[i] <= prv[m]
            out.append(ok)
        return out

    def _vec(self, f: cl.CFormula) -> list[bool]:
        H, w = self.H, self.w
        if isinstance(f, (cl.Prop, cl.NegProp)):
            if f.name == cl.VALID:
                vals = [w.e(t) for t in range(H)]
            else:
                vals = [w.holds(f.name, t) for t in range(H)]
            return vals if isinstance(f, cl.Prop) else [not x for x in vals]
        if isinstance(f, cl.Compare):
            lhs, rhs = self.lin(f.lhs), self.lin(f.rhs)
            return list(map(cl.REL_FN[f.rel.value], lhs, rhs))
        if isinstance(f, cl.Not):
            return [not x for x in self.vec(f.arg)]
        if isinstance(f, cl.And):
            return [x and y for x, y in zip(self.vec(f.left), self.vec(f.right))]
        if isinstance(f, cl.Or):
            return [x or y for x, y in zip(self.vec(f.left), self.vec(f.right))]
        if isinstance(f, cl.IfThenElse):
            return [
                x if c else y
                for c, x, y in zip(self.vec(f.cond), self.vec(f.then), self.vec(f.other))
            ]
        if isinstance(f, (cl.Until, cl.Since, cl.Release, cl.Trigger)):
            lo, hi = f.interval.lo, f.interval.hi
            left, right = self.vec(f.left), self.vec(f.right)
            if isinstance(f, (cl.Release, cl.Trigger)):
                left, right = [not x for x in left], [not x for x in right]
            scan = self._until if isinstance(f, (cl.Until, cl.Release)) else self._since
            out = scan(lo, hi, left, right)
            if isinstance(f, (cl.Release, cl.Trigger)):
                out = [not x for x in out]
            return out
        if isinstance(f, cl.NextF):
            arg = self.vec(f.arg)
            return [arg[t + 1] if t + 1 < H else True for t in range(H)]
        if isinstance(f, cl.Yesterday):
            arg = self.vec(f.arg)
            before = None
            out = []
            for t in range(H):
                if t >= f.depth:
                    out.append(arg[t - f.depth])
                else:
                    if before is None:
                        before = cl.pre_origin_value(f.arg)
                    out.append(before)
            return out
        if isinstance(f, cl.Globally):
            arg, out, acc = self.vec(f.arg), [False] * H, True
            for t in range(H - 1, -1, -1):
                acc = acc and arg[t]
                out[t] = acc
            return out
        if isinstance(f, cl.WeakUntil):
            left, right = self.vec(f.left), self.vec(f.right)
            out, acc = [False] * H, True
            for t in range(H - 1, -1, -1):
                acc = right[t] or (left[t] and acc)
                out[t] = acc
            return out
        raise TypeError(f"not a target formula: {f!r}")


def eval_cltlb(
    f: cl.CFormula,
    w: DenseWord,
    delta: CounterValuation,
    i: int,
    *,
    horizon: Optional[int] = None,
) -> bool:
    """Truth of ``f`` at position ``i``.

    Only positions below ``horizon`` (default: the whole dense word) exist
    for the temporal operators: Until needs its witness there, while
    Globally, weak until, Release and Next are satisfied past the end.
    """
    H = w.length if horizon is None else horizon
    if not 0 <= i < H:
        raise oracle.EvaluationError(f"position {i} outside [0, {H})")
    return _VectorEval(w, delta, H).vec(f)[i]


def axioms_hold(t: cl.Translation, w: DenseWord, delta: CounterValuation) -> bool:
    """Whether ``delta`` satisfies every axiom (unrolled up to ``B-2``)."""
    ev = _VectorEval(w, delta, w.length - 1)
    return all(ev.vec(ax.formula)[0] for ax in t.axioms)


@dataclass
class CheckReport:
    verdict: Optional[bool]
    backend: str
    instant: int
    wall_time_ms: float = 0.0
    trace_entries: int = 0
    dense_length: int = 0
    counters: int = 0
    formula_size: int = 0
    error: Optional[str] = None
    extra: dict = field(default_factory=dict)

    @property
    def verdict_text(self) -> str:
        if self.verdict is None:
            return "error"
        return "holds" if self.verdict else "violated"

    def to_dict(self) -> dict:
        out = asdict(self)
        out["verdict"] = self.verdict_text
        return out

    def to_line(self) -> str:
        fields = [
            f"backend={self.backend}",
            f"verdict={self.verdict_text}",
            f"instant={self.instant}",
            f"wall_ms={self.wall_time_ms:.3f}",
            f"entries={self.trace_entries}",
            f"B={self.dense_length}",
            f"counters={self.counters}",
            f"size={self.formula_size}",
        ]
        if self.error:
            fields.append(f"error={self.error!r}")
        return " ".join(fields)


def resolve_instant(w: TimedWord, instant: Union[int, str]) -> int:
    if instant == "last":
        return w.last
    i = int(instant)
    if not 0 <= i <= w.last:
        raise oracle.EvaluationError(f"instant {i} outside the trace [0, {w.last}]")
    return i


def check(
    f: Formula,
    w: TimedWord,
    instant: Union[int, str] = "last",
    backend: Backend = "counters",
    *,
    lax: bool = False,
    optimized: bool = False,
    kmax: Optional[int] = None,
    solver=None,
) -> CheckReport:
    """Check ``f`` on ``w`` at ``instant`` with one backend.

    ``solver`` is an :class:`aggtl.smt.SolverConfig`, used by the smt
    backend only (resolved from the environment when omitted).
    """
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    i = resolve_instant(w, instant)
    dense = expand(w)
    start = time.perf_counter()
    n_counters = 0
    if backend == "oracle":
        verdict = oracle.evaluate(f, dense, i)
    else:
        tr = cl.translate(to_pnf(f), optimized=optimized, kmax=kmax)
        n_counters = len(tr.counters)
        if backend == "counters":
            delta = compute_counters(tr, dense, lax=lax)
            verdict = eval_cltlb(tr.goal, dense, delta, i)
        else:
            from . import smt

            if not lax:
                for decl in tr.counters:
                    if decl.role is cl.Role.FLAG:
                        oracle.pair_instances(dense, *decl.atoms)
            cfg = solver if solver is not None else smt.SolverConfig.resolve()
            verdict = smt.interpret(smt.run(smt.emit(tr, dense, i), cfg))
    elapsed = (time.perf_counter() - start) * 1000
    return CheckReport(
        verdict=verdict,
        backend=backend,
        instant=i,
        wall_time_ms=elapsed,
        trace_entries=len(w),
        dense_length=dense.length,
        counters=n_counters,
        formula_size=formula_size(f),
    )
