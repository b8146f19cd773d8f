"""Reference evaluator: the semantics read off directly, by scanning.

Conventions shared with every other backend:

* position ``t`` of the dense word is timestamp ``t``; atoms hold only at
  event-carrying positions;
* Until/Since need a witness at an event position and constrain their left
  operand only at event positions in between; Until is strong (the witness
  must lie inside the trace), Release is its weak dual;
* aggregate windows are ``[i-K+1, i]`` clipped at 0;
* Dist averages over pair instances with ``open >= i-K+1`` and
  ``close <= i`` and is true when there are none.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formula.ast import (
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
    Until,
)
from .trace import AlternationError, DenseWord


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class PairInstance:
    open_at: int
    close_at: int

    @property
    def distance(self) -> int:
        return self.close_at - self.open_at


def pair_instances(w: DenseWord, p: str, q: str) -> list[PairInstance]:
    """Closed instances of the (p, q) pair, in order.

    Raises :class:`AlternationError` when p and q do not alternate.
    """
    out: list[PairInstance] = []
    open_at = None
    for t in range(w.length):
        has_p, has_q = w.holds(p, t), w.holds(q, t)
        if has_p and has_q:
            if open_at is not None:
                raise AlternationError(f"{p} and {q} together while an instance is open", t)
            out.append(PairInstance(t, t))
        elif has_p:
            if open_at is not None:
                raise AlternationError(f"second {p} before {q}", t)
            open_at = t
        elif has_q:
            if open_at is None:
                raise AlternationError(f"{q} without a preceding {p}", t)
            out.append(PairInstance(open_at, t))
            open_at = None
    return out


class _Oracle:
    def __init__(self, w: DenseWord):
        self.w = w
        self.memo: dict[tuple[int, int], bool] = {}
        self.pairs: dict[tuple[str, str], list[PairInstance]] = {}

    def count(self, atom: str, lo: int, hi: int) -> int:
        lo = max(lo, 0)
        return sum(1 for t in range(lo, hi + 1) if self.w.holds(atom, t))

    def ev(self, f: Formula, i: int) -> bool:
        key = (id(f), i)
        hit = self.memo.get(key)
        if hit is None:
            hit = self.memo[key] = self._ev(f, i)
        return hit

    def _ev(self, f: Formula, i: int) -> bool:
        w = self.w
        if isinstance(f, Atom):
            return w.holds(f.name, i)
        if isinstance(f, NegAtom):
            return not w.holds(f.name, i)
        if isinstance(f, TrueF):
            return True
        if isinstance(f, FalseF):
            return False
        if isinstance(f, (Not, NegAggregate)):
            return not self.ev(f.arg if isinstance(f, Not) else f.inner, i)
        if isinstance(f, And):
            return self.ev(f.left, i) and self.ev(f.right, i)
        if isinstance(f, Or):
            return self.ev(f.left, i) or self.ev(f.right, i)
        if isinstance(f, Implies):
            return not self.ev(f.left, i) or self.ev(f.right, i)

        if isinstance(f, Until):
            iv = f.interval
            for j in range(i, w.length):
                if j - i > iv.hi:
                    break
                if iv.contains(j - i) and w.e(j) and self.ev(f.right, j):
                    return True
                if w.e(j) and not self.ev(f.left, j):
                    return False
            return False
        if isinstance(f, Since):
            iv = f.interval
            for j in range(i, -1, -1):
                if i - j > iv.hi:
                    break
                if iv.contains(i - j) and w.e(j) and self.ev(f.right, j):
                    return True
                if w.e(j) and not self.ev(f.left, j):
                    return False
            return False
        if isinstance(f, Release):
            iv = f.interval
            for j in range(i, w.length):
                if j - i > iv.hi:
                    break
                if iv.contains(j - i) and w.e(j) and not self.ev(f.right, j):
                    return False
                if w.e(j) and self.ev(f.left, j):
                    return True
            return True
        if isinstance(f, Trigger):
            iv = f.interval
            for j in range(i, -1, -1):
                if i - j > iv.hi:
                    break
                if iv.contains(i - j) and w.e(j) and not self.ev(f.right, j):
                    return False
                if w.e(j) and self.ev(f.left, j):
                    return True
            return True
        if isinstance(f, (Globally, Eventually)):
            iv = f.interval
            js = [j for j in range(i, w.length) if iv.contains(j - i) and w.e(j)]
            vals = (self.ev(f.arg, j) for j in js)
            return all(vals) if isinstance(f, Globally) else any(vals)
        if isinstance(f, (Historically, PastEventually)):
            iv = f.interval
            js = [j for j in range(i, -1, -1) if iv.contains(i - j) and w.e(j)]
            vals = (self.ev(f.arg, j) for j in js)
            return all(vals) if isinstance(f, Historically) else any(vals)

        if isinstance(f, Count):
            return f.op.holds(self.count(f.atom, i - f.window + 1, i), f.bound)
        if isinstance(f, Avg):
            m = f.window // f.sub
            return f.op.holds(self.count(f.atom, i - m * f.sub + 1, i), f.bound * m)
        if isinstance(f, Max):
            m, h = f.window // f.sub, f.sub
            counts = [self.count(f.atom, i - (q + 1) * h + 1, i - q * h) for q in range(m)]
            if f.window % h:
                counts.append(self.count(f.atom, i - f.window + 1, i - m * h))
            return f.op.holds(max(counts), f.bound)
        if isinstance(f, Dist):
            key = (f.left, f.right)
            if key not in self.pairs:
                self.pairs[key] = pair_instances(w, *key)
            lo = i - f.window + 1
            inside = [p for p in self.pairs[key] if p.open_at >= lo and p.close_at <= i]
            if not inside:
                return True
            total = sum(p.distance for p in inside)
            # average compared by cross-multiplication, len(inside) > 0
            return f.op.holds(total, f.bound * len(inside))
        raise TypeError(f"not a formula node: {f!r}")


def evaluate(f: Formula, w: DenseWord, i: int) -> bool:
    """Truth value of ``f`` at position ``i`` (``0 <= i <= w.last``)."""
    if not 0 <= i <= w.last:
        raise EvaluationError(f"instant {i} outside the trace [0, {w.last}]")
    return _Oracle(w).ev(f, i)


def evaluate_all(f: Formula, w: DenseWord, instants) -> list[bool]:
    """Evaluate at several instants sharing one memo table."""
    o = _Oracle(w)
    out = []
    for i in instants:
        if not 0 <= i <= w.last:
            raise EvaluationError(f"instant {i} outside the trace [0, {w.last}]")
        out.append(o.ev(f, i))
    return out
