"""Timed traces: data model, file format, dense expansion, and a generator.

Trace file format, one line per instant::

    # comment
    0: logOn
    5: withdraw, getBalance

Timestamps must strictly increase.  :func:`serialize` writes atoms sorted
within each line, so output is byte-stable.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

_ATOM_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class TraceError(ValueError):
    """Malformed or invalid trace."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class AlternationError(TraceError):
    """Start/end events of a pair do not alternate."""

    def __init__(self, message: str, timestamp: int):
        super().__init__(f"timestamp {timestamp}: {message}")
        self.timestamp = timestamp


@dataclass(frozen=True)
class TimedWord:
    entries: tuple[tuple[int, frozenset[str]], ...]

    def __post_init__(self) -> None:
        prev = -1
        for ts, events in self.entries:
            if ts < 0:
                raise TraceError(f"negative timestamp {ts}")
            if ts <= prev:
                raise TraceError(f"timestamps must strictly increase ({prev} then {ts})")
            if not events:
                raise TraceError(f"timestamp {ts} carries no events")
            prev = ts

    @classmethod
    def of(cls, entries: Iterable[tuple[int, Iterable[str]]]) -> TimedWord:
        return cls(tuple((int(ts), frozenset(evs)) for ts, evs in entries))

    @property
    def alphabet(self) -> frozenset[str]:
        return frozenset().union(*(evs for _, evs in self.entries))

    @property
    def last(self) -> int:
        if not self.entries:
            raise TraceError("empty trace")
        return self.entries[-1][0]

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class DenseWord:
    """Position-indexed expansion; position ``t`` is timestamp ``t``.

    One trailing position without events is appended so that next-instant
    counter reads at the last timestamp stay in range.
    """

    events: tuple[frozenset[str], ...]
    alphabet: frozenset[str] = field(default=frozenset())

    @property
    def length(self) -> int:
        return len(self.events)

    @property
    def last(self) -> int:
        """Last position that may carry events (``length - 2``)."""
        return len(self.events) - 2

    def at(self, i: int) -> frozenset[str]:
        return self.events[i]

    def e(self, i: int) -> bool:
        return bool(self.events[i])

    def holds(self, atom: str, i: int) -> bool:
        return atom in self.events[i]

    def collapse(self) -> TimedWord:
        return TimedWord(tuple((i, evs) for i, evs in enumerate(self.events) if evs))


def expand(w: TimedWord) -> DenseWord:
    events = [frozenset()] * (w.last + 2)
    for ts, evs in w.entries:
        events[ts] = evs
    return DenseWord(tuple(events), w.alphabet)


def parse_trace(text: str) -> TimedWord:
    entries: list[tuple[int, frozenset[str]]] = []
    prev = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        stamp, sep, rest = line.partition(":")
        if not sep or not stamp.strip().isdigit():
            raise TraceError(f"expected '<timestamp>: <atom>, ...', got {raw.strip()!r}", lineno)
        ts = int(stamp)
        names = [a.strip() for a in rest.split(",")]
        if not names or any(not _ATOM_RE.match(a) for a in names):
            raise TraceError(f"malformed atom list {rest.strip()!r}", lineno)
        if prev is not None and ts <= prev:
            kind = "duplicate" if ts == prev else "non-monotonic"
            raise TraceError(f"{kind} timestamp {ts} after {prev}", lineno)
        entries.append((ts, frozenset(names)))
        prev = ts
    if not entries:
        raise TraceError("empty trace")
    return TimedWord(tuple(entries))


def serialize(w: TimedWord) -> str:
    return "".join(f"{ts}: {', '.join(sorted(evs))}\n" for ts, evs in w.entries)


def sparseness(w: TimedWord) -> Fraction:
    """Fraction of instants in ``[0, last]`` that carry events."""
    return Fraction(len(w.entries), w.last + 1)


@dataclass(frozen=True)
class PairSpec:
    start: str
    end: str
    min_duration: int
    max_duration: int


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int
    horizon: int
    sparseness: float = 1.0
    alphabet: Mapping[str, float] = field(default_factory=dict)
    pairs: Sequence[PairSpec] = ()

    def validate(self) -> None:
        if not 0 < self.sparseness <= 1:
            raise ValueError(f"sparseness must be in (0, 1], got {self.sparseness}")
        if self.horizon < 0:
            raise ValueError("horizon must be natural")
        if not self.alphabet and not self.pairs:
            raise ValueError("generator needs an alphabet or at least one pair")
        for name, prob in self.alphabet.items():
            if not 0 <= prob <= 1:
                raise ValueError(f"probability of {name!r} must be in [0, 1], got {prob}")
        pair_atoms: set[str] = set()
        for p in self.pairs:
            if p.start == p.end:
                raise ValueError(f"pair ({p.start}, {p.end}) needs distinct atoms")
            if not 0 <= p.min_duration <= p.max_duration:
                raise ValueError(f"bad duration range [{p.min_duration}, {p.max_duration}]")
            if p.min_duration > self.horizon:
                raise ValueError(
                    f"pair ({p.start}, {p.end}) min duration {p.min_duration} "
                    f"exceeds horizon {self.horizon}"
                )
            pair_atoms.update((p.start, p.end))
        clash = pair_atoms & set(self.alphabet)
        if clash:
            raise ValueError(f"pair atoms also in the free alphabet: {sorted(clash)}")
        if len(pair_atoms) < 2 * len(self.pairs):
            raise ValueError("pairs must not share atoms")


def _pair_schedule(rng: random.Random, spec: PairSpec, horizon: int, target: float) -> dict[int, set[str]]:
    out: dict[int, set[str]] = {}
    mean_dur = (spec.min_duration + spec.max_duration) / 2
    # Gap chosen so that two events per (duration + gap) instants approximates the target density.
    mean_gap = max(1.0, 2 / target - mean_dur)
    t = rng.randrange(0, int(mean_gap) + 1)
    while True:
        d = rng.randint(spec.min_duration, spec.max_duration)
        if t + d > horizon:
            break
        out.setdefault(t, set()).add(spec.start)
        out.setdefault(t + d, set()).add(spec.end)
        t += d + 1 + rng.randrange(0, max(1, int(2 * mean_gap - 1)))
    return out


def generate_trace(cfg: GeneratorConfig) -> TimedWord:
    """Seeded synthetic trace; the same config always yields the same trace.

    Free-alphabet events fill randomly chosen instants until the requested
    sparseness is met; each chosen instant gets every atom independently
    with its probability, and at least one atom.  Pair atoms alternate
    strictly start, end, start, end.
    """
    cfg.validate()
    rng = random.Random(cfg.seed)
    instants = cfg.horizon + 1
    target = max(1, round(cfg.sparseness * instants))

    events: dict[int, set[str]] = {}
    for spec in cfg.pairs:
        for t, evs in _pair_schedule(rng, spec, cfg.horizon, cfg.sparseness).items():
            events.setdefault(t, set()).update(evs)

    names = sorted(cfg.alphabet)
    weights = [cfg.alphabet[n] for n in names]
    if names:
        free = [t for t in range(instants) if t not in events]
        missing = max(0, target - len(events))
        chosen = rng.sample(free, min(missing, len(free)))
        for t in sorted(chosen):
            evs = {n for n, p in zip(names, weights) if rng.random() < p}
            if not evs:
                evs = {rng.choices(names, weights=weights if any(weights) else None)[0]}
            events[t] = evs
    return TimedWord(tuple((t, frozenset(events[t])) for t in sorted(events)))
