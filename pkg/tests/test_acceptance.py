"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Tolerances are the ones stated for each criterion and are not relaxed here.
"""

import dataclasses
import random
import shutil
import statistics
import time
import timeit

import pytest

import gen
from aggtl import cltlb as cl
from aggtl import smt
from aggtl.checker import check, compute_counters, eval_cltlb
from aggtl.cli import bench_trace
from aggtl.formula import (
    AGGREGATES,
    Avg,
    ComparisonOp,
    Count,
    Dist,
    Max,
    NegAggregate,
    Not,
    formula_size,
    parse_formula,
    to_pnf,
)
from aggtl.formula import ast as sf
from aggtl.oracle import evaluate, pair_instances
from aggtl.trace import TimedWord, expand

HAVE_SOLVER = bool(shutil.which("z3") or shutil.which("cvc5"))


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number} [{title}]: {'PASS' if ok else 'FAIL'} ({detail})")
        assert ok, detail

    return emit


def test_criterion_1_worked_example_fidelity(report):
    start = time.perf_counter()
    tr1 = TimedWord.of([(2, ["phi"]), (5, ["psi"]), (9, ["phi"]), (14, ["psi"]), (17, ["phi"]), (19, ["psi"])])
    w = expand(tr1)
    t = cl.translate(Dist(14, ComparisonOp.GE, 4, "phi", "psi"))
    delta = compute_counters(t, w)
    names = [cl.pair_counter(r, "phi", "psi") for r in "ghsab"]
    at5 = delta.snapshot(5, names)

    readings = []
    for window, instant in [(14, 15), (12, 15), (14, 18)]:
        inside = [p for p in pair_instances(w, "phi", "psi") if p.open_at >= instant - window + 1 and p.close_at <= instant]
        total, count = sum(p.distance for p in inside), len(inside)
        # the same average, read off the counters through the translated goal
        exact = [
            n
            for n in range(0, 20)
            if eval_cltlb(cl.translate(Dist(window, ComparisonOp.EQ, n, "phi", "psi")).goal, w, delta, instant)
        ]
        readings.append((total, count, exact))
    elapsed = time.perf_counter() - start

    ok = (
        at5 == (1, 0, 3, 0, 3)
        and readings == [(8, 2, [4]), (5, 1, [5]), (5, 1, [5])]
        and elapsed < 1.0
    )
    report(1, "worked-example fidelity", ok, f"delta(5)={at5}, readings={readings}, {elapsed:.3f}s")


def test_criterion_2_count_worked_example(report):
    start = time.perf_counter()
    chi = expand(TimedWord.of([(t, ["chi"]) for t in (1, 7, 8, 10, 13, 16)]))
    t = cl.translate(Count(11, ComparisonOp.GT, 1, "chi"))
    delta = compute_counters(t, chi)
    nxt, back = delta.read("c_chi", 17), delta.read("c_chi", 16 - 10)
    plain_ok = (nxt, back, nxt - back) == (6, 1, 5) and eval_cltlb(t.goal, chi, delta, 16)

    w = expand(TimedWord.of([(t, ["phi"]) for t in (0, 1, 2, 3, 5, 7, 9, 10, 11, 13)]))
    opt = cl.translate(to_pnf(parse_formula("C[3]>1(phi) && C[5]>1(phi)")), optimized=True)
    d2 = compute_counters(opt, w)
    x_next, y_back = d2.read("c_phi", 9), d2.read("c_phi", 8 - 4)
    wrapped = cl.window_difference(x_next, y_back, 6)
    macro = cl.window_difference(9, 2, 10)
    mod_ok = (x_next, y_back, wrapped) == (0, 4, 2) and macro == 7 and eval_cltlb(opt.goal.right, w, d2, 8)
    elapsed = time.perf_counter() - start
    ok = plain_ok and mod_ok and elapsed < 1.0
    report(
        2,
        "count worked example",
        ok,
        f"{nxt}-{back}={nxt - back}; modulo {x_next}-{y_back}+6={wrapped}; W(9,4)={macro}; {elapsed:.3f}s",
    )


AST_VARIANTS = {
    cls.__name__
    for cls in (
        sf.Atom, sf.TrueF, sf.FalseF, sf.Not, sf.And, sf.Or, sf.Implies, sf.Until, sf.Since,
        sf.Release, sf.Trigger, sf.Globally, sf.Eventually, sf.PastEventually, sf.Historically,
        sf.Count, sf.Avg, sf.Max, sf.Dist, sf.NegAtom, sf.NegAggregate,
    )
}


def test_criterion_3_backend_agreement(report):
    rng = random.Random(20240601)
    cfg = smt.SolverConfig.resolve() if HAVE_SOLVER else None
    seen, mismatches, smt_mismatches, smt_runs, slowest = set(), [], [], 0, 0.0
    for k in range(10_000):
        f = gen.formula(rng, depth=3)
        w = gen.trace(rng, max_horizon=rng.choice([30, 60, 199]))
        i = rng.randint(0, w.last)
        pnf = to_pnf(f)
        seen.update(type(n).__name__ for n in f.walk())
        seen.update(type(n).__name__ for n in pnf.walk())
        a = check(f, w, i, "oracle").verdict
        b = check(f, w, i, "counters").verdict
        if a != b:
            mismatches.append((k, f, i))
        if k % 20 == 0 and cfg is not None:
            smt_runs += 1
            start = time.perf_counter()
            c = check(f, w, i, "smt", solver=cfg).verdict
            slowest = max(slowest, time.perf_counter() - start)
            if c != a:
                smt_mismatches.append((k, f, i))
    missing = AST_VARIANTS - seen
    ok = not mismatches and not smt_mismatches and not missing and smt_runs >= 500 and slowest < 60
    report(
        3,
        "backend agreement",
        ok,
        f"10000 oracle/counters triples, {len(mismatches)} discrepancies; {smt_runs} smt triples, "
        f"{len(smt_mismatches)} discrepancies, slowest solver call {slowest:.2f}s; "
        f"variants missing: {sorted(missing) or 'none'}",
    )


def _max_by_counts(f: Max, w, i):
    """Max verdict assembled from Count verdicts on each subinterval."""
    if f.op is ComparisonOp.EQ:
        ge = _max_by_counts(dataclasses.replace(f, op=ComparisonOp.GE), w, i)
        le = _max_by_counts(dataclasses.replace(f, op=ComparisonOp.LE), w, i)
        return ge and le
    m, tail = divmod(f.window, f.sub)
    parts = [(q * f.sub, f.sub) for q in range(m)] + ([(m * f.sub, tail)] if tail else [])
    values = []
    for shift, width in parts:
        j = i - shift
        # a window entirely before the origin holds no occurrence
        values.append(evaluate(Count(width, f.op, f.bound, f.atom), w, j) if j >= 0 else f.op.holds(0, f.bound))
    return all(values) if f.op in (ComparisonOp.LT, ComparisonOp.LE) else any(values)


def test_criterion_4_decomposition_identities(report):
    rng = random.Random(77)
    avg_bad = max_bad = 0
    for _ in range(1000):
        w = expand(gen.trace(rng, max_horizon=60, pair=False))
        i = rng.randint(0, w.last)
        K = rng.randint(1, 30)
        h = rng.randint(1, K)
        op = rng.choice(list(ComparisonOp))
        n = rng.randint(0, 6)
        atom = rng.choice(gen.FREE)
        m = K // h
        if evaluate(Avg(K, h, op, n, atom), w, i) != evaluate(Count(m * h, op, n * m, atom), w, i):
            avg_bad += 1
        mx = Max(K, h, op, n, atom)
        if evaluate(mx, w, i) != _max_by_counts(mx, w, i):
            max_bad += 1
    report(4, "decomposition identities", avg_bad == 0 and max_bad == 0, f"avg mismatches {avg_bad}/1000, max mismatches {max_bad}/1000")


def _with_window(f, K):
    if isinstance(f, (Count, Dist)):
        return dataclasses.replace(f, window=K)
    if isinstance(f, (Avg, Max)):
        return dataclasses.replace(f, window=K, sub=min(f.sub, 10))
    if isinstance(f, sf.Not):
        return sf.Not(_with_window(f.arg, K))
    if isinstance(f, (sf.And, sf.Or, sf.Implies)):
        return type(f)(_with_window(f.left, K), _with_window(f.right, K))
    if isinstance(f, (sf.Until, sf.Since, sf.Release, sf.Trigger)):
        return type(f)(f.interval, _with_window(f.left, K), _with_window(f.right, K))
    if isinstance(f, (sf.Globally, sf.Eventually, sf.PastEventually, sf.Historically)):
        return type(f)(f.interval, _with_window(f.arg, K))
    return f


def test_criterion_5_translation_size(report):
    rng = random.Random(5)
    over, worst, variant = 0, 0.0, 0
    for _ in range(1000):
        f = gen.formula(rng, depth=3)
        size = cl.translation_size(cl.translate(to_pnf(f)))
        if size > 4 * formula_size(f) + 8:
            over += 1
        worst = max(worst, size / formula_size(f))
        sizes = {cl.translation_size(cl.translate(to_pnf(_with_window(f, K)))) for K in (10, 100, 1000)}
        if len(sizes) > 1:
            variant += 1
    ok = over == 0 and variant == 0
    report(
        5,
        "translation-size linearity",
        ok,
        f"{over}/1000 formulas exceed 4*size+8 (worst ratio {worst:.1f}); "
        f"{variant}/1000 shapes change size across K in {{10,100,1000}}",
    )


def _r_squared(xs, ys):
    return statistics.correlation(xs, ys) ** 2


def _timings_ms(cases, rounds=7, batch=5):
    """Best per-call time of each (formula, trace) case, in milliseconds.

    Cases are interleaved round by round so a burst of background load
    smears over all points instead of landing on one, and each sample times
    a small batch of checks to stay well above the clock resolution.
    """
    best = [float("inf")] * len(cases)
    for _ in range(rounds):
        for k, (f, w) in enumerate(cases):
            elapsed = timeit.timeit(lambda: check(f, w, "last"), number=batch)
            best[k] = min(best[k], elapsed * 1000 / batch)
    return best


def test_criterion_6_scalability_shape(report):
    start = time.perf_counter()
    lengths = list(range(100, 2001, 100))
    fits = {}
    for text in ("C[100]>30(p)", "D[100]>30(p, q)"):
        f = parse_formula(text)
        times = _timings_ms([(f, bench_trace(f, n, 0.5, seed=1)) for n in lengths])
        fits[text] = _r_squared(lengths, times)

    spreads = {}
    for label, template, values in (
        ("K", "C[{}]>30(p)", (10, 100, 500, 1000)),
        ("n", "C[100]>{}(p)", (1, 10, 30, 300)),
        ("K", "D[{}]>30(p, q)", (10, 100, 500, 1000)),
        ("n", "D[100]>{}(p, q)", (1, 10, 30, 300)),
    ):
        trace = bench_trace(parse_formula(template.format(values[0])), 1000, 0.5, seed=2)
        times = _timings_ms([(parse_formula(template.format(v)), trace) for v in values], rounds=15)
        spreads[f"{template.format(label)}"] = max(times) / min(times) - 1
    elapsed = time.perf_counter() - start
    ok = all(r2 >= 0.9 for r2 in fits.values()) and all(s < 0.25 for s in spreads.values()) and elapsed < 300
    detail = ", ".join(f"R2[{k}]={v:.3f}" for k, v in fits.items())
    detail += "; " + ", ".join(f"spread[{k}]={v:.1%}" for k, v in spreads.items())
    report(6, "scalability shape", ok, f"{detail}; {elapsed:.1f}s")


QP1 = "G(logOff -> C[600]<=3(withdraw))"
QP2 = "G(D[900]<5(checkAccess_start, checkAccess_end))"
QP3 = "G(logOff -> M[600,60]<=2(getBalance))"
RUNNING = [
    ("QP1 ok", QP1, [(10, ["withdraw"]), (200, ["withdraw"]), (400, ["withdraw"]), (500, ["logOff"]), (900, ["withdraw"]), (1300, ["logOff"])], True),
    ("QP1 bad", QP1, [(100, ["withdraw"]), (200, ["withdraw"]), (300, ["withdraw"]), (400, ["withdraw"]), (500, ["logOff"])], False),
    ("QP2 ok", QP2, [(0, ["checkAccess_start"]), (3, ["checkAccess_end"]), (10, ["checkAccess_start"]), (13, ["checkAccess_end"]), (20, ["checkAccess_start"]), (23, ["checkAccess_end"])], True),
    ("QP2 bad", QP2, [(0, ["checkAccess_start"]), (3, ["checkAccess_end"]), (10, ["checkAccess_start"]), (19, ["checkAccess_end"])], False),
    ("QP3 ok", QP3, [(10, ["getBalance"]), (70, ["getBalance"]), (130, ["getBalance"]), (140, ["getBalance"]), (200, ["logOff"])], True),
    ("QP3 bad", QP3, [(150, ["getBalance"]), (160, ["getBalance"]), (170, ["getBalance"]), (200, ["logOff"])], False),
]


def test_criterion_7_running_examples(report):
    start = time.perf_counter()
    outcomes = []
    for name, text, entries, expected in RUNNING:
        f, w = parse_formula(text), TimedWord.of(entries)
        verdicts = {check(f, w, 0, b).verdict for b in ("oracle", "counters")}
        outcomes.append((name, verdicts == {expected}))
    elapsed = time.perf_counter() - start
    ok = all(good for _, good in outcomes) and elapsed < 1.0
    report(7, "running-example regression", ok, ", ".join(f"{n}={'ok' if g else 'WRONG'}" for n, g in outcomes) + f"; {elapsed:.3f}s")


def test_criterion_8_negation_soundness(report):
    rng = random.Random(8)
    bad, eq_aggs, empty_dists = 0, 0, 0
    for _ in range(5000):
        f, w, i = gen.triple(rng, depth=3)
        d = expand(w)
        value = evaluate(f, d, i)
        agree = (
            evaluate(Not(f), d, i) == (not value)
            and evaluate(to_pnf(f), d, i) == value
            and evaluate(to_pnf(Not(f)), d, i) == (not value)
            and check(Not(f), w, i).verdict == (not value)
        )
        bad += not agree
        for node in f.walk():
            if isinstance(node, AGGREGATES) and node.op is ComparisonOp.EQ:
                eq_aggs += 1
            if isinstance(node, Dist):
                lo = i - node.window + 1
                inst = pair_instances(d, node.left, node.right)
                if not any(p.open_at >= lo and p.close_at <= i for p in inst):
                    empty_dists += 1
    ok = bad == 0 and eq_aggs > 0 and empty_dists > 0
    report(8, "PNF/negation soundness", ok, f"{bad}/5000 mismatches; covered {eq_aggs} EQ aggregates, {empty_dists} empty-window Dist nodes")
