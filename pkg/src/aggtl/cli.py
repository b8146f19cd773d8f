"""Command-line interface: ``aggtl check | translate | gen | bench``.

Exit codes: 0 holds, 1 violated, 2 usage or input error, 3 backend error,
4 backends disagree.
"""

from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from . import cltlb, smt
from .checker import BACKENDS, CheckReport, check
from .formula import Dist, atoms, parse_formula, to_pnf
from .trace import GeneratorConfig, PairSpec, generate_trace, parse_trace, serialize

EXIT_HOLDS, EXIT_VIOLATED, EXIT_USAGE, EXIT_BACKEND, EXIT_DISAGREE = 0, 1, 2, 3, 4

BENCH_COLUMNS = ["run-id", "backend", "trace-length", "sparseness", "K", "n", "wall-time-ms", "verdict"]


class UsageError(Exception):
    pass


def _formula_text(args) -> str:
    if args.formula_file:
        return Path(args.formula_file).read_text()
    if args.formula is None:
        raise UsageError("give a formula or --formula-file")
    return args.formula


def _instant(text: str):
    if text == "last":
        return text
    if not text.isdigit():
        raise argparse.ArgumentTypeError(f"instant must be a natural number or 'last', got {text!r}")
    return int(text)


def _int_list(text: str) -> list[int]:
    """``"10,20,50"`` or an inclusive range ``"100:2000:100"``."""
    text = text.strip()
    if not text:
        return []
    if ":" in text:
        lo, hi, step = (int(x) for x in text.split(":"))
        return list(range(lo, hi + 1, step))
    return [int(x) for x in text.split(",")]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _solver(args) -> Optional[smt.SolverConfig]:
    if args.backend not in ("smt", "all"):
        return None
    return smt.SolverConfig.resolve(args.solver, args.solver_timeout)


def _print_report(report: CheckReport, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(report.to_dict(), sort_keys=True))
    else:
        print(report.to_line())


def cmd_check(args) -> int:
    f = parse_formula(_formula_text(args))
    w = parse_trace(Path(args.trace).read_text())
    opts = dict(lax=args.lax, optimized=args.optimized, kmax=args.kmax)
    if args.backend != "all":
        report = check(f, w, args.instant, args.backend, solver=_solver(args), **opts)
        _print_report(report, args.format)
        return EXIT_HOLDS if report.verdict else EXIT_VIOLATED

    backends = list(BACKENDS)
    if args.lax:
        print("warning: --lax skips the oracle cross-check", file=sys.stderr)
        backends.remove("oracle")
    solver = _solver(args)
    reports = [check(f, w, args.instant, b, solver=solver, **opts) for b in backends]
    verdicts = {r.verdict for r in reports}
    if len(verdicts) > 1:
        detail = ", ".join(f"{r.backend}={r.verdict_text}" for r in reports)
        print(f"disagreement: {detail}", file=sys.stderr)
        return EXIT_DISAGREE
    for r in reports:
        _print_report(r, args.format)
    return EXIT_HOLDS if reports[0].verdict else EXIT_VIOLATED


def cmd_translate(args) -> int:
    f = parse_formula(_formula_text(args))
    t = cltlb.translate(to_pnf(f), optimized=args.optimized, kmax=args.kmax)
    sys.stdout.write(cltlb.render(t))
    return EXIT_HOLDS


def _parse_atom_spec(text: str) -> tuple[str, float]:
    name, _, prob = text.partition("=")
    return name, float(prob) if prob else 0.5


def _parse_pair_spec(text: str) -> PairSpec:
    parts = text.split(",")
    if len(parts) != 4:
        raise UsageError(f"--pair expects start,end,min,max; got {text!r}")
    return PairSpec(parts[0], parts[1], int(parts[2]), int(parts[3]))


def cmd_gen(args) -> int:
    cfg = GeneratorConfig(
        seed=args.seed,
        horizon=args.horizon,
        sparseness=args.sparseness,
        alphabet=dict(_parse_atom_spec(a) for a in args.atom),
        pairs=tuple(_parse_pair_spec(p) for p in args.pair),
    )
    try:
        w = generate_trace(cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    text = serialize(w)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_HOLDS


def bench_trace(formula, length: int, sparseness: float, seed: int):
    """Synthetic trace for a bench point: one strictly alternating pair per
    Dist subformula, every other atom drawn freely."""
    pairs, paired = [], set()
    for node in formula.walk():
        if isinstance(node, Dist) and node.left not in paired and node.right not in paired:
            pairs.append(PairSpec(node.left, node.right, 1, 10))
            paired.update((node.left, node.right))
    free = {a: 0.5 for a in sorted(atoms(formula) - paired)}
    if not free and not pairs:
        free = {"tick": 1.0}
    cfg = GeneratorConfig(seed, length - 1, sparseness, free, tuple(pairs))
    return generate_trace(cfg)


def _bench_point(job):
    template, backend, length, sparseness, K, n, reps, seed, solver = job
    f = parse_formula(template.format(K=K, n=n))
    w = bench_trace(f, length, sparseness, seed)
    times, verdict = [], None
    for _ in range(reps):
        r = check(f, w, "last", backend, solver=solver)
        times.append(r.wall_time_ms)
        verdict = r.verdict_text
    return statistics.fmean(times), verdict


def cmd_bench(args) -> int:
    lengths = _int_list(args.lengths)
    windows, bounds = _int_list(args.K), _int_list(args.n)
    sparse = _float_list(args.sparseness)
    if not (lengths and windows and bounds and sparse) or args.reps < 1:
        raise UsageError("empty sweep: lengths, K, n, sparseness and reps must be non-empty")
    if "{K}" not in args.formula and "{n}" not in args.formula:
        print("warning: formula template has no {K} or {n} placeholder", file=sys.stderr)
    solver = smt.SolverConfig.resolve(args.solver, args.solver_timeout) if args.backend == "smt" else None
    jobs = [
        (args.formula, args.backend, length, s, K, n, args.reps, args.seed, solver)
        for length in lengths
        for s in sparse
        for K in windows
        for n in bounds
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_bench_point, jobs))
    else:
        results = [_bench_point(j) for j in jobs]
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(BENCH_COLUMNS)
    for run_id, (job, (ms, verdict)) in enumerate(zip(jobs, results)):
        _, backend, length, s, K, n = job[:6]
        out.writerow([run_id, backend, length, s, K, n, f"{ms:.3f}", verdict])
    return EXIT_HOLDS


def _add_formula_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("formula", nargs="?", help="formula text")
    p.add_argument("--formula-file", help="read the formula from a file")
    p.add_argument("--optimized", action="store_true", help="modulo encoding for count counters")
    p.add_argument("--kmax", type=int, help="largest window for --optimized (default: from formula)")


def _add_solver_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--solver", help=f"SMT solver binary (default: ${smt.SOLVER_ENV}, z3, cvc5)")
    p.add_argument("--solver-timeout", type=float, default=smt.DEFAULT_TIMEOUT, help="seconds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aggtl", description="Trace checking for temporal logic with aggregates.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="check a formula against a trace")
    _add_formula_args(p)
    p.add_argument("--trace", required=True, help="trace file")
    p.add_argument("--instant", type=_instant, default="last", help="natural number or 'last'")
    p.add_argument("--backend", choices=[*BACKENDS, "all"], default="counters")
    p.add_argument("--format", choices=["plain", "json"], default="plain")
    p.add_argument("--lax", action="store_true", help="accept non-alternating distance pairs")
    _add_solver_args(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("translate", help="print the counter translation")
    _add_formula_args(p)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("gen", help="generate a synthetic trace")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--horizon", type=int, required=True, help="last admissible timestamp")
    p.add_argument("--sparseness", type=float, default=1.0, help="fraction of timestamps that carry events")
    p.add_argument("--atom", action="append", default=[], help="name[=probability]")
    p.add_argument("--pair", action="append", default=[], help="start,end,min,max")
    p.add_argument("--output", "-o", help="write here instead of standard output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="wall-time sweep, CSV on standard output")
    p.add_argument("--formula", default="C[{K}]>{n}(p)", help="template with {K} and {n}")
    p.add_argument("--lengths", default="100:2000:100", help="start:stop:step or a comma list of trace lengths")
    p.add_argument("--K", default="100", help="comma list of windows")
    p.add_argument("--n", default="30", help="comma list of bounds")
    p.add_argument("--sparseness", default="1.0", help="comma list of fractions of occupied timestamps")
    p.add_argument("--reps", type=int, default=10, help="runs per configuration")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", choices=BACKENDS, default="counters")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    _add_solver_args(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_HOLDS
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError) as exc:
        # FormulaError, TraceError and EvaluationError are ValueErrors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except smt.SolverError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND


if __name__ == "__main__":
    sys.exit(main())
