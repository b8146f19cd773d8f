import random
import re
import shutil
from pathlib import Path

import pytest

import gen
from aggtl import cltlb as cl
from aggtl import smt
from aggtl.checker import check
from aggtl.formula import parse_formula, to_pnf
from aggtl.trace import TimedWord, expand

GOLDEN = Path(__file__).parent / "golden"
HAVE_SOLVER = bool(shutil.which("z3") or shutil.which("cvc5"))
needs_solver = pytest.mark.skipif(not HAVE_SOLVER, reason="no SMT solver on PATH")

SEVEN_P = TimedWord.of([(t, ["p"]) for t in range(7)])


def emit(text, w, i):
    return smt.emit(cl.translate(to_pnf(parse_formula(text))), expand(w), i)


def test_golden_count_script():
    assert emit("C[5]<3(p)", SEVEN_P, 5).text == (GOLDEN / "count5_lt3.smt2").read_text()


def test_emit_is_deterministic():
    w = TimedWord.of([(0, ["s"]), (2, ["p"]), (4, ["t"]), (7, ["q"])])
    f = "G((p) U[0,5] (q) || D[6]<2(s, t)) && M[6,2]>=1(p)"
    assert emit(f, w, 2).text == emit(f, w, 2).text


def test_empty_position_asserts_everything_false():
    w = TimedWord.of([(0, ["p", "q"]), (3, ["p"])])
    text = emit("p && q", w, 0).text
    assert "(assert (and (not e_1) (not p_p_1) (not p_q_1)))" in text
    assert "(assert (and e_0 p_p_0 p_q_0))" in text


def test_positions_stay_in_bounds_and_variables_are_used():
    rng = random.Random(4)
    for _ in range(30):
        f, w, i = gen.triple(rng, max_horizon=25)
        s = smt.emit(cl.translate(to_pnf(f)), expand(w), i)
        assert s.bound == expand(w).length
        for m in re.finditer(r"\b(?:e|p_\w+?|c_\S+?)_(\d+)\b", s.text):
            assert 0 <= int(m.group(1)) < s.bound
        asserts = "\n".join(line for line in s.text.splitlines() if line.startswith("(assert"))
        used = set(re.findall(r"[A-Za-z_][\w.]*", asserts))
        assert set(s.variables) <= used


def test_emit_rejects_instants_outside_the_trace():
    with pytest.raises(ValueError):
        emit("p", SEVEN_P, 7)


def test_interpret():
    assert smt.interpret(smt.SolverOutcome("unsat", "unsat", 0.0)) is True
    assert smt.interpret(smt.SolverOutcome("sat", "sat", 0.0)) is False
    with pytest.raises(smt.SolverError):
        smt.interpret(smt.SolverOutcome("unknown", "timeout", 0.0))


def _script(body):
    return smt.SmtScript(f"(set-logic QF_LIA)\n{body}\n(check-sat)\n", 0, ())


@needs_solver
def test_sanity_probe_is_unsat():
    out = smt.run(_script("(assert (and true false))"), smt.SolverConfig.resolve())
    assert out.status == "unsat"


@needs_solver
def test_running_example_violation_is_sat():
    w = TimedWord.of([(10, ["withdraw"]), (20, ["withdraw"]), (30, ["withdraw"]), (40, ["withdraw"]), (50, ["logOff"])])
    s = emit("G(logOff -> C[600]<=3(withdraw))", w, 50)
    out = smt.run(s, smt.SolverConfig.resolve())
    assert out.status == "sat"
    assert smt.interpret(out) is False


def test_missing_binary_reports_solver_error():
    out = smt.run(_script("(assert true)"), smt.SolverConfig("/nonexistent/z3"))
    assert out.status == "solver-error"
    assert "counters backend" in out.raw


def _fake_solver(tmp_path, body):
    path = tmp_path / "fake-solver"
    path.write_text(f"#!/bin/sh\n{body}\n")
    path.chmod(0o755)
    return smt.SolverConfig(str(path), timeout=0.5)


def test_timeout_is_unknown(tmp_path):
    out = smt.run(_script("(assert true)"), _fake_solver(tmp_path, "sleep 5"))
    assert out.status == "unknown"


def test_garbage_output_is_solver_error(tmp_path):
    out = smt.run(_script("(assert true)"), _fake_solver(tmp_path, "echo oops; exit 3"))
    assert out.status == "solver-error"


def test_status_comes_from_the_first_token(tmp_path):
    out = smt.run(_script("(assert true)"), _fake_solver(tmp_path, "echo unsat; echo sat"))
    assert out.status == "unsat"


def test_resolve_prefers_explicit_then_environment(monkeypatch):
    monkeypatch.setenv(smt.SOLVER_ENV, "/opt/solvers/cvc5")
    cfg = smt.SolverConfig.resolve()
    assert cfg.path == "/opt/solvers/cvc5"
    assert cfg.args == ("--lang=smt2",)
    assert smt.SolverConfig.resolve("/x/z3", timeout=5).path == "/x/z3"
    monkeypatch.delenv(smt.SOLVER_ENV)
    monkeypatch.setenv("PATH", "/nonexistent")
    with pytest.raises(smt.SolverError, match="counters backend"):
        smt.SolverConfig.resolve()


@needs_solver
def test_smt_agrees_with_counters():
    rng = random.Random(9)
    cfg = smt.SolverConfig.resolve()
    for _ in range(40):
        f, w, i = gen.triple(rng, max_horizon=40)
        assert check(f, w, i, "smt", solver=cfg).verdict == check(f, w, i, "counters").verdict
