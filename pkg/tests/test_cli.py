import csv
import io
import json
import random
import shutil
import subprocess
import sys

import pytest

import gen
from aggtl.cli import BENCH_COLUMNS, main
from aggtl.formula import to_text
from aggtl.trace import serialize

QP1 = "G(logOff -> C[600]<=3(withdraw))"
HAVE_SOLVER = bool(shutil.which("z3") or shutil.which("cvc5"))


@pytest.fixture
def trace_file(tmp_path):
    def write(text, name="trace.txt"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


def test_check_conforming_trace(trace_file, capsys):
    path = trace_file("10: withdraw\n20: withdraw\n30: withdraw\n40: logOff\n")
    assert main(["check", QP1, "--trace", path, "--instant", "0"]) == 0
    assert "verdict=holds" in capsys.readouterr().out


def test_check_violating_trace_json(trace_file, capsys):
    path = trace_file("10: withdraw\n20: withdraw\n30: withdraw\n35: withdraw\n40: logOff\n")
    assert main(["check", QP1, "--trace", path, "--format", "json"]) == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["verdict"] == "violated"
    assert doc["instant"] == 40
    assert doc["backend"] == "counters"


def test_check_formula_file(trace_file, tmp_path):
    f = tmp_path / "qp1.sol"
    f.write_text(f"# withdraw limit\n{QP1}\n")
    path = trace_file("10: withdraw\n40: logOff\n")
    assert main(["check", "--formula-file", str(f), "--trace", path, "--backend", "oracle"]) == 0


def test_check_usage_errors(trace_file, capsys):
    path = trace_file("0: p\n")
    assert main(["check", "p", "--trace", path, "--instant", "5"]) == 2
    assert main(["check", "p &&", "--trace", path]) == 2
    assert main(["check", "p", "--trace", trace_file("1: p\n1: q\n", "bad.txt")]) == 2
    assert main(["check", "p", "--trace", path, "--instant", "soon"]) == 2
    assert main(["check", "--trace", path]) == 2
    assert main(["nonsense"]) == 2
    assert "error" in capsys.readouterr().err


def test_alternation_violation_and_lax(trace_file, capsys):
    path = trace_file("0: a\n2: a\n4: b\n")
    assert main(["check", "D[10]<3(a, b)", "--trace", path]) == 2
    assert main(["check", "D[10]<3(a, b)", "--trace", path, "--lax"]) in (0, 1)
    assert main(["check", "D[10]<3(a, b)", "--trace", path, "--lax", "--backend", "all", "--solver", "/nonexistent/z3"]) == 3
    err = capsys.readouterr().err
    assert "skips the oracle" in err


def test_missing_solver_is_a_backend_error(trace_file, capsys):
    path = trace_file("0: p\n")
    assert main(["check", "p", "--trace", path, "--backend", "smt", "--solver", "/nonexistent/z3"]) == 3
    assert "counters backend" in capsys.readouterr().err


@pytest.mark.skipif(not HAVE_SOLVER, reason="no SMT solver on PATH")
def test_backend_all_agrees_on_random_cases(trace_file, capsys):
    rng = random.Random(21)
    for k in range(25):
        f, w, i = gen.triple(rng, max_horizon=25)
        path = trace_file(serialize(w), f"t{k}.txt")
        code = main(["check", to_text(f), "--trace", path, "--instant", str(i), "--backend", "all"])
        assert code in (0, 1)
        out = capsys.readouterr().out
        assert out.count("backend=") == 3


def test_translate(capsys):
    assert main(["translate", QP1]) == 0
    out = capsys.readouterr().out
    assert "c_withdraw: count(withdraw)" in out
    assert "X(c_withdraw) - Y^599(c_withdraw) <= 3" in out
    assert main(["translate", "p"]) == 0
    assert capsys.readouterr().out == "goal:\n  p\ncounters:\naxioms:\n"
    assert main(["translate", QP1, "--optimized", "--kmax", "600"]) == 0
    out = capsys.readouterr().out
    assert "mod 601" in out and "if (" in out


def test_gen_is_deterministic(tmp_path, capsys):
    args = ["gen", "--seed", "3", "--horizon", "100", "--sparseness", "0.3", "--atom", "p=0.5", "--pair", "s,t,1,5"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args + ["-o", str(tmp_path / "g.txt")]) == 0
    assert (tmp_path / "g.txt").read_text() == first
    assert main(["gen", "--horizon", "10", "--sparseness", "2", "--atom", "p"]) == 2


def _bench(args, capsys):
    code = main(["bench", *args])
    return code, list(csv.reader(io.StringIO(capsys.readouterr().out)))


def test_bench_length_sweep(capsys):
    code, rows = _bench(["--lengths", "100:400:100", "--reps", "2", "--K", "100", "--n", "30"], capsys)
    assert code == 0
    assert rows[0] == BENCH_COLUMNS
    assert [int(r[2]) for r in rows[1:]] == [100, 200, 300, 400]
    assert all(r[1] == "counters" and r[7] in ("holds", "violated") for r in rows[1:])


def test_bench_verdicts_are_deterministic(capsys):
    args = ["--formula", "D[{K}]>{n}(p, q)", "--lengths", "200", "--K", "10,100", "--n", "3", "--reps", "1"]
    _, a = _bench(args, capsys)
    _, b = _bench(args, capsys)
    strip = lambda rows: [r[:6] + r[7:] for r in rows]
    assert strip(a) == strip(b)


def test_bench_empty_sweep(capsys):
    assert main(["bench", "--lengths", "", "--reps", "1"]) == 2


def test_module_entry_point(trace_file):
    path = trace_file("0: p\n")
    proc = subprocess.run([sys.executable, "-m", "aggtl", "check", "p", "--trace", path], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "verdict=holds" in proc.stdout
