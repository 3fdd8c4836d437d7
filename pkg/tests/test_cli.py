from __future__ import annotations

import io
import json
import shutil
import subprocess
import sys

import pytest

from fiplus import cli

GOLDEN_APP = "((\\x:Int. x ,, false) : Int&Bool -> Int&Bool) (1,,true)"
SPLIT_FUNCTION = """\
let f : (Int&Top -> Int) & (Int&Top -> Bool) = \\x:Int&Top. x ,, false;
(f : Int&Bool -> Int&Bool) (1,,true)
"""
FIX_PROJECTION = ("((fix self:{l1:Int}&{l2:Int}. ({l1=1} : {l1:Int}) ,, ({l2=(self : {l1:Int}).l1} : {l2:Int}))"
                  " : {l2:Int}).l2")


@pytest.fixture
def write(tmp_path):
    def go(text: str, name: str = "prog.fip") -> str:
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return str(p)
    return go


def run(argv, capsys, stdin: str | None = None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


# ------------------------------------------------------------------- check


def test_check_prints_the_type(write, capsys):
    code, out, _ = run(["check", write("1 ,, true")], capsys)
    assert code == 0 and out.strip() == "Int & Bool"


def test_check_reports_disjointness_errors(write, capsys):
    path = write("1 ,, 2")
    code, out, err = run(["check", path], capsys)
    assert code == 1 and out == ""
    assert err.startswith(f"{path}:1:3: DisjointnessFailure (Typ-merge)")


def test_check_reports_parse_errors(write, capsys):
    code, _, err = run(["check", write("1 ,,")], capsys)
    assert code == 2 and "expected expression" in err


def test_check_missing_file(tmp_path, capsys):
    code, _, err = run(["check", str(tmp_path / "nope.fip")], capsys)
    assert code == 3 and "cannot read" in err


def test_check_undecodable_file(tmp_path, capsys):
    p = tmp_path / "bin.fip"
    p.write_bytes(b"\xff\xfe\x00")
    assert run(["check", str(p)], capsys)[0] == 3


# --------------------------------------------------------------------- run


def test_run_golden_application(write, capsys):
    code, out, _ = run(["run", write(GOLDEN_APP)], capsys)
    assert code == 0 and out.strip() == "1 ,, false"


def test_run_split_function(write, capsys):
    code, out, _ = run(["run", write(SPLIT_FUNCTION)], capsys)
    assert code == 0 and out.strip() == "1 ,, false"


def test_run_fixpoint_projection(write, capsys):
    code, out, _ = run(["run", write(FIX_PROJECTION)], capsys)
    assert code == 0 and out.strip() == "1"


def test_run_divergence_exhausts_fuel(write, capsys):
    code, out, err = run(["run", "--max-steps", "50", write("fix x:Int. x")], capsys)
    assert code == 4 and out.strip() == "FUEL-EXHAUSTED" and "50 steps" in err


def test_fuel_from_environment(write, capsys, monkeypatch):
    monkeypatch.setenv(cli.FUEL_ENV, "7")
    code, _, err = run(["run", write("fix x:Int. x")], capsys)
    assert code == 4 and "7 steps" in err
    monkeypatch.setenv(cli.FUEL_ENV, "lots")
    assert run(["run", write("1")], capsys)[0] == 3


def test_nonpositive_fuel_is_rejected(write, capsys):
    assert run(["run", "--max-steps", "0", write("1")], capsys)[0] == 3


def test_run_does_not_evaluate_ill_typed_files(write, capsys, monkeypatch):
    called = []
    monkeypatch.setattr(cli, "evaluate", lambda *a, **k: called.append(a))
    code, out, _ = run(["run", write("1 ,, 2")], capsys)
    assert code == 1 and called == [] and out == ""


def test_run_trace(write, capsys):
    code, out, _ = run(["run", "--trace", write(GOLDEN_APP)], capsys)
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0].startswith("STEP 1 Step-papp[PApp-abs,EW-anno] ")
    assert all(line.startswith(f"STEP {n} ") for n, line in enumerate(lines[:-1], 1))
    assert lines[-1] == "1 ,, false"


def test_run_json(write, capsys):
    path = write(GOLDEN_APP)
    code, out, _ = run(["run", "--json", "--trace", path], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["file"] == path and doc["type"] == "Int & Bool"
    assert doc["trace"]["verdict"] == "value" and doc["trace"]["result"] == "1 ,, false"
    assert [s["n"] for s in doc["trace"]["steps"]] == list(range(1, doc["trace"]["count"] + 1))


def test_run_json_reports_errors(write, capsys):
    code, out, _ = run(["run", "--json", write("1 ,, 2")], capsys)
    doc = json.loads(out)
    assert code == 1 and doc["error"]["kind"] == "DisjointnessFailure" and doc["error"]["line"] == 1
    code, out, _ = run(["run", "--json", write("(")], capsys)
    assert code == 2 and json.loads(out)["error"]["kind"] == "ParseError"


def test_run_json_fuel_exhaustion(write, capsys):
    code, out, _ = run(["run", "--json", "--max-steps", "5", write("fix x:Int. x")], capsys)
    assert code == 4 and json.loads(out)["trace"]["verdict"] == "fuel-exhausted"


def test_deeply_growing_term_counts_as_fuel_exhaustion(write, capsys):
    # Each unfolding nests the fixpoint one level deeper inside the application.
    src = "(fix f:Int -> Int. (\\x:Int. f (f x)) : Int -> Int) 1"
    code, _, _ = run(["run", "--max-steps", "100000", write(src)], capsys)
    assert code == 4


# -------------------------------------------------------------------- repl


def test_repl_session(capsys, monkeypatch):
    session = f":t 1,,true\n{GOLDEN_APP}\n1 ,, 2\n\n:bogus\n(\n:q\n1\n"
    code, out, err = run(["repl"], capsys, session, monkeypatch)
    assert code == 0
    assert out.splitlines() == ["Int & Bool", "1 ,, false"]
    assert "DisjointnessFailure" in err and "unknown command" in err and "expected expression" in err


def test_repl_ends_at_end_of_input(capsys, monkeypatch):
    code, out, _ = run(["repl"], capsys, "1 ,, true\n", monkeypatch)
    assert code == 0 and out.strip() == "1 ,, true"


def test_repl_reports_divergence(capsys):
    out = io.StringIO()
    assert cli.repl(io.StringIO("fix x:Int. x\n"), out, io.StringIO(), fuel=20) == 0
    assert out.getvalue().strip() == "FUEL-EXHAUSTED"


# ------------------------------------------------------------------- suite


def test_suite_command(capsys):
    code, out, err = run(["suite", "progress", "--seed", "3", "--count", "5"], capsys)
    assert code == 0
    assert out.splitlines()[0].startswith("SEED 3 PASS progress ")
    assert "5 passed, 0 failed" in err


def test_suite_command_on_type_universe(capsys):
    code, out, _ = run(["suite", "split-equivalence", "--depth", "1"], capsys)
    assert code == 0 and len(out.splitlines()) == 16  # the depth-1 intersections
    code, out, _ = run(["suite", "disjoint-soundness", "--depth", "1"], capsys)
    assert code == 0 and len(out.splitlines()) == 40


def test_unknown_suite_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["suite", "nonsense"])
    assert info.value.code == 2


# -------------------------------------------------------- installed script


@pytest.mark.skipif(shutil.which("fiplus") is None, reason="console script not installed")
def test_console_script(write):
    done = subprocess.run(["fiplus", "check", write("1 ,, true")], capture_output=True, text=True)
    assert done.returncode == 0 and done.stdout.strip() == "Int & Bool"


def test_module_entry_point(write):
    done = subprocess.run([sys.executable, "-m", "fiplus.cli", "run", write("fix x:Int. x"), "--max-steps", "3"],
                          capture_output=True, text=True)
    assert done.returncode == 4
