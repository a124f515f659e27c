"""The command-line surface: outputs, exit codes, determinism."""

import pytest

import sharelin.cli as cli
from sharelin.fuzz import FuzzReport, Violation

SIX_VARS = (
    "vars u v w x y z\n"
    "sharing {u,w} {v,w} {x,y} {x,z} {w,x}\n"
    "lin u v w x y z\n"
    "eq w = x\n"
)

PRUNING = (
    "vars u v x y\n"
    "sharing {x} {y} {u} {v}\n"
    "pos x | y\n"
    "eq x = f(u, v)\n"
    "eq x = y\n"
)

REDUNDANT = "vars x y z\nsharing {x,y} {y,z}\nfree y\neq x = z\n"


@pytest.fixture
def problem_file(tmp_path):
    def write(text, name="problem.sl"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


def run(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_collapses_to_empty_group_line(problem_file, capsys):
    code, out, _ = run(["analyze", problem_file(PRUNING), "--algo", "3"], capsys)
    assert code == 0
    sharing_lines = [l for l in out.splitlines() if l.startswith("sharing")]
    assert sharing_lines == ["sharing {}"]


def test_analyze_ten_groups(problem_file, capsys):
    code, out, _ = run(
        ["analyze", problem_file(SIX_VARS), "--algo", "1", "--no-early-prune"], capsys
    )
    assert code == 0
    assert (
        "sharing {} {w,x} {u,w,x} {v,w,x} {w,x,y} {w,x,z} "
        "{u,w,x,y} {u,w,x,z} {v,w,x,y} {v,w,x,z}" in out
    )
    assert "# groups: 10" in out


def test_analyze_reports_pruned_input(problem_file, capsys):
    code, out, _ = run(["analyze", problem_file(PRUNING)], capsys)
    assert code == 0
    assert "# pruned sharing {}" in out


def test_analyze_output_reparses(problem_file, capsys):
    from sharelin.problem_io import parse_problem

    code, out, _ = run(["analyze", problem_file(SIX_VARS)], capsys)
    assert code == 0
    parse_problem(out)  # canonical output is a valid problem file


def test_parse_error_exit_code(problem_file, capsys):
    code, _, err = run(["analyze", problem_file("vars x y\nsharing {x}\neq x = f(y\n")], capsys)
    assert code == 1
    assert "parse error" in err and "line 3" in err


def test_semantic_error_exit_code(problem_file, capsys):
    code, _, err = run(["analyze", problem_file("vars x\nsharing {x}\neq x = q\n")], capsys)
    assert code == 2
    assert "undeclared variable 'q'" in err


def test_missing_file(problem_file, capsys):
    code, _, err = run(["analyze", "no-such-file.sl"], capsys)
    assert code == 1
    assert "error" in err


def test_stdout_is_deterministic(problem_file, capsys):
    path = problem_file(SIX_VARS)
    _, out1, _ = run(["analyze", path, "--algo", "1"], capsys)
    _, out2, _ = run(["analyze", path, "--algo", "1"], capsys)
    assert out1 == out2
    _, cmp1, _ = run(["compare", path], capsys)
    _, cmp2, _ = run(["compare", path], capsys)
    assert cmp1 == cmp2


def test_compare_rows_and_marks(problem_file, capsys):
    code, out, _ = run(["compare", problem_file(REDUNDANT)], capsys)
    assert code == 0
    lines = out.splitlines()
    row = {l.split()[0]: l for l in lines if l and not l.startswith("#")}
    assert "S: {} {x,y,z}" in row["amgu1"]
    assert "S: {}" in row["amgu2"]
    assert "# amgu2.S < amgu1.S" in lines
    assert "# amgu3.S = amgu2.S" in lines
    assert "# file.S = amgu2.S" in lines


def test_compare_skips_reference_beyond_bound(problem_file, capsys):
    text = "vars a1 b1 c1 d1 e1\nsharing " + " ".join(
        "{" + ",".join(c) + "}" for c in (["a1"], ["b1"], ["c1"], ["d1"], ["e1"])
    ) + "\neq a1 = b1\n"
    code, out, _ = run(["compare", problem_file(text), "--file-bound", "4"], capsys)
    assert code == 0
    assert any(l.startswith("file") and "skipped" in l for l in out.splitlines())


def test_oracle_clean_run(problem_file, capsys):
    code, out, _ = run(["oracle", "--seed", "42", "--trials", "25"], capsys)
    assert code == 0
    assert "counterexamples: 0" in out


def test_oracle_zero_trials_vacuous(problem_file, capsys):
    code, out, _ = run(["oracle", "--trials", "0"], capsys)
    assert code == 0
    assert "counterexamples: 0" in out


def test_oracle_counterexample_exit_code(problem_file, capsys, monkeypatch):
    fake = FuzzReport(seed=1, trials=1)
    fake.violations.append(Violation(0, "demo", "forced", "vars x\nsharing {x}\n"))
    monkeypatch.setattr(cli, "run_trials", lambda *a, **k: fake)
    code, out, _ = run(["oracle", "--trials", "1"], capsys)
    assert code == 3
    assert "property=demo" in out
    assert "counterexamples: 1" in out


def test_oracle_replay_round_trip(problem_file, tmp_path, capsys):
    from sharelin.fuzz import _counterexample_text, exact_abstraction
    from sharelin.fuzz import Instance
    from sharelin.terms import Compound, Equation, Variable, VariableUniverse

    w, x, y, z = (Variable(n) for n in "wxyz")
    instance = Instance(
        VariableUniverse.of_names(["w", "x", "y", "z"]),
        (Equation(w, Compound("f", (x, y, z))),),
        (Equation(w, Compound("f", (z, x, y))),),
    )
    _, triple, formula = exact_abstraction(instance.universe, instance.base)
    path = tmp_path / "counterexample.sl"
    path.write_text(_counterexample_text(instance, triple, formula, instance.equations))
    code, out, _ = run(["oracle", "--replay", str(path)], capsys)
    assert code == 0
    assert "counterexamples: 0" in out
    # the same file still parses as a plain analysis input
    code, _, _ = run(["analyze", str(path)], capsys)
    assert code == 0


def test_timing_goes_to_stderr_not_stdout(problem_file, capsys):
    _, out, err = run(["analyze", problem_file(REDUNDANT)], capsys)
    assert "elapsed" not in out
    assert "elapsed" in err
