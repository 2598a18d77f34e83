import json

import pytest

from torsdiv import __version__
from torsdiv.cli import main

KEYS = {"check", "n", "inputs", "status", "certificate", "elapsed_ms", "version", "seed"}


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out, json.loads(out)


def _no_floats(obj):
    if isinstance(obj, float):
        return False
    if isinstance(obj, dict):
        return all(_no_floats(v) for v in obj.values())
    if isinstance(obj, list):
        return all(_no_floats(v) for v in obj)
    return True


@pytest.mark.parametrize("argv", [
    ["check", "whitehead-divisor"],
    ["check", "smooth", "--n", "2"],
    ["check", "nongeometric", "--n", "5"],
    ["check", "diagonal"],
    ["oracle", "reps", "--n", "2", "--p", "7"],
    ["oracle", "peripheral", "--samples", "10", "--seed", "3"],
    ["oracle", "order3", "--samples", "10"],
    ["lfunction", "survey", "--n", "1", "--p", "5"],
    ["lfunction", "--n", "1", "--p", "5", "--point", "3,3,4"],
])
def test_passing_commands(capsys, argv):
    code, _, rep = _run(capsys, *argv)
    assert code == 0 and rep["status"] == "pass"
    assert set(rep) == KEYS and rep["version"] == __version__
    assert isinstance(rep["elapsed_ms"], int)
    assert _no_floats(rep)


def test_family_cheb_prints_polynomial(capsys):
    code, _, rep = _run(capsys, "family", "cheb", "--k", "3", "--kind", "T")
    assert code == 0 and rep["status"] == "report-only"
    assert rep["certificate"]["str"] == "v^3 -3*v"


def test_control_point_is_report_only(capsys):
    code, _, rep = _run(capsys, "lfunction", "--n", "1", "--p", "5", "--point", "0,0,0")
    assert code == 0 and rep["certificate"]["verdict"] == "not-applicable"


def test_errors_exit_two(capsys):
    code, _, rep = _run(capsys, "check", "geometric-mult", "--n", "2", "--budget-s", "0")
    assert code == 2 and rep["status"] == "error"
    assert rep["certificate"]["error"] == "BudgetExceeded"
    code, _, rep = _run(capsys, "lfunction", "--n", "1", "--p", "9")
    assert code == 2 and rep["status"] == "error"
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2


def test_verify_all_zero_budget(capsys):
    code, _, rep = _run(capsys, "verify-all", "--budget-s", "0")
    assert code == 2 and rep["certificate"]["criteria"] == []


def test_deterministic_output(capsys):
    argv = ["oracle", "peripheral", "--samples", "20", "--no-timing"]
    _, a, _ = _run(capsys, *argv)
    _, b, _ = _run(capsys, *argv)
    assert a == b


def test_out_pretty_and_emit_gb(tmp_path, capsys):
    out, gb = tmp_path / "r.json", tmp_path / "gb.json"
    code = main(["check", "smooth", "--n", "1", "--pretty", "--out", str(out), "--emit-gb", str(gb)])
    assert code == 0 and capsys.readouterr().out == ""
    text = out.read_text()
    assert text.startswith("{\n")
    assert json.loads(text)["status"] == "pass"
    basis = json.loads(gb.read_text())["basis"]
    assert basis == [{"terms": [{"c": "1", "e": [0, 0, 0, 0]}], "vars": ["x", "y", "z", "v"]}]


def test_flags_after_subcommand_and_backend(capsys):
    code, _, rep = _run(capsys, "oracle", "reps", "--n", "1", "--p", "5", "--backend", "numpy", "--seed", "9")
    assert code == 0 and rep["seed"] == 9 and rep["inputs"]["backend"] == "numpy"
