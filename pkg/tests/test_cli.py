import io
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from jetnorm.cli import EXIT_GUARDRAIL, EXIT_INVALID, EXIT_OK, main

SCHEMA = json.loads(resources.files("jetnorm").joinpath("schema/report.schema.json").read_text())


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv, "--json")
    assert code == EXIT_OK, err
    report = json.loads(out)
    jsonschema.validate(report, SCHEMA)
    return report


def test_nf_example(capsys):
    rep = run_json(capsys, "nf", "--group", "two-sided", "--vars", "x,y", "--order", "4", "[x+x^2,0;0,y]")
    assert rep["normal_form"]["text"] == "[x, 0; 0, y]"
    assert rep["verified"] is True
    assert rep["pde"]["passed"] is True
    assert [d["j"] for d in rep["degrees"]] == [1, 2, 3, 4]
    code, out, _ = run_cli(capsys, "nf", "--vars", "x,y", "--order", "4", "[x+x^2,0;0,y]")
    assert code == 0 and "normal form: [x, 0; 0, y]" in out


def test_smith_example(capsys):
    rep = run_json(capsys, "smith", "--vars", "x", "--order", "5", "[x^2,0;0,x]")
    assert rep["normal_form"]["text"] == "[x, 0; 0, x^2]"
    assert rep["exponents"] == [1, 2] and rep["verified"]


def test_determinacy_example(capsys):
    rep = run_json(capsys, "determinacy", "--group", "conjugacy", "--vars", "x", "--order", "4", "--k", "0",
                   "[1,0;0,1]")
    assert rep["first_failure"] == 1
    assert rep["verdicts"][0]["trace_obstruction"] is True
    assert any("trace" in w for w in rep["warnings"])
    code, out, _ = run_cli(capsys, "determinacy", "--vars", "x", "--order", "3", "--k", "0", "[1,0;0,1]")
    assert "not a proof" in out


def test_equiv_and_verify_pde(capsys):
    rep = run_json(capsys, "equiv", "--vars", "x,y", "--order", "3", "[x,y^2;0,y]", "[x,0;0,y]")
    assert rep["found"] and rep["verified"]
    rep = run_json(capsys, "equiv", "--vars", "x", "--order", "3", "[x]", "[x^2]")
    assert not rep["found"] and rep["witness"] is None
    rep = run_json(capsys, "verify-pde", "--vars", "x,y", "--order", "3", "--k", "1", "[x,y^2;0,y]")
    assert not rep["passed"]
    bad = [r for r in rep["relations"] if not r["passed"]][0]
    assert (bad["first_nonzero"]["row"], bad["first_nonzero"]["col"]) == (1, 2)


def test_explain_and_full_g(capsys):
    rep = run_json(capsys, "nf", "--explain", "--vars", "x", "--order", "2", "[x+x^2]")
    assert len(rep["explain"]) == 2 and "degree 2: V" in rep["explain"][1]
    rep = run_json(capsys, "nf", "--full-g", "--vars", "x", "--order", "3", "[2+x, 4; 1, 2+x^2]")
    assert rep["preprocess"] is not None
    assert rep["normal_form"]["text"].startswith("[1")


def test_gaussian_field(capsys):
    rep = run_json(capsys, "nf", "--field", "gaussian", "--vars", "x", "--order", "3", "[i*x + x^2, 0; 0, x]")
    assert rep["field"] == "gaussian" and rep["verified"]


def test_deterministic_bytes(capsys):
    argv = ["nf", "--vars", "x,y", "--order", "3", "--json", "[x + y^2, x*y; y, x - y]"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_file_and_stdin(tmp_path, capsys, monkeypatch):
    f = tmp_path / "m.txt"
    f.write_text("[x + x^2,\n 0;\n 0, y]  # diag\n")
    rep = run_json(capsys, "nf", "--vars", "x,y", "--order", "3", str(f))
    assert rep["normal_form"]["text"] == "[x, 0; 0, y]"
    monkeypatch.setattr(sys, "stdin", io.StringIO("[x^3, 0; 0, x]"))
    rep = run_json(capsys, "smith", "--vars", "x", "--order", "4", "-")
    assert rep["normal_form"]["text"] == "[x, 0; 0, x^3]"


@pytest.mark.parametrize("argv", [
    ["nf", "--vars", "x,y", "[x + z]"],
    ["nf", "--vars", "x", "[x +]"],
    ["nf", "--vars", "x", "--field", "padic", "[x]"],
    ["nf", "--vars", "x", "--group", "symplectic", "[x]"],
    ["nf", "--vars", "x", "--group", "conjugacy", "[x, x]"],
    ["nf", "--vars", "x", "no_such_file.txt"],
    ["nf", "--vars", "x", "--bogus", "[x]"],
    ["smith", "--vars", "x,y", "[x]"],
    ["equiv", "--vars", "x", "--group", "congruence", "[x]", "[x]"],
])
def test_invalid_input_exit_code(capsys, argv):
    code = None
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == EXIT_INVALID


def test_guardrail_exit_code(capsys, monkeypatch):
    monkeypatch.setenv("JETNORM_MAX_COLUMNS", "3")
    code, _, err = run_cli(capsys, "nf", "--vars", "x,y", "--order", "3", "[x, y; y, x]")
    assert code == EXIT_GUARDRAIL and "guardrail" in err


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "jetnorm.cli", "smith", "--vars", "x", "--order", "3", "[x^2]"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "normal form: [x^2]" in out.stdout
