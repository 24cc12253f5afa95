"""End-to-end command line checks, driven through main() plus one real
subprocess for the installed entry point."""

import json
import subprocess
import sys

import pytest

from ctkit.cli import main

CURL = "X[1,2] // m[1,2>3]"
FIG_EXAMPLE = "{1,4}+ {2,7}- {3,5}0 {6,9}0 {8,10}-"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- gamma / dgamma ----------------------------------------------------


def test_gamma_text(capsys):
    code, out, err = run(capsys, "gamma", "--expr", CURL)
    assert code == 0 and err == ""
    assert out.splitlines() == ["omega = t", "r3c3 = 1"]


def test_gamma_json(capsys):
    code, out, _ = run(capsys, "gamma", "--format", "json", "--expr", CURL)
    assert code == 0
    assert json.loads(out) == {"omega": "t", "matrix": {"3,3": "1"},
                               "strands": [3]}


def test_gamma_latex(capsys):
    code, out, _ = run(capsys, "gamma", "--format", "latex", "--expr", CURL)
    assert code == 0 and out.strip() == "t"


def test_gamma_bad_expression(capsys):
    code, out, err = run(capsys, "gamma", "--expr", "X[1,2] //")
    assert code == 1 and out == ""
    assert err.startswith("ctkit: ")


def test_missing_input_is_usage_error(capsys):
    with pytest.raises(SystemExit) as e:
        main(["gamma"])
    assert e.value.code == 2


def test_dgamma_pinch_text(capsys):
    code, out, _ = run(capsys, "dgamma", "--gct", "{1,2}0")
    assert code == 0
    assert out.splitlines() == ["value = -1 + h1", "unit = -t^1",
                                "h1 = contact 1"]


def test_dgamma_gct_matches_compiled_expr(capsys):
    _, via_gct, _ = run(capsys, "dgamma", "--format", "json",
                        "--gct", "{1,3}0 {2,4}0")
    _, dsl, _ = run(capsys, "gct", "compile", "--frame-zero", "--emit-dsl",
                    "--gct", "{1,3}0 {2,4}0")
    _, via_expr, _ = run(capsys, "dgamma", "--format", "json",
                         "--expr", dsl.strip())
    assert json.loads(via_gct) == json.loads(via_expr)


def test_dgamma_with_matrix(capsys):
    code, out, _ = run(capsys, "dgamma", "--with-matrix", "--expr",
                       "H[1;1,2] H[2;3,4] // m[1,2,3,4>5]")
    assert code == 0
    assert any(line.startswith("omega = ") for line in out.splitlines())
    code, out, _ = run(capsys, "dgamma", "--with-matrix", "--format", "json",
                       "--expr", "H[1;1,2] H[2;3,4] // m[1,2,3,4>5]")
    payload = json.loads(out)
    assert payload["contacts"] == {"h1": "1", "h2": "2"}
    assert "state" in payload and "omega" in payload["state"]


def test_dgamma_file_sniffs_notation(tmp_path, capsys):
    p = tmp_path / "chain.gct"
    p.write_text("  {1,2}0\n")
    _, from_file, _ = run(capsys, "dgamma", "--file", str(p))
    _, from_flag, _ = run(capsys, "dgamma", "--gct", "{1,2}0")
    assert from_file == from_flag
    q = tmp_path / "chain.tw"
    q.write_text(CURL + "\n")
    _, out, _ = run(capsys, "dgamma", "--file", str(q))
    assert out.splitlines()[0] == "value = 1"


# -- gct compile / matrix ----------------------------------------------


def test_compile_emit_dsl(capsys):
    code, out, _ = run(capsys, "gct", "compile", "--gct", "{1,2}0",
                       "--emit-dsl")
    assert code == 0 and out.strip() == "H[1;1,2] // m[1,2>3]"


def test_compile_text_report(capsys):
    code, out, _ = run(capsys, "gct", "compile", "--gct", "{1,2}+")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "notation = {1,2}+"
    assert lines[1] == "dsl = X[4,1] X[2,3] // m[1,2,3,4>5]"
    assert lines[2] == "crossings = 2"
    assert lines[3] == "piece writhes = 0:+2"


def test_compile_json(capsys):
    code, out, _ = run(capsys, "gct", "compile", "--format", "json",
                       "--frame-zero", "--gct", "{1,3}0 {2,4}0")
    payload = json.loads(out)
    assert code == 0
    assert payload["frame_corrected"] is True
    assert payload["crossings"] == 5
    assert all(w == 0 for _, w in payload["piece_writhes"])


def test_matrix_formats(capsys):
    code, out, _ = run(capsys, "gct", "matrix", "--gct", FIG_EXAMPLE)
    assert code == 0
    body = [line.split()[1:] for line in out.splitlines()[1:]]
    assert ["".join(row) for row in body] \
        == ["0XXSS", "X0PXS", "XP0SS", "SXS0X", "SSSX0"]

    code, out, _ = run(capsys, "gct", "matrix", "--format", "json",
                       "--gct", "{1,2}0 {3,4}0")
    payload = json.loads(out)
    assert payload == {"contacts": ["{1,2}0", "{3,4}0"],
                       "matrix": [["0", "S"], ["S", "0"]]}

    code, out, _ = run(capsys, "gct", "matrix", "--format", "csv",
                       "--gct", "{1,2}0 {3,4}0")
    assert out.splitlines() == [",{1,2}0,{3,4}0",
                                "{1,2}0,0,S", "{3,4}0,S,0"]

    code, out, _ = run(capsys, "gct", "matrix", "--format", "md",
                       "--gct", "{1,2}0 {3,4}0")
    assert out.splitlines()[0] == "| | {1,2}0 | {3,4}0 |"

    code, out, _ = run(capsys, "gct", "matrix", "--format", "latex",
                       "--gct", "{1,2}0 {3,4}0")
    assert out.splitlines()[0] == r"\begin{tabular}{lcc}"


def test_compile_file_input(tmp_path, capsys):
    p = tmp_path / "d.gct"
    p.write_text("{1,2}0 {3,4}0\n")
    _, from_file, _ = run(capsys, "gct", "compile", "--file", str(p),
                          "--emit-dsl")
    _, from_flag, _ = run(capsys, "gct", "compile", "--gct", "{1,2}0 {3,4}0",
                          "--emit-dsl")
    assert from_file == from_flag
    code, _, err = run(capsys, "gct", "compile", "--file",
                       str(tmp_path / "missing"), "--emit-dsl")
    assert code == 1 and err.startswith("ctkit: ")


# -- tabulate ----------------------------------------------------------


def test_tabulate_text_is_markdown(capsys):
    code, out, _ = run(capsys, "tabulate", "-n", "1")
    assert code == 0
    assert out.splitlines()[0] == "| notation | invariant | unit | group |"
    assert len(out.splitlines()) == 2 + 3


def test_tabulate_jobs_deterministic(capsys):
    _, one, _ = run(capsys, "tabulate", "-n", "2", "--format", "csv")
    _, two, _ = run(capsys, "tabulate", "-n", "2", "--format", "csv",
                    "--jobs", "2")
    assert one == two
    assert len(one.splitlines()) == 1 + 27


def test_tabulate_rejects_big_n(capsys):
    with pytest.raises(SystemExit) as e:
        main(["tabulate", "-n", "4"])
    assert e.value.code == 2


# -- verify ------------------------------------------------------------


def test_verify_full_run(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    lines = out.splitlines()
    assert lines[-1] == "result: PASS (17 move checks)"
    assert any(line.startswith("INFO dgamma R1+") for line in lines)
    assert any(line.startswith("PASS naive contact rule:") for line in lines)


def test_verify_one_engine_json(capsys):
    code, out, _ = run(capsys, "verify", "--engine", "dgamma",
                       "--format", "json")
    payload = json.loads(out)
    assert code == 0 and payload["passed"] is True
    assert len(payload["moves"]) == 13
    assert payload["naive_extension"] is None

    code, out, _ = run(capsys, "verify", "--engine", "gamma",
                       "--format", "json")
    payload = json.loads(out)
    assert payload["naive_extension"]["ok"] is True


def test_verify_move_filter(capsys):
    code, out, _ = run(capsys, "verify", "--move", "R3")
    assert code == 0
    assert out.splitlines()[-1] == "result: PASS (2 move checks)"
    with pytest.raises(SystemExit) as e:
        main(["verify", "--move", "R9"])
    assert e.value.code == 2


# -- random ------------------------------------------------------------


def test_random_deterministic(capsys):
    _, a, _ = run(capsys, "random", "-n", "5", "--seed", "3")
    _, b, _ = run(capsys, "random", "-n", "5", "--seed", "3")
    _, c, _ = run(capsys, "random", "-n", "5", "--seed", "4")
    assert a == b != c
    _, blob, _ = run(capsys, "random", "-n", "5", "--seed", "3",
                     "--format", "json")
    assert len(json.loads(blob)) == 5
    with pytest.raises(SystemExit) as e:
        main(["random", "-n", "0"])
    assert e.value.code == 2


# -- installed entry point ---------------------------------------------


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "ctkit.cli", "gamma",
                           "--expr", CURL], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "omega = t"
    proc = subprocess.run(["ctkit", "random", "-n", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
