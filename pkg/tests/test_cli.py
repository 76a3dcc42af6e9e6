import csv
import io
import json
import subprocess
import sys

import pytest

from evoalg.cli import TRACE_COLUMNS, fmt_number, main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    return code, json.loads(text)


def test_classify_reports():
    code, rep = run_json("classify", "-m", "1,1,-1,-1")
    assert code == 0 and rep["class"] == "E3" and rep["verified"] is True
    assert rep["witness"] == [[1, 0], [0, 1]]
    assert run_json("classify", "-m", "0,0,0,0")[1]["class"] == "E0"
    code, rep = run_json("classify", "-m", "2,4,6,2")
    assert rep["class"] == "E6" and rep["params"] == [2, 3]
    assert rep["mode"] == "exact" and rep["config"]["matrix"] == "2,4,6,2"


def test_classify_exact_radical_params():
    _, rep = run_json("classify", "-m", "0,2,1,1")
    assert rep["class"] == "E7"
    assert rep["params_exact"] == ["1/2*cbrt(4)"]  # 1/cbrt(2)
    assert rep["params"] == [0.793700525984]


def test_classify_ambiguous_exit_code():
    code, rep = run_json("classify", "-m", "1.0,1.0,-1.0,-0.9999999999999")
    assert code == 2 and rep["ambiguous"] is True and rep["class"] == "E3"


@pytest.mark.parametrize("matrix", ["1,2,3", "a,b,c,d", "1/0,1,1,1", ""])
def test_classify_malformed_input(matrix, capsys):
    code, text = run("classify", "-m", matrix)
    assert code == 1 and text == ""
    assert "evoalg: error:" in capsys.readouterr().err


def test_classify_csv():
    code, text = run("classify", "-m", "2,4,6,2", "--format", "csv")
    assert text == "class,param1,param2,verified,ambiguous\nE6,2,3,true,false\n"


def test_iso_reports():
    _, rep = run_json("iso", "--left", "1,2,3,1", "--right", "1,3,2,1")
    assert rep["isomorphic"] is True and rep["witness"] == [[0, 1], [1, 0]]
    _, rep = run_json("iso", "--left", "1,0,0,0", "--right", "1,0,1,0")
    assert rep["isomorphic"] is False and rep["witness"] is None
    _, rep = run_json("iso", "--left", "2,4,6,2", "--right", "2,4,6,2")
    assert rep["isomorphic"] is True and rep["witness"] == [[1, 0], [0, 1]]


def test_cea_reports():
    code, rep = run_json("cea", "check", "--family", "f3", "--phi", "exp(t)", "--psi", "t")
    assert code == 0 and rep["pass"] is True and rep["max_relative_residual"] <= 1e-9
    _, rep = run_json("cea", "check", "--family", "f2", "--printed-form")
    assert rep["pass"] is False and rep["max_residual"] == pytest.approx(0.353553, abs=1e-6)
    assert "discrepancy_note" in rep and rep["family"]["printed_form"] is True
    _, rep = run_json("cea", "period", "--family", "f2", "--var", "t", "--max", "10")
    assert rep["period"] == pytest.approx(6.283185, abs=1e-6)
    _, rep = run_json("cea", "homogeneity", "--family", "f1", "--lambda", "2", "--mu", "0.5")
    assert rep["pass"] is True and "discrepancy_note" not in rep


def test_cea_family_errors(capsys):
    assert run("cea", "check", "--family", "f3", "--phi", "0 * t", "--psi", "t")[0] == 1
    assert run("cea", "check", "--family", "f3", "--phi", "exp(", "--psi", "t")[0] == 1
    assert run("cea", "check", "--family", "f9")[0] == 1
    assert "error" in capsys.readouterr().err


def test_trace_csv_file(tmp_path, capsys):
    out = tmp_path / "trace.csv"
    code, _ = run("trace", "--family", "f2", "--s", "0", "--t0", "0", "--t1", "3.2",
                  "--step", "0.1", "--out", str(out))
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert tuple(rows[0]) == TRACE_COLUMNS
    assert len(rows) == 34
    flagged = [r[1] for r in rows[1:] if r[7] == "true"]
    assert flagged == ["1.5", "1.6"]
    echo = json.loads(capsys.readouterr().err)
    assert echo["family"]["printed_form"] is False


def test_trace_diagonal_family():
    _, text = run("trace", "--family", "f1", "--lambda", "2", "--mu", "2", "--s", "0",
                  "--t0", "0", "--t1", "1", "--step", "0.25")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 5
    assert all((r["class"], r["param1"], r["param2"]) == ("E6", "0", "0") for r in rows)


def test_trace_json_agrees():
    _, rows = run_json("trace", "--family", "f3", "--phi", "exp(t)", "--psi", "t", "--s", "0",
                       "--t0", "0", "--t1", "2", "--step", "0.1", "--format", "json")
    assert len(rows) == 21 and all(r["agrees"] for r in rows)
    assert [r["t"] for r in rows] == sorted(r["t"] for r in rows)


def test_trace_failure_leaves_no_file(tmp_path):
    out = tmp_path / "bad.csv"
    code, _ = run("trace", "--family", "custom", "--m11", "log(t - 1)", "--m12", "0",
                  "--m21", "0", "--m22", "1", "--s", "0", "--t0", "0", "--t1", "2",
                  "--step", "0.5", "--out", str(out))
    assert code == 1
    assert list(tmp_path.iterdir()) == []


def test_outputs_are_byte_identical(tmp_path):
    args = ("trace", "--family", "f3", "--phi", "1 + t^2", "--psi", "t^3", "--s", "0.5",
            "--t0", "0.5", "--t1", "2", "--step", "0.05")
    assert run(*args) == run(*args)
    assert run("cea", "check", "--family", "f1") == run("cea", "check", "--family", "f1")


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# trace settings\nfamily = f1\nlambda = 2\nmu = 2\ns = 0\nt1 = 1\nstep = 0.5\n")
    code, text = run("trace", "--config", str(cfg), "--mu", "0.5")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 3 and rows[1]["param1"] != "0"  # flag beats config
    cfg.write_text("family = f1\ncolour = blue\n")
    assert run("trace", "--config", str(cfg))[0] == 1
    cfg.write_text("matrix = 2,4,6,2\n")
    code, rep = run_json("classify", "--config", str(cfg))
    assert code == 0 and rep["class"] == "E6" and rep["config"]["matrix"] == "2,4,6,2"


def test_number_formatting():
    assert fmt_number(1 / 3) == "0.333333333333"
    assert fmt_number(-0.0) == "0"
    assert fmt_number(2.0) == "2"
    assert fmt_number(1e-20) == "1e-20"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "evoalg", "classify", "-m", "3,1,1,3"],
                          capture_output=True, text=True, check=True)
    rep = json.loads(proc.stdout)
    assert rep["class"] == "E6" and rep["params"] == [0.333333333333, 0.333333333333]
