import json
import subprocess
import sys

import pytest

from gkz_gevrey.cli import main
from gkz_gevrey.commands import Report, emit_report, run_command
from gkz_gevrey.problem import parse_problem


def write(tmp_path, text, name="p.gkz"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_basis_report(tmp_path, capsys):
    spec = write(tmp_path, "A = 2 3\nbeta = 1/2\nM = 50\n")
    code, out, _ = run(capsys, "basis", "--spec", spec)
    data = json.loads(out)
    assert code == 0 and data["ok"]
    assert len(data["result"]["axis"]) == 2 and len(data["result"]["generic"]) == 3


def test_monodromy_and_ext(tmp_path, capsys):
    code, out, _ = run(capsys, "monodromy", "--spec", write(tmp_path, "A = 2 3\nbeta = 1\n"))
    assert code == 0
    assert sorted(z[0] for z in json.loads(out)["result"]["eigenvalues"]) == [-1.0, 1.0]
    code, out, _ = run(capsys, "ext", "--spec", write(tmp_path, "A = 2 3\nbeta = 8\npoint = 1\ns = 5/4\n"))
    assert code == 0
    tables = json.loads(out)["result"]["tables"]
    assert tables and all(t["status"] == "MATCH" for t in tables)


def test_usage_errors_exit_2(tmp_path, capsys):
    assert run(capsys, "basis", "--spec", write(tmp_path, "A = 2 4\nbeta = 1\n"))[0] == 2
    code, _, err = run(capsys, "basis", "--spec", write(tmp_path, "A = 2 3\nbeta = 0.5\n"))
    assert code == 2 and "line 2" in err
    assert run(capsys, "bogus", "--spec", "x")[0] == 2
    assert run(capsys, "basis", "--spec", str(tmp_path / "missing"))[0] == 2
    assert run(capsys, "basis")[0] == 2


def test_bad_threads_exit_2(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("GKZ_THREADS", "zero")
    assert run(capsys, "monodromy", "--spec", write(tmp_path, "A = 2 3\nbeta = 1\n"))[0] == 2


def test_computation_error_exit_1(tmp_path, capsys):
    # M = 3 leaves too few coefficients for the Gevrey fit
    code, _, err = run(capsys, "gevrey", "--spec", write(tmp_path, "A = 2 3\nbeta = 1/2\nM = 3\n"))
    assert code == 1 and "TooFewTerms" in err


def test_out_file_and_determinism(tmp_path, capsys):
    spec = write(tmp_path, "A = 2 3\nbeta = 1/2\nM = 120\n")
    out = tmp_path / "g.csv"
    assert run(capsys, "gevrey", "--spec", spec, "--format", "csv", "--out", str(out))[0] == 0
    first = out.read_bytes()
    assert first.splitlines()[0] == b"series,m,n,logabs,fit"
    assert run(capsys, "gevrey", "--spec", spec, "--format", "csv", "--out", str(out))[0] == 0
    assert out.read_bytes() == first


def test_gevrey_json_schema():
    report = run_command(parse_problem("A = 2 3\nbeta = 1/2\nM = 200\n"), "gevrey")
    data = json.loads(emit_report(report))
    g = data["result"]["series"]["phi_v^0"]
    assert g["s_theoretical"] == "3/2" and abs(g["estimated_index"] - 1.5) < 0.05
    assert emit_report(report) == emit_report(report)


def test_empty_report_emissions():
    r = Report()
    assert emit_report(r, "json") == b"{}\n"
    assert emit_report(r, "csv") == b"series,m,n,logabs,fit\n"
    assert emit_report(r, "text") == b"no results\n"


def test_verify_with_threads(tmp_path):
    spec = write(tmp_path, "A = 2 3\nbeta = 8\ns = 1, 5/4, 3/2, 2\nM = 60\n")
    env = {"GKZ_THREADS": "2", "PATH": "/usr/bin:/bin"}
    proc = subprocess.run([sys.executable, "-m", "gkz_gevrey", "verify", "--spec", spec, "--format", "text"],
                          capture_output=True, env=env)
    assert proc.returncode == 0, proc.stderr
    assert b"FAIL" not in proc.stdout


@pytest.mark.parametrize("command", ["slope", "recurrence"])
def test_other_commands_run(tmp_path, capsys, command):
    code, out, _ = run(capsys, command, "--spec", write(tmp_path, "A = 2 3\nbeta = 1/2\nM = 150\n"), "--format", "text")
    assert code == 0 and out.startswith(f"gkz {command}")
