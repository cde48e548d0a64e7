import csv
import io
import json

import numpy as np
import pytest

from heunlim import cli


def _run(capsys, *argv):
    code = cli.run(list(argv))
    return code, capsys.readouterr().out


def test_solve_json_document(capsys):
    code, out = _run(capsys, "solve", "--n", "10", "--j1", "3", "--j2", "4")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"config", "results", "residuals", "timings", "version", "passed"}
    assert doc["passed"] and doc["timings"] is None
    assert doc["residuals"]["eigenvalue_gap"] <= 1e-11
    assert len(doc["results"]["v1_eigs_direct"]) == 11


def test_output_is_deterministic(capsys):
    argv = ("verify", "--suite", "orthopoly", "--seed", "42")
    _, first = _run(capsys, *argv)
    _, second = _run(capsys, *argv)
    assert first == second
    assert json.loads(first)["passed"]


def test_timings_flag(capsys):
    _, out = _run(capsys, "kernel", "--n", "4", "--j1", "2", "--j2", "2", "--timings")
    assert json.loads(out)["timings"]["total_s"] >= 0


def test_csv_and_json_carry_the_same_numbers(capsys):
    argv = ["spectrum", "--n", "8", "--j1", "3", "--j2", "5"]
    _, js = _run(capsys, *argv)
    _, cs = _run(capsys, *argv, "--format", "csv")
    assert "\r\n" in cs
    rows = list(csv.reader(io.StringIO(cs, newline="")))
    assert rows[0] == ["series", "index", "value"]
    got = [float(v) for s, _, v in rows[1:] if s == "results.v1_spectrum"]
    assert got == json.loads(js)["results"]["v1_spectrum"]


def test_kernel_full_band_is_identity_block(capsys):
    code, out = _run(capsys, "kernel", "--n", "8", "--j1", "3", "--j2", "8")
    assert code == 0
    k = np.array(json.loads(out)["results"]["k"])
    assert np.allclose(k, np.eye(9)[:4], atol=1e-11)


@pytest.mark.parametrize(
    "argv",
    [
        ("solve", "--n", "5", "--j1", "9"),
        ("solve", "--alpha", "-1.5"),
        ("heun-action", "--k", "2"),
        ("solve", "--tol", "eigs"),
        ("frobnicate",),
    ],
)
def test_bad_input_exits_2(capsys, argv):
    assert cli.run(list(argv)) == cli.EXIT_INPUT == 2


def test_tolerance_failure_exits_3(capsys):
    code, out = _run(capsys, "solve", "--n", "10", "--j1", "3", "--j2", "4", "--tol", "eigs=0")
    assert code == 3
    assert json.loads(out)["passed"] is False
    code, out = _run(capsys, "solve", "--n", "10", "--j1", "3", "--j2", "4", "--tol", "commute=0")
    assert code == 3
    assert json.loads(out)["error"]["type"] == "tolerance"


def test_env_seed_overrides_flag(capsys, monkeypatch):
    monkeypatch.setenv("HEUNLIM_SEED", "7")
    _, out = _run(capsys, "verify", "--suite", "orthopoly", "--seed", "42")
    assert json.loads(out)["config"]["seed"] == 7
    monkeypatch.setenv("HEUNLIM_SEED", "x")
    assert cli.run(["verify", "--suite", "orthopoly"]) == 2


def test_output_file(tmp_path, capsys):
    path = tmp_path / "out.json"
    assert cli.run(["algebra-check", "--n", "6", "--output", str(path)]) == 0
    doc = json.loads(path.read_text())
    assert doc["residuals"]["closure"] <= 1e-9
    assert capsys.readouterr().out == ""


def test_heun_action_table(capsys):
    code, out = _run(capsys, "heun-action", "--k", "10", "--n", "8")
    assert code == 0
    doc = json.loads(out)
    assert doc["residuals"]["leakage"] <= 1e-12
    assert len(doc["results"]["table"]["eta"]) == len(doc["results"]["table"]["n"])
