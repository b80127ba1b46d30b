import json

import pytest

from decoderlab.cli import cli_dispatch


def run_cli(capsys, *argv):
    code = cli_dispatch(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_build_code(capsys):
    code, out, _ = run_cli(capsys, "build-code", "--d", "3")
    assert code == 0
    payload = json.loads(out)
    assert payload["d"] == 3 and len(payload["qubits"]) == 9


def test_build_graph(capsys):
    code, out, _ = run_cli(capsys, "build-graph", "--d", "3", "--rounds", "3")
    assert code == 0
    payload = json.loads(out)
    assert len(payload["nodes"]) == 18


def test_memory_p_zero(capsys):
    code, out, _ = run_cli(
        capsys, "memory", "--d", "3", "--p", "0", "--shots", "100", "--seed", "1"
    )
    assert code == 0
    row = out.strip().split("\n")[1].split(",")
    assert row[3] == "0"


def test_sweep_deterministic_bytes(capsys, tmp_path):
    args = ["sweep", "--d", "3,5", "--p", "1e-3", "--shots", "400", "--seed", "9"]
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert cli_dispatch(args + ["--out", str(a)]) == 0
    assert cli_dispatch(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().strip().split("\n")) == 3


def test_threshold_output(capsys):
    code, out, _ = run_cli(
        capsys, "threshold", "--family", "uf", "--beta", "1.2", "--gamma", "2.8",
        "--lambda", "107", "--xi", "10",
    )
    assert code == 0
    assert "p_th = " in out
    value = float(out.strip().split("p_th = ")[1])
    assert 2.5e-27 / 2 <= value <= 2.5e-27 * 2


def test_threshold_reports_k0_kbar(capsys):
    code, out, _ = run_cli(
        capsys, "threshold", "--d", "7", "--p", "1e-28",
    )
    assert code == 0
    payload = json.loads(out.rsplit("p_th = ", 1)[0])
    assert payload["k0"] >= 1
    assert payload["kbar"] >= 0


def test_cantor_cli(capsys):
    code, out, _ = run_cli(capsys, "cantor", "--d", "5")
    assert code == 0
    payload = json.loads(out)
    assert payload["greedy_logical_failure"] is True
    assert payload["weight"] == 4


def test_parallel_runtime_cli(capsys):
    code, out, _ = run_cli(
        capsys, "parallel-runtime", "--d", "3", "--p", "1e-3", "--shots", "200",
        "--seed", "2",
    )
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0].startswith("d,p,shots,mean_parallel_time")
    assert len(lines) == 2


def test_cluster_analyze_cli(capsys):
    code, out, _ = run_cli(
        capsys, "cluster-analyze", "--d", "3", "--p", "1e-3", "--shots", "300",
        "--seed", "3",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["violations"] == 0


def test_usage_errors_exit_one(capsys):
    assert cli_dispatch(["nonsense"]) == 1
    capsys.readouterr()
    assert cli_dispatch(["memory", "--d", "3"]) == 1  # missing required flags
    capsys.readouterr()
    assert cli_dispatch(["build-code", "--d", "4"]) == 1  # even distance
    capsys.readouterr()


def test_quick_verify_passes(capsys):
    code, out, _ = run_cli(capsys, "verify", "--quick")
    assert code == 0
    assert "invariants hold" in out
