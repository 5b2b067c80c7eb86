#!/usr/bin/env python3
"""Command line: envelopes, manifests, exit codes and file outputs"""

import json

import pandas as pd
import pytest
from click.testing import CliRunner

from src.cli import cli, main


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def single_qubit_circuit(runner, tmp_path):
    path = tmp_path / "c.json"
    result = runner.invoke(cli, ["circuit", "random", "--n-qubits", "3", "--depth", "2", "--k", "1",
                                 "--seed", "9", "--out", str(path)])
    assert result.exit_code == 0
    return path


def envelope(result):
    return json.loads(result.stdout)


class TestBounds:
    def test_lower_reference_point(self, runner):
        result = runner.invoke(cli, ["bounds", "lower", "--n-qubits", "100", "--eps", "0.005",
                                     "--varpi", "0.3", "--kappa", "1e-6"])
        assert result.exit_code == 0
        payload = envelope(result)
        assert payload["command"] == "bounds lower"
        assert payload["result"]["value_bits"] == pytest.approx(17.2, abs=0.05)
        assert payload["units"]["value_bits"] == "bits"

    def test_lower_optimizes_varpi(self, runner):
        result = runner.invoke(cli, ["bounds", "lower", "--n-qubits", "1000", "--eps", "0.001", "--kappa", "0.5"])
        assert result.exit_code == 0
        assert 0.0 < envelope(result)["result"]["varpi"] < 1.0

    def test_upper_text_summary(self, runner):
        result = runner.invoke(cli, ["bounds", "upper", "--n-qubits", "2", "--ell", "1", "--eps", "1.0", "--text"])
        assert result.exit_code == 0
        assert result.stdout.startswith("bounds upper: value_bits=117.6")

    def test_sweep_csv(self, runner, tmp_path):
        path = tmp_path / "upper.csv"
        result = runner.invoke(cli, ["bounds", "sweep", "--kind", "upper", "--n-qubits", "8", "--n-qubits", "16",
                                     "--eps", "0.1", "--csv", str(path)])
        assert result.exit_code == 0
        frame = pd.read_csv(path)
        assert frame["num_qubits"].tolist() == [8, 16]

    def test_mo_cost(self, runner):
        result = runner.invoke(cli, ["bounds", "mo-cost", "--n-qubits", "3", "--eps", "0.01"])
        assert result.exit_code == 0
        assert envelope(result)["result"]["copies"] >= 1


class TestExitCodes:
    def test_epsilon_above_one(self, single_qubit_circuit):
        assert main(["program", "--circuit", str(single_qubit_circuit), "--eps", "2.0"]) == 1

    def test_missing_seed(self, tmp_path):
        assert main(["circuit", "random", "--n-qubits", "3", "--depth", "2", "--out", str(tmp_path / "c.json")]) == 1

    def test_seed_outside_u64(self, tmp_path):
        args = ["circuit", "random", "--n-qubits", "3", "--depth", "2", "--out", str(tmp_path / "c.json"),
                "--seed", "-1"]
        assert main(args) == 1

    def test_usage_error(self):
        assert main(["bounds", "upper", "--n-qubits", "4"]) == 1

    def test_unknown_command(self):
        assert main(["frobnicate"]) == 1

    def test_success(self):
        assert main(["repr", "dn", "--n", "2", "--d", "2"]) == 0


class TestCircuitCommands:
    def test_program_report(self, runner, single_qubit_circuit, tmp_path):
        report = tmp_path / "report.json"
        result = runner.invoke(cli, ["program", "--circuit", str(single_qubit_circuit), "--eps", "0.5",
                                     "--report", str(report)])
        assert result.exit_code == 0
        payload = envelope(result)["result"]
        assert payload["achieved_error"] <= 0.5
        assert len(payload["gaps"]) == 6
        assert len(json.loads(report.read_text())["program"]["records"]) == 6

    def test_program_needs_single_qubit_gates(self, runner, tmp_path):
        path = tmp_path / "two.json"
        runner.invoke(cli, ["circuit", "random", "--n-qubits", "4", "--depth", "2", "--seed", "1", "--out", str(path)])
        result = runner.invoke(cli, ["program", "--circuit", str(path), "--eps", "0.5"])
        assert result.exit_code == 1
        assert "NoCertifiedNet" in result.stderr

    def test_decompose_with_check(self, runner, tmp_path):
        path = tmp_path / "c.json"
        out = tmp_path / "cones.json"
        runner.invoke(cli, ["circuit", "random", "--n-qubits", "6", "--depth", "4", "--seed", "2", "--out", str(path)])
        result = runner.invoke(cli, ["lightcone", "decompose", "--circuit", str(path), "--w", "2", "--out", str(out)])
        assert result.exit_code == 0
        payload = envelope(result)["result"]
        assert payload["passed"]
        assert payload["cones"] == len(json.loads(out.read_text())["cones"])

    def test_structured_tradeoff_from_circuit(self, runner, tmp_path):
        path = tmp_path / "pauli.json"
        runner.invoke(cli, ["circuit", "random", "--n-qubits", "6", "--depth", "6", "--gate-kind", "pauli",
                            "--seed", "3", "--out", str(path)])
        result = runner.invoke(cli, ["lightcone", "tradeoff", "--mode", "structured", "--circuit", str(path),
                                     "--w", "6", "--eps", "0.01"])
        assert result.exit_code == 0
        assert envelope(result)["result"]["mode"] == "structured"

    def test_generic_tradeoff_needs_shape(self, runner):
        result = runner.invoke(cli, ["lightcone", "tradeoff", "--mode", "generic"])
        assert result.exit_code == 1


class TestReproducibility:
    def test_identical_stdout(self, runner):
        args = ["mosim", "estimate-p", "--samples", "2000", "--seed", "42"]
        first, second = runner.invoke(cli, args), runner.invoke(cli, args)
        assert first.exit_code == 0
        assert first.stdout == second.stdout

    def test_haar_needs_seed(self, runner):
        result = runner.invoke(cli, ["mosim", "estimate-p", "--samples", "2000"])
        assert result.exit_code == 1

    def test_clifford_runs_without_seed(self, runner):
        result = runner.invoke(cli, ["mosim", "estimate-p", "--ensemble", "clifford"])
        assert result.exit_code == 0
        assert envelope(result)["result"]["p_hat"] == pytest.approx(1 / 3, abs=1e-12)

    def test_manifest_file(self, runner, tmp_path):
        path = tmp_path / "manifest.json"
        result = runner.invoke(cli, ["--manifest", str(path), "repr", "dn", "--n", "3", "--d", "2"])
        assert result.exit_code == 0
        manifest = json.loads(path.read_text())
        assert manifest["command"] == "repr dn"
        assert manifest["arguments"]["n"] == 3
        assert "stdout" in manifest["output_digests"]


class TestSuitesAndSweeps:
    def test_verify_repr(self, runner):
        result = runner.invoke(cli, ["verify", "--suite", "repr", "--quick"])
        assert result.exit_code == 0
        checks = envelope(result)["result"]["suites"][0]["checks"]
        assert {c["name"] for c in checks} >= {"cauchy_identity"}
        assert all(c["failures"] == 0 for c in checks)

    def test_generic_sweep_csv(self, runner, tmp_path):
        path = tmp_path / "generic.csv"
        result = runner.invoke(cli, ["sweep", "generic", "--min-exp", "4", "--max-exp", "8", "--csv", str(path)])
        assert result.exit_code == 0
        assert len(pd.read_csv(path)) == 5

    def test_sweep_bad_range(self, runner, tmp_path):
        result = runner.invoke(cli, ["sweep", "tightness", "--min-exp", "9", "--max-exp", "8",
                                     "--csv", str(tmp_path / "t.csv")])
        assert result.exit_code == 1
