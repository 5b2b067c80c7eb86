#!/usr/bin/env python3
"""Brickwork circuit codec, generation and dense evaluation"""

import json

import numpy as np
import pytest

from src.core.errors import DimensionMismatch, InvalidParams, NotUnitary, ParseError, TooLarge, ValidationError
from src.quantum import circuit as circuits
from src.quantum.matrixcore import haar_unitary, unitarity_gap
from src.quantum.models import Axis, BrickworkCircuit, ConnectivityGraph, DenseGate, GateSlot, PauliGate
from tests.conftest import brute_force_unitary


def identity_pairs(dim):
    return [[1.0, 0.0] if i == j else [0.0, 0.0] for i in range(dim) for j in range(dim)]


def single_gate_json():
    return json.dumps({
        "n": 2, "k": 2, "d": 1, "edges": [[0, 1]],
        "gates": [{"layer": 0, "support": [0, 1], "kind": "dense", "matrix": identity_pairs(4)}],
    })


class TestCodec:
    def test_single_identity_gate(self):
        c = circuits.parse_circuit(single_gate_json())
        assert c.num_gates == 1
        assert c.depth == 1
        assert np.allclose(circuits.circuit_unitary(c), np.eye(4))

    def test_round_trip(self):
        c = circuits.random_brickwork(5, 3, 2, "complete", seed=4)
        assert circuits.parse_circuit(circuits.serialize_circuit(c)) == c
        pauli = circuits.random_brickwork(4, 2, 2, seed=4, gate_kind="pauli", axis="X")
        assert circuits.parse_circuit(circuits.serialize_circuit(pauli)) == pauli

    def test_file_helpers(self, tmp_path):
        c = circuits.random_brickwork(4, 2, 2, seed=1)
        path = tmp_path / "c.json"
        circuits.write_circuit(c, path)
        assert circuits.read_circuit(path) == c

    def test_overlapping_supports_rejected(self):
        data = json.loads(single_gate_json())
        data["n"], data["edges"] = 3, [[0, 1], [1, 2]]
        data["gates"].append({"layer": 0, "support": [1, 2], "kind": "dense", "matrix": identity_pairs(4)})
        with pytest.raises(ValidationError):
            circuits.circuit_from_dict(data)

    @pytest.mark.parametrize("text", ["not json", "[]", '{"k": 2, "d": 1}', '{"n": 2, "k": 2, "d": 1, "gates": [{"layer": 0}]}'])
    def test_malformed(self, text):
        with pytest.raises(ParseError):
            circuits.parse_circuit(text)

    def test_non_unitary_gate(self):
        data = json.loads(single_gate_json())
        data["gates"][0]["matrix"][1] = [0.5, 0.0]
        with pytest.raises(NotUnitary):
            circuits.circuit_from_dict(data)

    def test_disconnected_support(self):
        data = json.loads(single_gate_json())
        data["n"], data["edges"] = 3, [[0, 1], [1, 2]]
        data["gates"][0]["support"] = [0, 2]
        with pytest.raises(ValidationError):
            circuits.circuit_from_dict(data)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            circuits.read_circuit(tmp_path / "missing.json")

    @pytest.mark.parametrize("field,value", [("layer", -1), ("support", [])])
    def test_out_of_range_gate_is_not_a_parse_error(self, field, value):
        data = json.loads(single_gate_json())
        data["gates"][0][field] = value
        with pytest.raises(ValidationError) as info:
            circuits.circuit_from_dict(data)
        assert not isinstance(info.value, ParseError)

    def test_zero_depth_is_not_a_parse_error(self):
        data = json.loads(single_gate_json())
        data["d"] = 0
        with pytest.raises(ValidationError) as info:
            circuits.circuit_from_dict(data)
        assert not isinstance(info.value, ParseError)

    def test_wrong_field_type_is_a_parse_error(self):
        data = json.loads(single_gate_json())
        data["gates"][0]["layer"] = "first"
        with pytest.raises(ParseError):
            circuits.circuit_from_dict(data)


class TestModels:
    def test_graph_rejects_self_loop(self):
        with pytest.raises(ValidationError):
            ConnectivityGraph(num_qubits=2, edges=((1, 1),))

    def test_graph_deduplicates(self):
        g = ConnectivityGraph(num_qubits=3, edges=((1, 0), (0, 1), (2, 1)))
        assert g.edges == ((0, 1), (1, 2))
        assert g.is_connected([0, 2]) is False
        assert g.is_connected([0, 1, 2]) is True

    def test_pauli_angle_reduced(self):
        assert PauliGate(axis=Axis.Z, theta=-np.pi / 2).theta == pytest.approx(3 * np.pi / 2)
        assert PauliGate(axis=Axis.Z, theta=4 * np.pi).theta == pytest.approx(0.0)

    def test_gate_size_must_match_support(self):
        with pytest.raises(ValidationError):
            GateSlot(layer=0, support=(0,), gate=DenseGate(matrix=np.eye(4)))

    def test_layer_beyond_depth(self):
        g = ConnectivityGraph.line(2)
        slot = GateSlot(layer=1, support=(0, 1), gate=DenseGate(matrix=np.eye(4)))
        with pytest.raises(ValidationError):
            BrickworkCircuit(graph=g, k=2, depth=1, slots=(slot,))

    def test_gate_matrix_is_a_copy(self):
        m = haar_unitary(2, 0)
        gate = DenseGate(matrix=m)
        m[0, 0] = 7
        assert gate.matrix[0, 0] != 7

    def test_dense_gate_size_cap(self):
        assert DenseGate(matrix=np.eye(8)).num_qubits == 3
        with pytest.raises(DimensionMismatch):
            DenseGate(matrix=np.eye(16))
        with pytest.raises(DimensionMismatch):
            DenseGate(matrix=np.eye(1))

    def test_four_qubit_dense_gate_rejected_in_json(self):
        data = json.loads(single_gate_json())
        data["n"], data["k"], data["edges"] = 4, 4, [[0, 1], [1, 2], [2, 3]]
        data["gates"][0].update(support=[0, 1, 2, 3], matrix=identity_pairs(16))
        with pytest.raises(DimensionMismatch):
            circuits.circuit_from_dict(data)


class TestGeneration:
    def test_small_line_layout(self):
        c = circuits.random_brickwork(4, 2, 2, "1d-line", seed=7)
        assert c.num_gates == 3
        assert [len(layer) for layer in c.layer_indices()] == [2, 1]

    def test_two_qubits_one_layer(self):
        assert circuits.random_brickwork(2, 1, 2, seed=123).num_gates == 1

    def test_interlaced_line_gate_count(self):
        assert circuits.random_brickwork(8, 4, 2, seed=0).num_gates == 14

    def test_determinism(self):
        assert circuits.random_brickwork(6, 3, 2, "complete", seed=5) == circuits.random_brickwork(6, 3, 2, "complete", seed=5)
        assert circuits.random_brickwork(6, 3, 2, seed=5) != circuits.random_brickwork(6, 3, 2, seed=6)

    def test_gate_count_bound(self):
        for seed in range(5):
            c = circuits.random_brickwork(7, 3, 3, "complete", seed=seed)
            assert c.num_gates * c.k <= c.num_qubits * c.depth

    def test_pauli_kind(self):
        c = circuits.random_brickwork(4, 2, 2, seed=2, gate_kind="pauli", axis=Axis.Y)
        assert all(isinstance(s.gate, PauliGate) and s.gate.axis == Axis.Y for s in c.slots)

    def test_invalid_params(self):
        with pytest.raises(InvalidParams):
            circuits.random_brickwork(1, 2, 2)
        with pytest.raises(InvalidParams):
            circuits.random_brickwork(4, 2, 2, gate_kind="clifford")
        with pytest.raises(InvalidParams):
            circuits.random_brickwork(5, 1, 4)
        assert circuits.random_brickwork(5, 1, 4, gate_kind="pauli").k == 4

    def test_valid_supports(self):
        line = ConnectivityGraph.line(4)
        assert len(circuits.valid_supports(line, 2)) == 6
        assert len(circuits.valid_supports(ConnectivityGraph.complete(4), 2)) == 12
        assert (1, 0) in circuits.valid_supports(line, 2)


class TestEvaluation:
    def test_identity_circuit(self, identity_circuit):
        assert np.allclose(circuits.circuit_unitary(identity_circuit), np.eye(8))

    def test_single_gate_is_itself(self):
        G = haar_unitary(4, 3)
        c = BrickworkCircuit(graph=ConnectivityGraph.line(2), k=2, depth=1,
                             slots=(GateSlot(layer=0, support=(0, 1), gate=DenseGate(matrix=G)),))
        assert np.allclose(circuits.circuit_unitary(c), G)

    def test_reversed_support(self, cnot):
        c = BrickworkCircuit(graph=ConnectivityGraph.line(2), k=2, depth=1,
                             slots=(GateSlot(layer=0, support=(1, 0), gate=DenseGate(matrix=cnot)),))
        swap = np.eye(4)[[0, 2, 1, 3]]
        assert np.allclose(circuits.circuit_unitary(c), swap @ cnot @ swap)

    @pytest.mark.parametrize("geometry", ["1d-line", "complete"])
    def test_matches_brute_force(self, geometry):
        c = circuits.random_brickwork(3, 2, 2, geometry, seed=17)
        U = circuits.circuit_unitary(c)
        assert np.allclose(U, brute_force_unitary(c), atol=1e-10)
        assert unitarity_gap(U) < 1e-10

    def test_complete_graph_brute_force(self):
        c = circuits.random_brickwork(4, 3, 1, "complete", seed=3)
        assert np.allclose(circuits.circuit_unitary(c), brute_force_unitary(c), atol=1e-10)

    def test_apply_circuit(self):
        c = circuits.random_brickwork(4, 3, 2, seed=9)
        psi = np.zeros(16, dtype=complex)
        psi[5] = 1
        assert np.allclose(circuits.apply_circuit(c, psi), circuits.circuit_unitary(c)[:, 5])

    def test_dense_guard(self, monkeypatch):
        monkeypatch.setenv("QPROG_DENSE_MAX_QUBITS", "3")
        from src.core.config import get_settings
        get_settings.cache_clear()
        with pytest.raises(TooLarge):
            circuits.circuit_unitary(circuits.random_brickwork(4, 1, 2, seed=0))

    def test_map_gates(self):
        c = circuits.random_brickwork(4, 2, 2, seed=1)
        eye = DenseGate(matrix=np.eye(4))
        assert np.allclose(circuits.circuit_unitary(circuits.map_gates(c, lambda j, s: eye)), np.eye(16))
