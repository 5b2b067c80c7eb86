#!/usr/bin/env python3
"""
Shared fixtures and an independent brute-force circuit evaluator
"""

import itertools

import numpy as np
import pytest

from src.core.config import get_settings
from src.quantum.models import BrickworkCircuit, ConnectivityGraph, DenseGate, GateSlot


def embed_brute_force(gate: np.ndarray, support, num_qubits: int) -> np.ndarray:
    """Full operator of `gate` on `support` built entry by entry (qubit 0 most significant)"""
    dim = 2 ** num_qubits
    out = np.zeros((dim, dim), dtype=complex)
    rest = [q for q in range(num_qubits) if q not in support]
    for row_bits in itertools.product((0, 1), repeat=num_qubits):
        for col_bits in itertools.product((0, 1), repeat=num_qubits):
            if any(row_bits[q] != col_bits[q] for q in rest):
                continue
            r = int("".join(str(row_bits[q]) for q in support), 2)
            c = int("".join(str(col_bits[q]) for q in support), 2)
            row = int("".join(map(str, row_bits)), 2)
            col = int("".join(map(str, col_bits)), 2)
            out[row, col] = gate[r, c]
    return out


def brute_force_unitary(c: BrickworkCircuit) -> np.ndarray:
    total = np.eye(2 ** c.num_qubits, dtype=complex)
    for j in c.gate_order():
        slot = c.slots[j]
        total = embed_brute_force(slot.matrix(), list(slot.support), c.num_qubits) @ total
    return total


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Every test starts from default settings"""
    for key in ("QPROG_THREADS", "QPROG_DENSE_MAX_QUBITS", "QPROG_VERIFY_MAX_QUBITS",
                "QPROG_NET_SCAN_LIMIT", "QPROG_UNITARY_TOL", "QPROG_LOG_LEVEL"):
        monkeypatch.delenv(key, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def identity_circuit():
    """N=3, D=2 line circuit of identity gates"""
    graph = ConnectivityGraph.line(3)
    eye = DenseGate(matrix=np.eye(4))
    slots = (
        GateSlot(layer=0, support=(0, 1), gate=eye),
        GateSlot(layer=1, support=(1, 2), gate=eye),
    )
    return BrickworkCircuit(graph=graph, k=2, depth=2, slots=slots)


@pytest.fixture
def cnot():
    return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
