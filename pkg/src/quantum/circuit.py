#!/usr/bin/env python3
"""
Brickwork circuits: JSON codec, random generation and dense evaluation.

Qubit 0 is the most significant tensor factor. Gate matrices act on their
support in the listed order.
"""

import json
import logging
import math
from itertools import permutations
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError as PydanticValidationError

from ..core.config import get_settings
from ..core.errors import InvalidParams, ParseError, TooLarge, ValidationError
from ..core.parallel import derive_seed
from .matrixcore import apply_local, haar_unitary
from .models import (
    MAX_GATE_QUBITS,
    Axis,
    BrickworkCircuit,
    ConnectivityGraph,
    DenseGate,
    GateSlot,
    Geometry,
    PauliGate,
)

logger = logging.getLogger(__name__)

# pydantic error types raised by field constraints on well-formed input
CONSTRAINT_ERRORS = frozenset({
    "greater_than",
    "greater_than_equal",
    "less_than",
    "less_than_equal",
    "too_short",
    "too_long",
    "value_error",
    "assertion_error",
})


def circuit_to_dict(c: BrickworkCircuit) -> dict:
    gates = []
    for slot in c.slots:
        entry = {"layer": slot.layer, "support": list(slot.support)}
        entry.update(slot.gate.model_dump(mode="json"))
        gates.append(entry)
    return {
        "n": c.num_qubits,
        "k": c.k,
        "d": c.depth,
        "edges": [list(e) for e in c.graph.edges],
        "gates": gates,
    }


def serialize_circuit(c: BrickworkCircuit) -> str:
    return json.dumps(circuit_to_dict(c))


def circuit_from_dict(data: dict) -> BrickworkCircuit:
    if not isinstance(data, dict):
        raise ParseError("circuit JSON must be an object")
    try:
        graph = ConnectivityGraph(num_qubits=data["n"], edges=[tuple(e) for e in data.get("edges", [])])
        slots = []
        for g in data.get("gates", []):
            gate = {key: value for key, value in g.items() if key not in ("layer", "support")}
            slots.append(GateSlot(layer=g["layer"], support=tuple(g["support"]), gate=gate))
        return BrickworkCircuit(graph=graph, k=data["k"], depth=data["d"], slots=tuple(slots))
    except KeyError as e:
        raise ParseError(f"missing field {e}") from e
    except (TypeError, AttributeError) as e:
        raise ParseError(f"malformed circuit JSON: {e}") from e
    except PydanticValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        if all(err["type"] in CONSTRAINT_ERRORS for err in e.errors()):
            raise ValidationError(f"circuit violates a constraint at {location or 'circuit'}: {first['msg']}") from e
        raise ParseError(f"circuit JSON does not match the schema: {first['msg']}") from e


def parse_circuit(text: str) -> BrickworkCircuit:
    """Parse circuit JSON; ParseError on malformed input, ValidationError on invariant failure"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from e
    return circuit_from_dict(data)


def read_circuit(path: Union[str, Path]) -> BrickworkCircuit:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ParseError(f"cannot read circuit file {path}: {e}") from e
    circuit = parse_circuit(text)
    logger.info(f"Loaded circuit from {path}: N={circuit.num_qubits}, D={circuit.depth}, gates={circuit.num_gates}")
    return circuit


def write_circuit(c: BrickworkCircuit, path: Union[str, Path]) -> None:
    Path(path).write_text(serialize_circuit(c))


def brick_layout(num_qubits: int, depth: int, k: int, geometry: Geometry, seed: int = 0) -> List[Tuple[int, Tuple[int, ...]]]:
    """(layer, support) pairs of an interlaced brick pattern"""
    layout = []
    if Geometry(geometry) == Geometry.LINE:
        for r in range(depth):
            start = (r % 2) * (k // 2)
            while start + k <= num_qubits:
                layout.append((r, tuple(range(start, start + k))))
                start += k
    else:
        rng = np.random.default_rng(int(seed) & ((1 << 64) - 1))
        for r in range(depth):
            order = rng.permutation(num_qubits)
            for i in range(num_qubits // k):
                layout.append((r, tuple(int(q) for q in order[i * k:(i + 1) * k])))
    return layout


def random_brickwork(
    num_qubits: int,
    depth: int,
    k: int,
    geometry: Union[Geometry, str] = Geometry.LINE,
    seed: int = 0,
    gate_kind: str = "haar",
    axis: Union[Axis, str] = Axis.Z,
) -> BrickworkCircuit:
    """
    Random brickwork circuit. Gate j draws from seed XOR (j + 1); the complete-graph
    layout draws its permutations from the seed itself.
    """
    if k < 1 or num_qubits < k or depth < 1:
        raise InvalidParams(f"need 1 <= k <= N and D >= 1 (got N={num_qubits}, D={depth}, k={k})")
    if gate_kind not in ("haar", "pauli"):
        raise InvalidParams(f"unknown gate kind {gate_kind!r}")
    if gate_kind == "haar" and k > MAX_GATE_QUBITS:
        raise InvalidParams(f"dense gates act on at most {MAX_GATE_QUBITS} qubits (got k={k})")
    geometry = Geometry(geometry)
    graph = ConnectivityGraph.line(num_qubits) if geometry == Geometry.LINE else ConnectivityGraph.complete(num_qubits)

    slots = []
    for j, (layer, support) in enumerate(brick_layout(num_qubits, depth, k, geometry, seed)):
        gate_seed = derive_seed(seed, j + 1)
        if gate_kind == "haar":
            gate = DenseGate(matrix=haar_unitary(2 ** k, gate_seed))
        else:
            theta = float(np.random.default_rng(gate_seed).uniform(0.0, 2 * math.pi))
            gate = PauliGate(axis=Axis(axis), theta=theta)
        slots.append(GateSlot(layer=layer, support=support, gate=gate))

    circuit = BrickworkCircuit(graph=graph, k=k, depth=depth, slots=tuple(slots))
    logger.debug(f"Generated {geometry.value} brickwork: N={num_qubits}, D={depth}, k={k}, gates={len(slots)}")
    return circuit


def map_gates(c: BrickworkCircuit, fn: Callable[[int, GateSlot], Union[DenseGate, PauliGate]]) -> BrickworkCircuit:
    """Copy of c with gate j replaced by fn(j, slot)"""
    slots = tuple(
        GateSlot(layer=slot.layer, support=slot.support, gate=fn(j, slot)) for j, slot in enumerate(c.slots)
    )
    return BrickworkCircuit(graph=c.graph, k=c.k, depth=c.depth, slots=slots)


def valid_supports(graph: ConnectivityGraph, k: int) -> List[Tuple[int, ...]]:
    """Ordered k-tuples of distinct qubits whose induced subgraph is connected"""
    return [q for q in permutations(range(graph.num_qubits), k) if graph.is_connected(q)]


def _guard(num_qubits: int, limit: Optional[int] = None) -> None:
    limit = get_settings().dense_max_qubits if limit is None else limit
    if num_qubits > limit:
        raise TooLarge(f"dense evaluation limited to N <= {limit}, got N={num_qubits}")


def apply_slots(
    c: BrickworkCircuit,
    indices: Sequence[int],
    matrix: np.ndarray,
    gates: Optional[Sequence[np.ndarray]] = None,
) -> np.ndarray:
    """Apply the listed slots, in order, to the rows of a 2^N x M matrix"""
    n = c.num_qubits
    for j in indices:
        op = gates[j] if gates is not None else c.slots[j].matrix()
        matrix = apply_local(op, c.slots[j].support, matrix, n)
    return matrix


def circuit_unitary(c: BrickworkCircuit, gates: Optional[Sequence[np.ndarray]] = None) -> np.ndarray:
    """Product of all gates, layers applied in ascending order"""
    _guard(c.num_qubits)
    identity = np.eye(2 ** c.num_qubits, dtype=complex)
    return apply_slots(c, c.gate_order(), identity, gates)


def apply_circuit(c: BrickworkCircuit, state: np.ndarray) -> np.ndarray:
    _guard(c.num_qubits)
    vec = np.asarray(state, dtype=complex).reshape(-1, 1)
    return apply_slots(c, c.gate_order(), vec).reshape(-1)
