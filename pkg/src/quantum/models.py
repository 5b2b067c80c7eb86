#!/usr/bin/env python3
"""
Data models for circuits, ensembles, partitions and measure-and-operate estimates
"""

import math
from collections import defaultdict, deque
from enum import Enum
from typing import Annotated, Dict, Iterable, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

from ..core.errors import DimensionMismatch, NotDensity, NotUnitary, ValidationError
from .matrixcore import as_matrix, pauli_rotation, require_density, unitarity_gap

TWO_PI = 2.0 * math.pi
GATE_UNITARY_TOL = 1e-10
MAX_GATE_QUBITS = 3


class Axis(str, Enum):
    X = "X"
    Y = "Y"
    Z = "Z"


class Geometry(str, Enum):
    LINE = "1d-line"
    COMPLETE = "complete"


def _decode_matrix(value) -> np.ndarray:
    """Accept an ndarray, nested rows of complex, or a flat row-major list of [re, im] pairs"""
    if isinstance(value, np.ndarray):
        return as_matrix(value)
    data = list(value)
    if data and isinstance(data[0], (list, tuple)) and len(data[0]) == 2 and not isinstance(data[0][0], (list, tuple)):
        dim = math.isqrt(len(data))
        if dim * dim != len(data):
            raise DimensionMismatch(f"matrix has {len(data)} entries, not a square count")
        flat = np.array([complex(re, im) for re, im in data], dtype=complex)
        return flat.reshape(dim, dim)
    return as_matrix(data)


class DenseGate(BaseModel):
    """Arbitrary k-qubit unitary gate"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: Literal["dense"] = "dense"
    matrix: np.ndarray = Field(..., description="2^k x 2^k unitary")

    @field_validator("matrix", mode="before")
    @classmethod
    def _check_matrix(cls, value):
        m = np.array(_decode_matrix(value), dtype=complex)
        dim = m.shape[0]
        if m.shape[0] != m.shape[1] or dim & (dim - 1):
            raise DimensionMismatch(f"gate matrix must be 2^k x 2^k, got {m.shape}")
        if not 2 <= dim <= 2 ** MAX_GATE_QUBITS:
            raise DimensionMismatch(f"dense gates act on 1 to {MAX_GATE_QUBITS} qubits, got a {dim}x{dim} matrix")
        gap = unitarity_gap(m)
        if gap > GATE_UNITARY_TOL:
            raise NotUnitary(f"gate matrix is not unitary (gap {gap:.3e})")
        m.setflags(write=False)
        return m

    @field_serializer("matrix")
    def _serialize_matrix(self, m: np.ndarray):
        return [[float(z.real), float(z.imag)] for z in m.reshape(-1)]

    @property
    def num_qubits(self) -> int:
        return int(self.matrix.shape[0]).bit_length() - 1

    def unitary(self, k: Optional[int] = None) -> np.ndarray:
        return np.array(self.matrix)

    def __eq__(self, other) -> bool:
        return isinstance(other, DenseGate) and np.array_equal(self.matrix, other.matrix)


class PauliGate(BaseModel):
    """exp(i theta P(x)...(x)P) on the gate support"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["pauli"] = "pauli"
    axis: Axis
    theta: float = Field(..., description="Rotation angle in radians, reduced to [0, 2pi)")

    @field_validator("theta")
    @classmethod
    def _reduce_theta(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValidationError(f"rotation angle must be finite, got {value}")
        reduced = math.fmod(value, TWO_PI)
        if reduced < 0:
            reduced += TWO_PI
        return 0.0 if reduced >= TWO_PI else reduced

    def unitary(self, k: int = 1) -> np.ndarray:
        return pauli_rotation(self.axis.value, list(range(k)), self.theta, k)


GateSpec = Annotated[Union[DenseGate, PauliGate], Field(discriminator="kind")]


class GateSlot(BaseModel):
    """One gate placed on an ordered support in a given layer"""
    model_config = ConfigDict(frozen=True)

    layer: int = Field(..., ge=0)
    support: Tuple[int, ...] = Field(..., min_length=1)
    gate: GateSpec

    @model_validator(mode="after")
    def _check_slot(self):
        if len(set(self.support)) != len(self.support):
            raise ValidationError(f"support {list(self.support)} repeats a qubit")
        if isinstance(self.gate, DenseGate) and self.gate.num_qubits != len(self.support):
            raise ValidationError(
                f"gate acts on {self.gate.num_qubits} qubits but support has {len(self.support)}"
            )
        return self

    @property
    def k(self) -> int:
        return len(self.support)

    def matrix(self) -> np.ndarray:
        return self.gate.unitary(self.k)


class ConnectivityGraph(BaseModel):
    """Undirected qubit connectivity C = ([N], E)"""
    model_config = ConfigDict(frozen=True)

    num_qubits: int = Field(..., ge=1)
    edges: Tuple[Tuple[int, int], ...] = Field(default=())

    @model_validator(mode="after")
    def _normalize_edges(self):
        seen = set()
        for edge in self.edges:
            if len(edge) != 2:
                raise ValidationError(f"edge {edge} must have two endpoints")
            a, b = int(edge[0]), int(edge[1])
            if a == b:
                raise ValidationError(f"self-loop on qubit {a}")
            if not (0 <= a < self.num_qubits and 0 <= b < self.num_qubits):
                raise ValidationError(f"edge ({a}, {b}) leaves [0, {self.num_qubits})")
            seen.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", tuple(sorted(seen)))
        return self

    @classmethod
    def line(cls, n: int) -> "ConnectivityGraph":
        return cls(num_qubits=n, edges=tuple((i, i + 1) for i in range(n - 1)))

    @classmethod
    def complete(cls, n: int) -> "ConnectivityGraph":
        return cls(num_qubits=n, edges=tuple((i, j) for i in range(n) for j in range(i + 1, n)))

    def adjacency(self) -> Dict[int, set]:
        adj: Dict[int, set] = defaultdict(set)
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def is_connected(self, qubits: Iterable[int]) -> bool:
        """Whether the induced subgraph on `qubits` is connected"""
        nodes = set(qubits)
        if len(nodes) <= 1:
            return True
        adj = self.adjacency()
        start = next(iter(nodes))
        seen = {start}
        queue = deque([start])
        while queue:
            for nb in adj[queue.popleft()] & nodes:
                if nb not in seen:
                    seen.add(nb)
                    queue.append(nb)
        return seen == nodes


class BrickworkCircuit(BaseModel):
    """Layered circuit of k-local gates with disjoint supports per layer"""
    model_config = ConfigDict(frozen=True)

    graph: ConnectivityGraph
    k: int = Field(..., ge=1, description="Gate locality")
    depth: int = Field(..., ge=1, description="Number of layers D")
    slots: Tuple[GateSlot, ...] = Field(default=())

    @model_validator(mode="after")
    def _check_circuit(self):
        n = self.graph.num_qubits
        used: Dict[int, set] = defaultdict(set)
        for j, slot in enumerate(self.slots):
            if slot.k != self.k:
                raise ValidationError(f"gate {j}: locality {slot.k} != k={self.k}")
            if slot.layer >= self.depth:
                raise ValidationError(f"gate {j}: layer {slot.layer} >= depth {self.depth}")
            if any(q >= n for q in slot.support):
                raise ValidationError(f"gate {j}: support {list(slot.support)} leaves [0, {n})")
            if not self.graph.is_connected(slot.support):
                raise ValidationError(f"gate {j}: support {list(slot.support)} is not connected")
            overlap = used[slot.layer] & set(slot.support)
            if overlap:
                raise ValidationError(f"gate {j}: layer {slot.layer} supports overlap on {sorted(overlap)}")
            used[slot.layer].update(slot.support)
        if len(self.slots) * self.k > n * self.depth:
            raise ValidationError(f"gate count {len(self.slots)} exceeds N*D/k")
        return self

    @property
    def num_qubits(self) -> int:
        return self.graph.num_qubits

    @property
    def num_gates(self) -> int:
        return len(self.slots)

    def layer_indices(self) -> List[List[int]]:
        layers: List[List[int]] = [[] for _ in range(self.depth)]
        for j, slot in enumerate(self.slots):
            layers[slot.layer].append(j)
        return layers

    def gate_order(self) -> List[int]:
        """Slot indices sorted by layer, stable within a layer"""
        return sorted(range(len(self.slots)), key=lambda j: self.slots[j].layer)


class EnsembleKind(str, Enum):
    STATES = "states"
    UNITARIES = "unitaries"


class Ensemble(BaseModel):
    """Weighted family of density matrices or unitaries"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    members: List[Tuple[float, np.ndarray]]
    kind: EnsembleKind = EnsembleKind.STATES

    @model_validator(mode="after")
    def _check_members(self):
        weights = np.array([w for w, _ in self.members], dtype=float)
        if len(weights) == 0 or np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
            raise NotDensity("ensemble weights must be non-negative and sum to 1")
        if self.kind == EnsembleKind.STATES:
            for i, (_, rho) in enumerate(self.members):
                require_density(rho, name=f"member {i}")
        return self


class Partition(BaseModel):
    """Young diagram shape with non-increasing parts; trailing zeros are dropped"""
    model_config = ConfigDict(frozen=True)

    parts: Tuple[int, ...] = ()

    @field_validator("parts", mode="before")
    @classmethod
    def _normalize(cls, value):
        parts = tuple(int(p) for p in value)
        if any(p < 0 for p in parts):
            raise ValidationError(f"negative part in {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValidationError(f"parts {parts} are not non-increasing")
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        return parts

    @classmethod
    def of(cls, *parts: int) -> "Partition":
        return cls(parts=parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def padded(self, d: int) -> Tuple[int, ...]:
        return self.parts + (0,) * (d - len(self.parts))

    def __hash__(self) -> int:
        return hash(self.parts)

    def __repr__(self) -> str:
        return f"Partition{self.parts}"


class UnitaryEnsemble(str, Enum):
    HAAR = "haar"
    CLIFFORD = "clifford"


class ProbeConfig(BaseModel):
    """Probe for n copies of a qubit unitary: weights q over the irreps lambda |- n"""
    n: int = Field(1, description="Number of copies (1 or 2)")
    d: Literal[2] = 2
    q_weights: Dict[Tuple[int, ...], float] = Field(default_factory=dict)

    @field_validator("q_weights", mode="before")
    @classmethod
    def _keys_to_tuples(cls, value):
        if isinstance(value, dict):
            return {tuple(int(p) for p in (k if isinstance(k, (list, tuple)) else str(k).split(","))): float(v)
                    for k, v in value.items()}
        return value

    @model_validator(mode="after")
    def _check_weights(self):
        from ..core.errors import UnsupportedN

        if self.n not in (1, 2):
            raise UnsupportedN(f"only n in {{1, 2}} copies are supported, got {self.n}")
        allowed = [(1,)] if self.n == 1 else [(2,), (1, 1)]
        if not self.q_weights:
            object.__setattr__(self, "q_weights", {lam: 1.0 / len(allowed) for lam in allowed})
        if self.n == 1 and set(self.q_weights) != {(1,)}:
            raise ValidationError("for n=1 the probe is supported on lambda=(1) only")
        for lam, w in self.q_weights.items():
            if lam not in allowed:
                raise ValidationError(f"partition {lam} is not a shape of {self.n} boxes in 2 rows")
            if w < 0:
                raise ValidationError(f"negative weight {w} for {lam}")
        total = sum(self.q_weights.values())
        if abs(total - 1.0) > 1e-12:
            raise ValidationError(f"probe weights sum to {total}, not 1")
        return self

    def shapes(self) -> List[Tuple[int, ...]]:
        return sorted(self.q_weights, reverse=True)


class MOEstimate(BaseModel):
    """Monte-Carlo estimate of the measure-and-operate channel"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    p_hat: float = Field(..., description="Estimated depolarizing mixing coefficient")
    stderr: float = Field(..., description="Jackknife standard error of p_hat")
    samples: int
    ensemble: UnitaryEnsemble
    p_exact_channel: Optional[float] = Field(None, description="p fitted from the Choi estimate")
    choi_hat: Optional[np.ndarray] = Field(None, description="Estimated Choi matrix (trace d)")
    choi_stderr: Optional[np.ndarray] = Field(None, description="Entrywise jackknife error of choi_hat")
    fit_residual: Optional[float] = Field(None, description="Trace-norm residual against the p-model")
    fit_tolerance: Optional[float] = None

    @field_serializer("choi_hat", "choi_stderr")
    def _serialize_choi(self, m: Optional[np.ndarray]):
        if m is None:
            return None
        return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


class ZetaCheck(BaseModel):
    """Channel deviation caused by perturbing the reference state psi_0"""
    zeta: float
    perturbation: float = Field(..., description="Fraction of the allowed trace distance zeta/2 actually used")
    deviation: float = Field(..., description="Half trace-norm distance of the normalized Choi matrices")
    bound: float
    tolerance: float = Field(..., description="Monte-Carlo tolerance (3 jackknife standard errors)")
    slack: float = Field(..., description="bound + tolerance - deviation")
    holds: bool


class CovarianceCheck(BaseModel):
    """p estimated for two different target unitaries"""
    p_a: float
    p_b: float
    difference: float
    combined_stderr: float
    holds: bool
