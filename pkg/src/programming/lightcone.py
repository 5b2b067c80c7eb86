#!/usr/bin/env python3
"""
Light-cone decomposition of brickwork circuits and the program-cost trade-off
between programming gates one by one and programming whole light cones.

The circuit is cut into depth blocks of W layers; a gate belongs to the block
of layer // W. In each block the first-layer gates are tried as seeds in index
order. A seed's forward cone is its causal future inside the block: every later
gate touching a qubit the cone already reached. A seed is kept when its forward
cone is disjoint from the cones kept so far, which spaces the forward cones
across the width. Gates no kept cone reaches are past-closed and are grouped
into connected components, the backward cones, which run before the forward
cones of their block. With W = D the whole circuit is one block and each
connected component is a single full-depth cone.
"""

import heapq
import logging
import math
from collections import defaultdict
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..core.config import get_settings
from ..core.errors import InvalidParams, InvalidW, MixedAxes, NumericFailure, TooLarge
from ..quantum.circuit import circuit_unitary
from ..quantum.matrixcore import apply_local, diamond_distance_unitary, operator_norm, pauli_rotation
from ..quantum.models import Axis, BrickworkCircuit, GateSlot, PauliGate
from .models import (
    ConeCost,
    ConeKind,
    ConeStats,
    DecompositionCheck,
    LightCone,
    LightConeDecomposition,
    PhaseGateCheck,
    TradeoffConstants,
    TradeoffReport,
)

logger = logging.getLogger(__name__)


def _make_cone(c: BrickworkCircuit, gates: List[int], kind: ConeKind, block: int) -> LightCone:
    gates = sorted(gates, key=lambda j: (c.slots[j].layer, j))
    layers = [c.slots[j].layer for j in gates]
    support = sorted({q for j in gates for q in c.slots[j].support})
    return LightCone(
        gate_indices=tuple(gates),
        support=tuple(support),
        depth=max(layers) - min(layers) + 1,
        kind=kind,
        block=block,
    )


def _components(c: BrickworkCircuit, gates: List[int]) -> List[List[int]]:
    """Group gates sharing qubits (transitively)"""
    parent = {j: j for j in gates}

    def find(j: int) -> int:
        while parent[j] != j:
            parent[j] = parent[parent[j]]
            j = parent[j]
        return j

    last_on_qubit: Dict[int, int] = {}
    for j in sorted(gates, key=lambda g: (c.slots[g].layer, g)):
        for q in c.slots[j].support:
            if q in last_on_qubit:
                a, b = find(j), find(last_on_qubit[q])
                if a != b:
                    parent[max(a, b)] = min(a, b)
            last_on_qubit[q] = j
    groups: Dict[int, List[int]] = defaultdict(list)
    for j in gates:
        groups[find(j)].append(j)
    return [groups[root] for root in sorted(groups)]


def _forward_cone(c: BrickworkCircuit, gates: List[int], seed: int) -> List[int]:
    """Causal future of `seed` among the layer-ordered `gates`"""
    seed_layer = c.slots[seed].layer
    reach = set(c.slots[seed].support)
    members = [seed]
    for j in gates:
        slot = c.slots[j]
        if slot.layer > seed_layer and reach.intersection(slot.support):
            members.append(j)
            reach.update(slot.support)
    return members


def cone_dependencies(c: BrickworkCircuit, cones: Sequence[LightCone]) -> Dict[int, set]:
    """Edges a -> b when a gate of cone b must run after a gate of cone a"""
    owner = {j: i for i, cone in enumerate(cones) for j in cone.gate_indices}
    edges: Dict[int, set] = defaultdict(set)
    last_on_qubit: Dict[int, int] = {}
    for j in c.gate_order():
        for q in c.slots[j].support:
            if q in last_on_qubit and owner[last_on_qubit[q]] != owner[j]:
                edges[owner[last_on_qubit[q]]].add(owner[j])
            last_on_qubit[q] = j
    return edges


def _execution_order(c: BrickworkCircuit, cones: List[LightCone]) -> List[int]:
    edges = cone_dependencies(c, cones)
    indegree = [0] * len(cones)
    for targets in edges.values():
        for b in targets:
            indegree[b] += 1
    ready = [i for i, deg in enumerate(indegree) if deg == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        i = heapq.heappop(ready)
        order.append(i)
        for b in edges.get(i, ()):
            indegree[b] -= 1
            if indegree[b] == 0:
                heapq.heappush(ready, b)
    if len(order) != len(cones):
        raise NumericFailure("light-cone dependency graph has a cycle")
    return order


def decompose(c: BrickworkCircuit, window: int) -> LightConeDecomposition:
    """Forward cones seeded by the first layer of each W-layer block, backward cones from the rest"""
    if not 1 <= window <= c.depth:
        raise InvalidW(f"window must satisfy 1 <= W <= D={c.depth}, got {window}")

    cones: List[LightCone] = []
    if window == c.depth:
        cones = [_make_cone(c, g, ConeKind.FORWARD, 0) for g in _components(c, c.gate_order())]
    else:
        by_block: Dict[int, List[int]] = defaultdict(list)
        for j in c.gate_order():
            by_block[c.slots[j].layer // window].append(j)
        for block in range(math.ceil(c.depth / window)):
            gates = by_block.get(block, [])
            first_layer = block * window
            taken: set = set()
            forward: List[List[int]] = []
            for seed in gates:
                if c.slots[seed].layer != first_layer:
                    break
                members = _forward_cone(c, gates, seed)
                if taken.isdisjoint(members):
                    forward.append(members)
                    taken.update(members)
            residual = [j for j in gates if j not in taken]
            cones.extend(_make_cone(c, g, ConeKind.BACKWARD, block) for g in _components(c, residual))
            cones.extend(_make_cone(c, m, ConeKind.FORWARD, block) for m in forward)

    order = _execution_order(c, cones)
    logger.debug(f"Decomposed {c.num_gates} gates into {len(cones)} cones (W={window})")
    return LightConeDecomposition(window=window, cones=cones, execution_order=order)


def cone_unitary(c: BrickworkCircuit, cone: LightCone) -> np.ndarray:
    """The light-cone gate on the sorted cone support"""
    local = {q: i for i, q in enumerate(cone.support)}
    width = len(cone.support)
    out = np.eye(2 ** width, dtype=complex)
    for j in cone.gate_indices:
        slot = c.slots[j]
        out = apply_local(slot.matrix(), [local[q] for q in slot.support], out, width)
    return out


def verify_decomposition(c: BrickworkCircuit, dec: LightConeDecomposition, check_unitary: bool = True) -> DecompositionCheck:
    """Partition and ordering checks, and the product of cone unitaries in execution order against the circuit"""
    seen: Dict[int, int] = {}
    disjoint = True
    for i, cone in enumerate(dec.cones):
        for j in cone.gate_indices:
            if j in seen:
                disjoint = False
            seen[j] = i
    covers_all = set(seen) == set(range(c.num_gates))

    order_ok = covers_all
    if covers_all:
        position = {cone_index: p for p, cone_index in enumerate(dec.execution_order)}
        rank = {}
        for i, cone in enumerate(dec.cones):
            for r, j in enumerate(cone.gate_indices):
                rank[j] = (position[i], r)
        last_on_qubit: Dict[int, int] = {}
        for j in c.gate_order():
            for q in c.slots[j].support:
                if q in last_on_qubit and rank[last_on_qubit[q]] > rank[j]:
                    order_ok = False
                last_on_qubit[q] = j

    gap = None
    if check_unitary:
        if c.num_qubits > get_settings().verify_max_qubits:
            raise TooLarge(f"dense replay limited to N <= {get_settings().verify_max_qubits}")
        product = np.eye(2 ** c.num_qubits, dtype=complex)
        for i in dec.execution_order:
            cone = dec.cones[i]
            product = apply_local(cone_unitary(c, cone), cone.support, product, c.num_qubits)
        gap = operator_norm(product - circuit_unitary(c))
    return DecompositionCheck(unitary_gap=gap, disjoint=disjoint, covers_all=covers_all, order_ok=order_ok)


def merge_pauli_cone(slots: Sequence[GateSlot]) -> List[Tuple[Tuple[int, ...], PauliGate]]:
    """Sum the angles of same-axis Pauli rotations per distinct support (mod 2pi)"""
    axes = set()
    for slot in slots:
        if not isinstance(slot.gate, PauliGate):
            raise MixedAxes("only Pauli-rotation gates can be merged")
        axes.add(slot.gate.axis)
    if len(axes) > 1:
        raise MixedAxes(f"gates use several axes: {sorted(a.value for a in axes)}")

    angles: Dict[Tuple[int, ...], float] = {}
    for slot in slots:
        key = tuple(sorted(slot.support))
        angles[key] = angles.get(key, 0.0) + slot.gate.theta
    axis = axes.pop() if axes else Axis.Z
    return [(support, PauliGate(axis=axis, theta=theta)) for support, theta in angles.items()]


def cone_statistics(c: BrickworkCircuit, dec: LightConeDecomposition) -> List[ConeStats]:
    """(T, k_L, m_L) per cone: distinct supports, width and gate count"""
    return [
        ConeStats(
            distinct_supports=len({tuple(sorted(c.slots[j].support)) for j in cone.gate_indices}),
            width=cone.width,
            gates=len(cone.gate_indices),
        )
        for cone in dec.cones
    ]


def structured_tradeoff(
    stats: Sequence[ConeStats],
    num_gates: int,
    k: int,
    num_qubits: int,
    eps: float,
    h: Optional[int] = None,
) -> TradeoffReport:
    """
    sum_j T_j log2(2 pi h T_j / eps) + T_j k_j log2(eN / k_j)
    against ell (log2(2 pi ell / eps) + k log2(eN / k)).
    """
    h = len(stats) if h is None else h
    if h < 1 or not stats:
        raise InvalidParams("need at least one cone")
    if not 0.0 < eps <= 1.0:
        raise InvalidParams(f"epsilon must lie in (0, 1], got {eps}")
    if num_gates < 1 or not 1 <= k <= num_qubits:
        raise InvalidParams(f"need ell >= 1 and 1 <= k <= N (got ell={num_gates}, k={k}, N={num_qubits})")
    if any(s.width > num_qubits for s in stats):
        raise InvalidParams("cone width exceeds N")

    per_cone = []
    for j, s in enumerate(stats):
        bits = s.distinct_supports * math.log2(2 * math.pi * h * s.distinct_supports / eps) + (
            s.distinct_supports * s.width * math.log2(math.e * num_qubits / s.width)
        )
        per_cone.append(ConeCost(cone=j, bits=bits))
    reduced = sum(p.bits for p in per_cone)
    primitive = num_gates * (math.log2(2 * math.pi * num_gates / eps) + k * math.log2(math.e * num_qubits / k))
    return TradeoffReport(
        mode="structured",
        primitive_bits=primitive,
        reduced_bits=reduced,
        reduces_cost=reduced < primitive,
        per_cone=per_cone,
        parameters={"num_qubits": num_qubits, "num_gates": num_gates, "k": k, "h": h, "eps": eps},
    )


def generic_tradeoff(
    num_qubits: int,
    depth: int,
    window: int,
    eps: float,
    constants: Optional[TradeoffConstants] = None,
) -> TradeoffReport:
    """
    c_P   = ND log2 N + ND log2(ND / eps)
    c_P^r = (ND/W) log2(N/W) + 2^(cW) (ND/W^2) log2(ND / (W^2 eps))
    """
    constants = constants or TradeoffConstants()
    if not 1 <= window <= depth:
        raise InvalidParams(f"need 1 <= W <= D (got W={window}, D={depth})")
    if window > num_qubits:
        raise InvalidParams(f"need W <= N (got W={window}, N={num_qubits})")
    if not 0.0 < eps <= 1.0:
        raise InvalidParams(f"epsilon must lie in (0, 1], got {eps}")
    nd = num_qubits * depth
    primitive = constants.primitive * (nd * math.log2(num_qubits) + nd * math.log2(nd / eps))
    reduced = constants.reduced * (
        nd / window * math.log2(num_qubits / window)
        + 2.0 ** (constants.c * window) * nd / window ** 2 * math.log2(nd / (window ** 2 * eps))
    )
    return TradeoffReport(
        mode="generic",
        primitive_bits=primitive,
        reduced_bits=reduced,
        reduces_cost=reduced < primitive,
        parameters={"num_qubits": num_qubits, "depth": depth, "window": window, "eps": eps, "c": constants.c},
    )


def reduction_threshold_eps(num_qubits: int, depth: int, window: int, c: float = 1.0) -> float:
    """eps above which the reduced cost can win: ND / W^(2 / (1 - W^2 / 2^(cW)))"""
    denominator = 1.0 - window ** 2 / 2.0 ** (c * window)
    if denominator <= 0:
        return math.inf
    return num_qubits * depth / window ** (2.0 / denominator)


def generic_sweep(exponents: Sequence[int] = tuple(range(4, 21)), eps: float = 0.1, c: float = 1.0) -> pd.DataFrame:
    """W = D = ceil(log2^2 N) for N = 2^e"""
    rows = []
    for e in exponents:
        n = 2 ** e
        w = math.ceil(math.log2(n) ** 2)
        report = generic_tradeoff(n, w, w, eps, TradeoffConstants(c=c))
        rows.append({
            "num_qubits": n,
            "depth": w,
            "window": w,
            "eps": eps,
            "primitive_bits": report.primitive_bits,
            "reduced_bits": report.reduced_bits,
            "ratio": report.ratio,
        })
    return pd.DataFrame(rows)


def structured_sweep(gate_counts: Sequence[int] = (8, 16, 32, 64, 128, 256), distinct: int = 2,
                     width: int = 4, num_qubits: int = 16, k: int = 2, eps: float = 0.01) -> pd.DataFrame:
    """One cone with fixed T and growing m: the reduced/primitive ratio falls towards 0"""
    rows = []
    for m in gate_counts:
        stats = [ConeStats(distinct_supports=min(distinct, m), width=width, gates=m)]
        report = structured_tradeoff(stats, m, k, num_qubits, eps)
        rows.append({"gates": m, "distinct_supports": distinct, "primitive_bits": report.primitive_bits,
                     "reduced_bits": report.reduced_bits, "ratio": report.ratio})
    return pd.DataFrame(rows)


def angle_net_size(eps: float) -> int:
    return math.ceil(math.pi / eps)


def nearest_angle(theta: float, eps: float) -> Tuple[int, float]:
    """Index and value of the closest point of an eps-net of [0, 2pi) (cell midpoints)"""
    if not eps > 0:
        raise InvalidParams(f"angle resolution must be positive, got {eps}")
    size = angle_net_size(eps)
    step = 2 * math.pi / size
    index = int(math.floor((theta % (2 * math.pi)) / step)) % size
    return index, (index + 0.5) * step


def phase_gate_error(
    theta: float,
    theta_tilde: float,
    axis: str = "Z",
    support: Sequence[int] = (0,),
    num_qubits: Optional[int] = None,
) -> PhaseGateCheck:
    """Half diamond distance between exp(i theta~ P) and exp(i theta P) against |theta~ - theta|"""
    n = num_qubits if num_qubits is not None else max(support) + 1
    target = pauli_rotation(axis, support, theta, n)
    programmed = pauli_rotation(axis, support, theta_tilde, n)
    measured = 0.5 * diamond_distance_unitary(programmed, target)
    bound = abs(theta_tilde - theta)
    if measured > bound + 1e-9:
        raise NumericFailure(f"phase-gate error {measured} exceeds |dtheta| = {bound}")
    return PhaseGateCheck(theta=theta, theta_tilde=theta_tilde, measured=measured, bound=bound, holds=True)
