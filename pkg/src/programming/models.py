#!/usr/bin/env python3
"""
Data models for cost reports, programmed circuits and light-cone decompositions
"""

from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, computed_field, model_validator

from ..core.errors import ValidationError


class CostInputs(BaseModel):
    """Parameter echo of a bound evaluation; unused parameters stay None"""
    num_qubits: Optional[int] = Field(None, description="N")
    dimension: Optional[int] = Field(None, description="d")
    locality: Optional[int] = Field(None, description="k")
    num_gates: Optional[int] = Field(None, description="ell")
    depth: Optional[int] = Field(None, description="D")
    epsilon: Optional[float] = None
    varpi: Optional[float] = None
    kappa: Optional[float] = None
    design_order: Optional[int] = Field(None, description="n")


class CostReport(BaseModel):
    """Evaluated program-cost bound in bits (log2 of the program dimension)"""
    bound: str = Field(..., description="Which bound was evaluated")
    value_bits: float
    inputs: CostInputs
    valid: bool = True
    validity_notes: List[str] = Field(default_factory=list)


class GateCostConstants(BaseModel):
    """Multipliers freezing the asymptotic terms of the MO gate-count model"""
    schur_transform: float = Field(1.0, ge=0)
    state_prep: float = Field(1.0, ge=0)
    tensor_generation: float = Field(1.0, ge=0)
    synthesis: float = Field(1.0, ge=0)
    schur_exponent: float = Field(3.0, ge=0, description="Power of n in the Schur-transform term")


class GateCostEstimate(BaseModel):
    """Gate counts of the measure-and-operate programming circuit under a cost model"""
    schur_transform: float = Field(..., ge=0)
    state_prep: float = Field(..., ge=0)
    tensor_generation: float = Field(..., ge=0)
    synthesis: float = Field(..., ge=0)
    constants: GateCostConstants = Field(default_factory=GateCostConstants)
    notes: List[str] = Field(default_factory=list)

    @computed_field
    @property
    def total(self) -> float:
        return self.schur_transform + self.state_prep + self.tensor_generation + self.synthesis


class ErrorBudget(BaseModel):
    """Retrieval error of the MO scheme: eps + zeta/2 + delta/2 + tau"""
    epsilon: float
    zeta: float
    tau: float
    delta: float

    @computed_field
    @property
    def epsilon_mo(self) -> float:
        return self.epsilon + self.zeta / 2 + self.delta / 2 + self.tau


class DesignRow(str, Enum):
    HARROW = "harrow"
    JEONGWAN = "jeongwan"
    METGER_DIAMOND = "metger_diamond"
    METGER_RELATIVE = "metger_relative"
    CHEN = "chen"
    SCHUSTER = "schuster"


class DesignDepth(BaseModel):
    row: DesignRow
    depth: float = Field(..., description="Depth under unit constants")
    valid: bool
    condition: str
    inputs: Dict[str, float] = Field(default_factory=dict)


class MOProcessorEstimate(BaseModel):
    """Copy count, gate complexity and error budget of an MO processor for one target size"""
    num_qubits: int
    epsilon: float
    copies: int
    gate_cost: GateCostEstimate
    budget: ErrorBudget


class NetConstruction(str, Enum):
    GRID = "grid"
    SAMPLED = "sampled"


class CoverageCertificate(BaseModel):
    verified_samples: int = 0
    max_observed_gap: float = 0.0
    certified: bool = Field(..., description="True only when coverage holds by construction")


class GateProgram(BaseModel):
    """Program record of one gate: location bits and net index"""
    gate_index: int
    location: int = Field(..., description="Index of (layer, support) among valid pairs")
    location_bits: str
    net_index: int
    gap: float = Field(..., description="Diamond distance between gate and chosen net element")


class ProgramState(BaseModel):
    records: List[GateProgram] = Field(default_factory=list)


class ProgrammedCircuit(BaseModel):
    program: ProgramState
    net_size: int
    net_construction: NetConstruction
    target_eps: float
    per_gate_eps: float
    location_bits: int = Field(..., description="m")
    total_cost_bits: float
    achieved_error: Optional[float] = Field(None, description="Dense diamond distance, N <= verify guard")
    gap_sum: float = Field(..., description="Sum of per-gate gaps")
    notes: List[str] = Field(default_factory=list)


class PropagationReport(BaseModel):
    max_ratio: float
    trials: int
    num_gates: int
    per_gate_eps: float
    worst_whole_distance: float


class ConeKind(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


class LightCone(BaseModel):
    gate_indices: Tuple[int, ...]
    support: Tuple[int, ...] = Field(..., description="Sorted union of member supports")
    depth: int = Field(..., description="Number of layers spanned")
    kind: ConeKind
    block: int = Field(0, description="Depth block the cone belongs to")

    @property
    def width(self) -> int:
        return len(self.support)


class LightConeDecomposition(BaseModel):
    window: int = Field(..., description="W")
    cones: List[LightCone]
    execution_order: List[int] = Field(..., description="Cone indices in replay order")

    @model_validator(mode="after")
    def _check_order(self):
        if sorted(self.execution_order) != list(range(len(self.cones))):
            raise ValidationError("execution order must be a permutation of the cone indices")
        return self

    @property
    def h(self) -> int:
        return len(self.cones)


class DecompositionCheck(BaseModel):
    unitary_gap: Optional[float] = None
    disjoint: bool
    covers_all: bool
    order_ok: bool

    @computed_field
    @property
    def passed(self) -> bool:
        gap_ok = self.unitary_gap is None or self.unitary_gap <= 1e-9
        return self.disjoint and self.covers_all and self.order_ok and gap_ok


class TradeoffConstants(BaseModel):
    c: float = Field(1.0, gt=0, description="Exponent constant in 2^(cW)")
    primitive: float = Field(1.0, ge=0)
    reduced: float = Field(1.0, ge=0)


class ConeStats(BaseModel):
    """Per-cone parameters of a structured decomposition"""
    distinct_supports: int = Field(..., ge=1, description="T")
    width: int = Field(..., ge=1, description="k_L")
    gates: int = Field(..., ge=1, description="m_L")


class ConeCost(BaseModel):
    cone: int
    bits: float


class TradeoffReport(BaseModel):
    mode: str
    primitive_bits: float = Field(..., ge=0)
    reduced_bits: float = Field(..., ge=0)
    reduces_cost: bool
    per_cone: List[ConeCost] = Field(default_factory=list)
    parameters: Dict[str, float] = Field(default_factory=dict)

    @computed_field
    @property
    def ratio(self) -> float:
        return self.reduced_bits / self.primitive_bits if self.primitive_bits > 0 else float("inf")


class PhaseGateCheck(BaseModel):
    theta: float
    theta_tilde: float
    measured: float = Field(..., description="Half diamond distance")
    bound: float
    holds: bool
