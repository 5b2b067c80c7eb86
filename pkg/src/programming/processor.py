#!/usr/bin/env python3
"""
Epsilon-nets over local unitaries and the postselection processor
C(rho (x) |t><t|) = U_t rho U_t^dag, plus whole-circuit programming.

Grid nets use a ZYZ Euler parametrization Rz(a) Ry(b) Rz(g) with a, g on a
uniform grid of [0, 2pi) and b on cell midpoints of [0, pi]. Rounding every
angle by at most half the pitch h moves the unitary by at most 3h/4 in
operator norm, so pitch h <= 2r/3 covers U(2) within diamond radius r.
Grids come in levels: level L has shape (10, 5, 10) * 3^L, and every level
contains the previous one (tripling keeps b on the midpoints), so a finer net
never loses an element of a coarser one.
Index 0 of every grid net is the identity; grid points follow from index 1.
Elements are generated on demand; nets with 10^8+ elements stay usable.
"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, PrivateAttr
from scipy.linalg import expm

from ..core.config import get_settings
from ..core.errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InvalidEpsilon,
    InvalidParams,
    NoCertifiedNet,
    NumericFailure,
    TooLarge,
)
from ..core.parallel import derive_seed, rng_for
from ..quantum.circuit import circuit_unitary, valid_supports
from ..quantum.matrixcore import (
    apply_unitary,
    as_matrix,
    diamond_distance_unitary,
    diamond_distance_unitary_batch,
    haar_unitaries,
    require_unitary,
)
from ..quantum.models import BrickworkCircuit
from .models import (
    CoverageCertificate,
    GateProgram,
    NetConstruction,
    ProgramState,
    ProgrammedCircuit,
    PropagationReport,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
AUDIT_STREAM = 1 << 62
PROPAGATION_MAX_QUBITS = 8
BASE_SHAPE = (10, 5, 10)
REFINEMENT = 3


def euler_zyz(alpha, beta, gamma) -> np.ndarray:
    """Rz(alpha) Ry(beta) Rz(gamma), vectorized over equal-shape angle arrays"""
    alpha, beta, gamma = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (alpha, beta, gamma)))
    c, s = np.cos(beta / 2), np.sin(beta / 2)
    plus, minus = (alpha + gamma) / 2, (alpha - gamma) / 2
    out = np.empty(alpha.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(-1j * plus) * c
    out[..., 0, 1] = -np.exp(-1j * minus) * s
    out[..., 1, 0] = np.exp(1j * minus) * s
    out[..., 1, 1] = np.exp(1j * plus) * c
    return out


def euler_angles(U: np.ndarray) -> Tuple[float, float, float]:
    """ZYZ angles of U up to global phase; alpha and gamma reduced to [0, 2pi)"""
    U = as_matrix(U)
    V = U / np.sqrt(np.linalg.det(U))
    a, b = V[0, 0], V[1, 0]
    beta = 2.0 * math.atan2(abs(b), abs(a))
    alpha = (np.angle(b) - np.angle(a)) % TWO_PI
    gamma = (-np.angle(a) - np.angle(b)) % TWO_PI
    return float(alpha), float(beta), float(gamma)


class EpsilonNet(BaseModel):
    """Finite set of 2^k x 2^k unitaries meant to cover U(2^k) within target_eps (diamond)"""
    locality: int = Field(..., ge=1)
    target_eps: float = Field(..., gt=0)
    construction: NetConstruction
    size: int = Field(..., ge=1)
    coverage_certificate: CoverageCertificate
    grid_level: Optional[int] = Field(None, ge=0, description="Refinement level of a grid net")

    _shape: Tuple[int, int, int] = PrivateAttr(default=(0, 0, 0))
    _elements: Optional[np.ndarray] = PrivateAttr(default=None)

    @property
    def dim(self) -> int:
        return 2 ** self.locality

    def _grid_angles(self, t: np.ndarray):
        na, nb, ng = self._shape
        ia, rest = np.divmod(t, nb * ng)
        ib, ig = np.divmod(rest, ng)
        return ia * TWO_PI / na, (ib + 0.5) * math.pi / nb, ig * TWO_PI / ng

    def _check_index(self, t: int) -> None:
        if not 0 <= t < self.size:
            raise IndexOutOfRange(f"net index {t} outside [0, {self.size})")

    def element(self, t: int) -> np.ndarray:
        t = int(t)
        self._check_index(t)
        if self.construction == NetConstruction.SAMPLED:
            return np.array(self._elements[t])
        if t == 0:
            return np.eye(2, dtype=complex)
        return euler_zyz(*self._grid_angles(np.int64(t - 1)))

    def elements(self, indices: Optional[Sequence[int]] = None) -> np.ndarray:
        idx = np.arange(self.size) if indices is None else np.asarray(indices, dtype=np.int64)
        if self.construction == NetConstruction.SAMPLED:
            return self._elements[idx]
        out = euler_zyz(*self._grid_angles(np.maximum(idx - 1, 0)))
        out[idx == 0] = np.eye(2, dtype=complex)
        return out

    def nearest(self, U) -> Tuple[int, float]:
        """(index, diamond distance) of the closest element; ties go to the lowest index"""
        U = require_unitary(U)
        if U.shape != (self.dim, self.dim):
            raise DimensionMismatch(f"net holds {self.dim}x{self.dim} unitaries, got {U.shape}")
        if self.construction == NetConstruction.GRID and self.size > get_settings().net_scan_limit:
            candidates = self._lattice_candidates(U)
        else:
            candidates = np.arange(self.size)
        distances = diamond_distance_unitary_batch(self.elements(candidates), U)
        best = np.flatnonzero(distances <= distances.min() + 1e-15)
        pick = int(candidates[best].min())
        return pick, float(distances[best][np.argmin(candidates[best])])

    def lift_index(self, t: int, level: int) -> int:
        """Index in this grid net of element t of the grid at a coarser `level`"""
        if self.grid_level is None or not 0 <= level <= self.grid_level:
            raise InvalidParams(f"cannot lift from level {level} into a net at level {self.grid_level}")
        t = int(t)
        if t == 0:
            return 0
        s = REFINEMENT ** (self.grid_level - level)
        na, nb, ng = self._shape
        ia, rest = divmod(t - 1, (nb // s) * (ng // s))
        ib, ig = divmod(rest, ng // s)
        return 1 + ((ia * s) * nb + ib * s + (s - 1) // 2) * ng + ig * s

    def _lattice_candidates(self, U: np.ndarray) -> np.ndarray:
        na, nb, ng = self._shape
        alpha, beta, gamma = euler_angles(U)
        ca = int(np.rint(alpha * na / TWO_PI))
        cb = int(np.clip(np.floor(beta * nb / math.pi), 0, nb - 1))
        cg = int(np.rint(gamma * ng / TWO_PI))
        out = {0}
        for da in (-1, 0, 1):
            for db in (-1, 0, 1):
                ib = cb + db
                if not 0 <= ib < nb:
                    continue
                for dg in (-1, 0, 1):
                    out.add(1 + (((ca + da) % na) * nb + ib) * ng + (cg + dg) % ng)
        return np.array(sorted(out), dtype=np.int64)


def grid_pitch(level: int) -> float:
    return TWO_PI / (BASE_SHAPE[0] * REFINEMENT ** level)


def grid_level(eps: float) -> int:
    """Coarsest level whose pitch is at most 2 eps / 3"""
    level = 0
    while grid_pitch(level) > 2.0 * eps / 3.0:
        level += 1
    return level


def grid_shape(eps: float) -> Tuple[int, int, int]:
    scale = REFINEMENT ** grid_level(eps)
    return tuple(n * scale for n in BASE_SHAPE)


def audit_net(net: EpsilonNet, samples: np.ndarray) -> CoverageCertificate:
    """Largest distance from any audit unitary to its nearest net element"""
    gaps = [net.nearest(U)[1] for U in samples]
    return CoverageCertificate(
        verified_samples=len(gaps),
        max_observed_gap=float(max(gaps)) if gaps else 0.0,
        certified=net.construction == NetConstruction.GRID,
    )


def audit_samples(k: int, count: int, seed: int) -> np.ndarray:
    return haar_unitaries(2 ** k, derive_seed(seed, AUDIT_STREAM), count)


def _grid_net(eps: float, level: int) -> EpsilonNet:
    scale = REFINEMENT ** level
    shape = tuple(n * scale for n in BASE_SHAPE)
    net = EpsilonNet(
        locality=1,
        target_eps=eps,
        construction=NetConstruction.GRID,
        size=int(np.prod(shape)) + 1,
        coverage_certificate=CoverageCertificate(certified=True),
        grid_level=level,
    )
    net._shape = shape
    return net


def build_net_u2(eps: float, audit: int = 0, seed: int = 0) -> EpsilonNet:
    """Certified grid net over U(2) with diamond radius eps"""
    if not 0.0 < eps <= 1.0:
        raise InvalidEpsilon(f"net radius must lie in (0, 1], got {eps}")
    net = _grid_net(eps, grid_level(eps))
    if audit > 0:
        net.coverage_certificate = audit_net(net, audit_samples(1, audit, seed))
        if net.coverage_certificate.max_observed_gap > eps + 1e-12:
            raise NumericFailure(
                f"grid net radius {eps} violated (observed {net.coverage_certificate.max_observed_gap})"
            )
    logger.info(f"Built grid net: eps={eps}, level={net.grid_level}, shape={net._shape}, size={net.size}")
    return net


def build_net_sampled(k: int, eps: float, budget: int, seed: int, audit: int = 1000) -> EpsilonNet:
    """
    Haar-sampled net of `budget` elements (element i from seed XOR i, so larger
    budgets extend smaller ones). Never certified; the certificate reports the
    empirical gap over a fixed audit set.
    """
    if not 1 <= k <= 2:
        raise InvalidParams(f"sampled nets support k <= 2, got k={k}")
    if budget < 1:
        raise InvalidParams(f"budget must be >= 1, got {budget}")
    if not 0.0 < eps <= 1.0:
        raise InvalidEpsilon(f"net radius must lie in (0, 1], got {eps}")
    net = EpsilonNet(
        locality=k,
        target_eps=eps,
        construction=NetConstruction.SAMPLED,
        size=budget,
        coverage_certificate=CoverageCertificate(certified=False),
    )
    net._elements = haar_unitaries(2 ** k, seed, budget)
    if audit > 0:
        net.coverage_certificate = audit_net(net, audit_samples(k, audit, seed))
    logger.info(
        f"Built sampled net: k={k}, size={budget}, observed gap={net.coverage_certificate.max_observed_gap:.4f}"
    )
    return net


def program_state_for(U, net: EpsilonNet) -> Tuple[int, float]:
    return net.nearest(U)


def apply_processor(rho, program: Union[int, Dict[int, float], np.ndarray], net: EpsilonNet) -> np.ndarray:
    """
    Processor output for a classical program: an index t, a distribution {t: p_t},
    or a density matrix over net indices (only its diagonal is read).
    """
    rho = as_matrix(rho)
    if rho.shape != (net.dim, net.dim):
        raise DimensionMismatch(f"input state must be {net.dim}x{net.dim}, got {rho.shape}")
    if isinstance(program, (int, np.integer)):
        return apply_unitary(rho, net.element(int(program)))
    if isinstance(program, dict):
        weights = program
    else:
        program = as_matrix(program)
        if program.shape != (net.size, net.size):
            raise DimensionMismatch(f"program state must be {net.size}x{net.size}, got {program.shape}")
        diag = np.real(np.diagonal(program))
        weights = {int(t): float(p) for t, p in enumerate(diag) if abs(p) > 0}
    total = sum(weights.values())
    if any(p < -1e-12 for p in weights.values()) or abs(total - 1.0) > 1e-9:
        raise InvalidParams(f"program weights must form a probability distribution (sum {total})")
    out = np.zeros_like(rho)
    for t, p in weights.items():
        out = out + p * apply_unitary(rho, net.element(t))
    return out


def location_table(c: BrickworkCircuit) -> Tuple[List[Tuple[int, ...]], int]:
    """Valid supports Q(k, C) and the location width m = ceil(log2(|Q| D))"""
    supports = valid_supports(c.graph, c.k)
    pairs = len(supports) * c.depth
    return supports, math.ceil(math.log2(pairs)) if pairs > 1 else 0


def encode_location(layer: int, support: Tuple[int, ...], supports: List[Tuple[int, ...]]) -> int:
    return layer * len(supports) + supports.index(tuple(support))


def decode_location(location: int, c: BrickworkCircuit) -> Tuple[int, Tuple[int, ...]]:
    supports, _ = location_table(c)
    layer, index = divmod(int(location), len(supports))
    if not 0 <= layer < c.depth:
        raise IndexOutOfRange(f"location {location} decodes to layer {layer} >= D={c.depth}")
    return layer, supports[index]


def program_circuit(
    c: BrickworkCircuit,
    eps: float,
    net: Optional[EpsilonNet] = None,
    verify: bool = True,
) -> ProgrammedCircuit:
    """
    Program every gate against a net of radius eps / ell. k = 1 builds a grid net;
    k = 2 requires a caller-supplied certified net of small enough radius.
    """
    if not 0.0 < eps <= 1.0:
        raise InvalidEpsilon(f"epsilon must lie in (0, 1], got {eps}")
    ell = c.num_gates
    if ell < 1:
        raise InvalidParams("circuit has no gates to program")
    per_gate = eps / ell

    if net is None:
        if c.k != 1:
            raise NoCertifiedNet(f"no certified net is constructed for k={c.k}; supply one")
        net = build_net_u2(per_gate)
    elif net.locality != c.k:
        raise DimensionMismatch(f"net locality {net.locality} != circuit locality {c.k}")
    elif not net.coverage_certificate.certified or net.target_eps > per_gate + 1e-15:
        raise NoCertifiedNet(
            f"net must be certified with radius <= eps/ell = {per_gate:.3e} "
            f"(certified={net.coverage_certificate.certified}, radius={net.target_eps})"
        )
    if verify and c.num_qubits > get_settings().verify_max_qubits:
        raise TooLarge(f"dense verification limited to N <= {get_settings().verify_max_qubits}")

    supports, m = location_table(c)
    gates = [slot.matrix() for slot in c.slots]
    selections = [(net, net.grid_level, [net.nearest(G) for G in gates])]
    if verify and net.construction == NetConstruction.GRID and net.grid_level:
        coarser = [_grid_net(min(1.0, 1.5 * grid_pitch(level)), level) for level in range(net.grid_level)]
        selections = [(g, g.grid_level, [g.nearest(G) for G in gates]) for g in coarser] + selections

    achieved = None
    notes = []
    picks = selections[-1][2]
    if verify:
        target = circuit_unitary(c)
        scored = [
            diamond_distance_unitary(target, circuit_unitary(c, gates=list(g.elements([t for t, _ in chosen]))))
            for g, _, chosen in selections
        ]
        best = int(np.argmin(scored))
        achieved = scored[best]
        source, level, picks = selections[best]
        if source is not net:
            picks = [(net.lift_index(t, level), gap) for t, gap in picks]
            notes.append(f"program taken from the nested level-{level} grid (whole-circuit error {achieved:.3e})")
    else:
        notes.append("achieved error not evaluated densely")

    records = []
    for j, (slot, (t, gap)) in enumerate(zip(c.slots, picks)):
        location = encode_location(slot.layer, slot.support, supports)
        records.append(
            GateProgram(
                gate_index=j,
                location=location,
                location_bits=format(location, f"0{m}b") if m else "",
                net_index=t,
                gap=gap,
            )
        )
    gap_sum = float(sum(r.gap for r in records))
    if achieved is not None and achieved > min(eps, gap_sum) + 1e-9:
        raise NumericFailure(f"achieved error {achieved} exceeds min(eps, sum of gaps) = {min(eps, gap_sum)}")

    total = ell * (m + math.log2(net.size))
    logger.info(f"Programmed {ell} gates: net size {net.size}, m={m}, cost={total:.2f} bits, error={achieved}")
    return ProgrammedCircuit(
        program=ProgramState(records=records),
        net_size=net.size,
        net_construction=net.construction,
        target_eps=eps,
        per_gate_eps=per_gate,
        location_bits=m,
        total_cost_bits=total,
        achieved_error=achieved,
        gap_sum=gap_sum,
        notes=notes,
    )


def perturbation_within(dim: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    """exp(i s H) for a random Hermitian H, scaled to diamond distance `radius` from I"""
    if radius <= 0:
        return np.eye(dim, dtype=complex)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    H = (g + g.conj().T) / 2
    evals = np.linalg.eigvalsh(H)
    spread = float(evals[-1] - evals[0])
    scale = 2.0 * math.asin(min(radius, 2.0) / 2.0) / spread
    return expm(1j * scale * H)


def verify_error_propagation(c: BrickworkCircuit, per_gate_eps: float, trials: int, seed: int) -> PropagationReport:
    """
    Perturb every gate by diamond distance per_gate_eps and compare the whole
    circuit against ell * per_gate_eps.
    """
    limit = min(PROPAGATION_MAX_QUBITS, get_settings().verify_max_qubits)
    if c.num_qubits > limit:
        raise TooLarge(f"error-propagation check limited to N <= {limit}")
    if not 0.0 <= per_gate_eps <= 2.0:
        raise InvalidParams(f"per-gate radius must lie in [0, 2], got {per_gate_eps}")
    if trials < 1:
        raise InvalidParams(f"trials must be >= 1, got {trials}")
    ell = c.num_gates
    if ell == 0:
        return PropagationReport(max_ratio=0.0, trials=trials, num_gates=0, per_gate_eps=per_gate_eps, worst_whole_distance=0.0)

    reference = circuit_unitary(c)
    gates = [slot.matrix() for slot in c.slots]
    dim = 2 ** c.k
    worst = 0.0
    for trial in range(trials):
        perturbed = []
        for j, G in enumerate(gates):
            E = perturbation_within(dim, per_gate_eps, rng_for(seed, trial * ell + j + 1))
            perturbed.append(G @ E)
        worst = max(worst, diamond_distance_unitary(reference, circuit_unitary(c, gates=perturbed)))
    ratio = worst / (ell * per_gate_eps) if per_gate_eps > 0 else 0.0
    if ratio > 1.0 + 1e-6:
        raise NumericFailure(f"whole-circuit error exceeds ell * per-gate error (ratio {ratio})")
    logger.info(f"Error propagation: {trials} trials, max ratio {ratio:.6f}")
    return PropagationReport(
        max_ratio=ratio,
        trials=trials,
        num_gates=ell,
        per_gate_eps=per_gate_eps,
        worst_whole_distance=worst,
    )
