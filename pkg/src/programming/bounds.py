#!/usr/bin/env python3
"""
Closed-form resource bounds: covering numbers, program-cost upper and lower
bounds, the measure-and-operate gate-count model and error budget, and the
circuit depth of approximate unitary designs.

All program costs are in bits. Asymptotic terms are frozen with unit
constants; the constants are multipliers on a model, not certified values.
"""

import logging
import math
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import minimize_scalar

from ..core.errors import InvalidEpsilon, InvalidParams, NumericFailure, PreconditionViolation, UnknownRow
from .models import (
    CostInputs,
    CostReport,
    DesignDepth,
    DesignRow,
    ErrorBudget,
    GateCostConstants,
    GateCostEstimate,
    MOProcessorEstimate,
)

logger = logging.getLogger(__name__)

LOG2E = 1.0 / math.log(2.0)
C0 = 5.0 + 1.0 / (2.0 * math.log(2.0))
MIN_GRID = 16


def _check_eps(eps: float) -> None:
    if not (0.0 < eps <= 1.0) or not math.isfinite(eps):
        raise InvalidEpsilon(f"epsilon must lie in (0, 1], got {eps}")


def _check_circuit_params(num_qubits: int, k: int, num_gates: int) -> None:
    if k < 1 or num_qubits < k:
        raise InvalidParams(f"need N >= k >= 1 (got N={num_qubits}, k={k})")
    if num_gates < 0:
        raise InvalidParams(f"gate count must be >= 0, got {num_gates}")


def covering_log2_unitary(d: int, eps: float) -> float:
    """log2 of (12/eps)^(2 d^2), the covering number of U(d) in diamond distance"""
    _check_eps(eps)
    if d < 1:
        raise InvalidParams(f"dimension must be >= 1, got {d}")
    return 2.0 * d * d * math.log2(12.0 / eps)


def covering_log2_brickwork(num_qubits: int, k: int, num_gates: int, eps: float) -> float:
    """log2 of [(eN/k)^k (12 ell/eps)^(2^(2k+1))]^ell"""
    _check_eps(eps)
    _check_circuit_params(num_qubits, k, num_gates)
    if num_gates == 0:
        return 0.0
    per_gate = k * math.log2(math.e * num_qubits / k) + 2 ** (2 * k + 1) * math.log2(12.0 * num_gates / eps)
    return num_gates * per_gate


def program_cost_upper(num_qubits: int, k: int, num_gates: int, eps: float, depth: Optional[int] = None) -> CostReport:
    """c_P <= k ell log2(eN/k) + 2^(2k+1) ell log2(12 ell / eps)"""
    _check_eps(eps)
    _check_circuit_params(num_qubits, k, num_gates)
    if num_gates == 0:
        value = 0.0
    else:
        value = (
            k * num_gates * math.log2(math.e * num_qubits / k)
            + 2 ** (2 * k + 1) * num_gates * math.log2(12.0 * num_gates / eps)
        )
    covering = covering_log2_brickwork(num_qubits, k, num_gates, eps)
    if abs(value - covering) > 1e-9 * max(1.0, abs(value)):
        raise NumericFailure(f"upper bound {value} disagrees with the covering number {covering}")

    notes = []
    if depth is not None and num_gates * k > num_qubits * depth:
        notes.append(f"ell={num_gates} exceeds N*D/k for D={depth}")
    return CostReport(
        bound="upper",
        value_bits=value,
        inputs=CostInputs(num_qubits=num_qubits, locality=k, num_gates=num_gates, depth=depth, epsilon=eps),
        valid=not notes,
        validity_notes=notes,
    )


def _check_lower(eps: float, varpi: float, kappa: float) -> None:
    if not 0.0 < eps < 1.0 / 32.0:
        raise PreconditionViolation(f"need 0 < eps < 1/32, got eps={eps}")
    varpi_max = 1.0 - 4.0 * math.sqrt(2.0 * eps)
    if not 0.0 < varpi < varpi_max:
        raise PreconditionViolation(f"need 0 < varpi < 1 - 4 sqrt(2 eps) = {varpi_max:.6f}, got varpi={varpi}")
    if not 0.0 < kappa < 1.0:
        raise PreconditionViolation(f"need 0 < kappa < 1, got kappa={kappa}")


def design_order(eps: float, varpi: float, kappa: float) -> int:
    """n = ceil((1 - kappa/2) varpi / (4 sqrt(2 eps)))"""
    return math.ceil((1.0 - kappa / 2.0) * varpi / (4.0 * math.sqrt(2.0 * eps)))


def lower_bound_value(num_qubits: int, eps: float, varpi: float, kappa: float) -> float:
    root = math.sqrt(2.0 * eps)
    shrink = 1.0 - kappa / 2.0
    prefactor = varpi * shrink ** 2 * ((1.0 - varpi) / (4.0 * root) - 1.0)
    log_term = math.log2(4.0 * math.e * root / (shrink * varpi)) + num_qubits
    return prefactor * log_term - C0


def program_cost_lower(num_qubits: int, eps: float, varpi: float, kappa: float) -> CostReport:
    """
    c_P >= varpi (1-kappa/2)^2 ((1-varpi)/(4 sqrt(2 eps)) - 1) log2(4e sqrt(2 eps) 2^N / ((1-kappa/2) varpi)) - c0
    """
    if num_qubits < 1:
        raise InvalidParams(f"N must be >= 1, got {num_qubits}")
    _check_lower(eps, varpi, kappa)
    value = lower_bound_value(num_qubits, eps, varpi, kappa)
    notes = ["kappa = Omega(2^-polylog N) regime assumed, not checked"]
    if value <= 0:
        notes.append("trivial bound")
    return CostReport(
        bound="lower",
        value_bits=value,
        inputs=CostInputs(
            num_qubits=num_qubits,
            epsilon=eps,
            varpi=varpi,
            kappa=kappa,
            design_order=design_order(eps, varpi, kappa),
        ),
        valid=True,
        validity_notes=notes,
    )


def optimize_lower(num_qubits: int, eps: float, kappa: float, grid: int = 256) -> Tuple[float, CostReport]:
    """Maximize the lower bound over varpi: uniform grid, then golden-section search bracketed by the grid neighbours"""
    if grid < MIN_GRID:
        raise InvalidParams(f"grid must have at least {MIN_GRID} points, got {grid}")
    varpi_max = 1.0 - 4.0 * math.sqrt(2.0 * eps) if 0.0 < eps < 1.0 / 32.0 else 0.0
    _check_lower(eps, varpi_max / 2.0, kappa)

    points = varpi_max * np.arange(1, grid + 1) / (grid + 1)
    values = np.array([lower_bound_value(num_qubits, eps, w, kappa) for w in points])
    best = int(np.argmax(values))
    best_varpi, best_value = float(points[best]), float(values[best])

    lo = varpi_max * best / (grid + 1)
    hi = varpi_max * (best + 2) / (grid + 1)

    def objective(w: float) -> float:
        if not 0.0 < w < varpi_max:
            return math.inf
        return -lower_bound_value(num_qubits, eps, w, kappa)

    try:
        refined = minimize_scalar(objective, bracket=(lo, best_varpi, hi), method="golden", options={"xtol": 1e-10})
    except ValueError:
        # flat neighbourhood, no strict bracket
        refined = None
    if refined is not None and refined.success and -refined.fun > best_value:
        best_varpi, best_value = float(refined.x), float(-refined.fun)
    logger.debug(f"optimize_lower N={num_qubits}: varpi*={best_varpi:.6f}, value={best_value:.4f}")
    return best_varpi, program_cost_lower(num_qubits, eps, best_varpi, kappa)


def mo_gate_complexity(
    d: int,
    n: int,
    zeta: float,
    tau: float,
    constants: Optional[GateCostConstants] = None,
) -> GateCostEstimate:
    """
    Gate counts: Schur transform n^a log2 d log2(1/zeta), state preparation n log2 d,
    tensor generation n d^2, synthesis d^2 log2^3(d^2 / tau).
    """
    constants = constants or GateCostConstants()
    if d < 2 or d & (d - 1):
        raise InvalidParams(f"d must be a power of two >= 2, got {d}")
    if n < 1:
        raise InvalidParams(f"n must be >= 1, got {n}")
    if not (0.0 < zeta <= 1.0 and 0.0 < tau <= 1.0):
        raise InvalidParams(f"zeta and tau must lie in (0, 1], got zeta={zeta}, tau={tau}")
    log_d = math.log2(d)
    return GateCostEstimate(
        schur_transform=constants.schur_transform * n ** constants.schur_exponent * log_d * math.log2(1.0 / zeta),
        state_prep=constants.state_prep * n * log_d,
        tensor_generation=constants.tensor_generation * n * d * d,
        synthesis=constants.synthesis * d * d * math.log2(d * d / tau) ** 3,
        constants=constants,
        notes=[f"Schur-transform exponent n^{constants.schur_exponent:g} is a model choice"],
    )


def mo_error_budget(eps: float, zeta: float, tau: float, delta: float) -> ErrorBudget:
    if not 0.0 < eps <= 1.0:
        raise InvalidParams(f"epsilon must lie in (0, 1], got {eps}")
    for name, value in (("zeta", zeta), ("tau", tau), ("delta", delta)):
        if not 0.0 <= value <= 1.0:
            raise InvalidParams(f"{name} must lie in [0, 1], got {value}")
    return ErrorBudget(epsilon=eps, zeta=zeta, tau=tau, delta=delta)


def mo_copy_count(d: int, eps: float) -> int:
    """n ~ d^2 / sqrt(eps) copies, unit constant"""
    _check_eps(eps)
    return math.ceil(d * d / math.sqrt(eps))


def mo_processor_estimate(num_qubits: int, eps: float, constants: Optional[GateCostConstants] = None) -> MOProcessorEstimate:
    """Copy count, gate complexity and error budget with zeta = tau = delta = eps"""
    d = 2 ** num_qubits
    copies = mo_copy_count(d, eps)
    return MOProcessorEstimate(
        num_qubits=num_qubits,
        epsilon=eps,
        copies=copies,
        gate_cost=mo_gate_complexity(d, copies, eps, eps, constants),
        budget=mo_error_budget(eps, eps, eps, eps),
    )


def design_depth_bound(row, num_qubits: int, t: int, rho: float, **extra: float) -> DesignDepth:
    """
    Depth of a rho-approximate unitary t-design under unit constants.

    Extra parameters: `xi` (schuster), `lattice_dim` (harrow) and
    `poly_exponent` (metger rows, poly N = N^a, default 1).
    """
    try:
        row = DesignRow(row)
    except ValueError as e:
        raise UnknownRow(f"unknown design row {row!r}; choose from {[r.value for r in DesignRow]}") from e
    if not 0.0 < rho <= 1.0:
        raise InvalidParams(f"rho must lie in (0, 1], got {rho}")
    if t < 1 or num_qubits < 1:
        raise InvalidParams(f"need t >= 1 and N >= 1 (got t={t}, N={num_qubits})")

    n = num_qubits
    log_rho = math.log2(1.0 / rho)
    log7_t = math.log2(t) ** 7
    a = float(extra.get("poly_exponent", 1.0))

    if row == DesignRow.JEONGWAN:
        depth = (n * t * t + t * log_rho) * math.log2(n) if n > 1 else 0.0
        valid, condition = True, "none"
    elif row == DesignRow.METGER_DIAMOND:
        depth = t * n ** a + t * log_rho
        valid, condition = math.log2(t) <= n / 4.0, "t <= 2^(N/4)"
    elif row == DesignRow.METGER_RELATIVE:
        depth = t * t * n ** a + t * t * log_rho
        valid, condition = math.log2(t) <= n / 4.0, "t <= 2^(N/4)"
    elif row == DesignRow.CHEN:
        depth = (n * t + log_rho) * log7_t
        valid, condition = math.log2(t) <= 2.0 * n / 5.0, "t <= 2^(2N/5)"
    elif row == DesignRow.SCHUSTER:
        if "xi" not in extra:
            raise InvalidParams("the schuster row needs xi >= 1")
        xi = float(extra["xi"])
        if xi < 1:
            raise InvalidParams(f"xi must be >= 1, got {xi}")
        depth = (xi * t + math.log2(n / rho)) * log7_t
        valid, condition = math.log2(t) <= 2.0 * xi / 5.0, "t <= 2^(2 xi/5)"
    else:
        if "lattice_dim" not in extra:
            raise InvalidParams("the harrow row needs lattice_dim >= 1")
        lattice = float(extra["lattice_dim"])
        if lattice < 1:
            raise InvalidParams(f"lattice_dim must be >= 1, got {lattice}")
        depth = (t + log_rho) * n ** (1.0 / lattice)
        valid, condition = True, "connectivity is a lattice of the given dimension (caller-asserted)"

    inputs: Dict[str, float] = {"num_qubits": n, "t": t, "rho": rho}
    inputs.update({key: float(value) for key, value in extra.items()})
    return DesignDepth(row=row, depth=depth, valid=valid, condition=condition, inputs=inputs)


def tightness_point(num_qubits: int, kappa: float = 0.5, k: int = 2, grid: int = 256) -> Dict[str, float]:
    """Lower and upper bound at D = ceil(log2^2 N), ell = N D / 2, eps = 1 / log2^2 N"""
    log_sq = math.log2(num_qubits) ** 2
    depth = math.ceil(log_sq)
    num_gates = num_qubits * depth // k
    eps = 1.0 / log_sq
    varpi, lower = optimize_lower(num_qubits, eps, kappa, grid)
    upper = program_cost_upper(num_qubits, k, num_gates, eps, depth)
    scale = num_qubits * log_sq
    return {
        "num_qubits": num_qubits,
        "depth": depth,
        "num_gates": num_gates,
        "epsilon": eps,
        "kappa": kappa,
        "varpi": varpi,
        "lower_bits": lower.value_bits,
        "upper_bits": upper.value_bits,
        "lower_scaled": lower.value_bits / scale,
        "upper_scaled": upper.value_bits / scale,
        "trivial_lower": lower.value_bits <= 0,
    }


def tightness_sweep(exponents: Sequence[int] = tuple(range(6, 21)), kappa: float = 0.5, grid: int = 256) -> pd.DataFrame:
    rows = [tightness_point(2 ** e, kappa=kappa, grid=grid) for e in exponents]
    return pd.DataFrame(rows)
