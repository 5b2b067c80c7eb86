#!/usr/bin/env python3
"""
Parameter sweeps returned as pandas DataFrames and written as CSV.
"""

import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..core.errors import InvalidParams
from ..programming import bounds, lightcone

logger = logging.getLogger(__name__)

SWEEP_KINDS = ("tightness", "generic", "structured", "epsilon", "upper", "lower")


def epsilon_sweep(num_qubits: int, k: int, num_gates: int, kappa: float = 0.5,
                  eps_values: Optional[Sequence[float]] = None) -> pd.DataFrame:
    """Upper and optimized lower bound across a log-spaced epsilon grid"""
    eps_values = np.logspace(-4, np.log10(0.03), 20) if eps_values is None else eps_values
    rows = []
    for eps in eps_values:
        upper = bounds.program_cost_upper(num_qubits, k, num_gates, float(eps))
        varpi, lower = bounds.optimize_lower(num_qubits, float(eps), kappa)
        rows.append({
            "epsilon": float(eps),
            "upper_bits": upper.value_bits,
            "lower_bits": lower.value_bits,
            "varpi": varpi,
            "design_order": lower.inputs.design_order,
            "trivial_lower": lower.value_bits <= 0,
        })
    return pd.DataFrame(rows)


def upper_sweep(num_qubits_values: Sequence[int], k: int, depth: int, eps: float) -> pd.DataFrame:
    """Upper bound for full brickwork circuits, ell = N D / k"""
    rows = []
    for n in num_qubits_values:
        ell = n * depth // k
        report = bounds.program_cost_upper(n, k, ell, eps, depth)
        rows.append({"num_qubits": n, "k": k, "depth": depth, "num_gates": ell, "epsilon": eps,
                     "value_bits": report.value_bits, "valid": report.valid})
    return pd.DataFrame(rows)


def lower_sweep(num_qubits_values: Sequence[int], eps: float, kappa: float,
                varpi: Optional[float] = None) -> pd.DataFrame:
    """Lower bound at fixed varpi, or optimized over varpi when varpi is None"""
    rows = []
    for n in num_qubits_values:
        if varpi is None:
            w, report = bounds.optimize_lower(n, eps, kappa)
        else:
            w, report = varpi, bounds.program_cost_lower(n, eps, varpi, kappa)
        rows.append({"num_qubits": n, "epsilon": eps, "kappa": kappa, "varpi": w,
                     "design_order": report.inputs.design_order, "value_bits": report.value_bits,
                     "trivial": report.value_bits <= 0})
    return pd.DataFrame(rows)


def run_sweep(kind: str, **params) -> pd.DataFrame:
    if kind == "tightness":
        return bounds.tightness_sweep(**params)
    if kind == "generic":
        return lightcone.generic_sweep(**params)
    if kind == "structured":
        return lightcone.structured_sweep(**params)
    if kind == "epsilon":
        return epsilon_sweep(**params)
    if kind == "upper":
        return upper_sweep(**params)
    if kind == "lower":
        return lower_sweep(**params)
    raise InvalidParams(f"unknown sweep {kind!r}; choose from {list(SWEEP_KINDS)}")


def write_csv(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path
