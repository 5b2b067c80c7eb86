#!/usr/bin/env python3
"""
Single-qubit Clifford group (24 elements modulo global phase)
"""

import logging
from functools import lru_cache
from typing import Dict, List, Tuple

import numpy as np

logger = logging.getLogger(__name__)

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
PHASE_S = np.array([[1, 0], [0, 1j]], dtype=complex)


def _canonical(U: np.ndarray) -> np.ndarray:
    """Fix the global phase so the first non-negligible entry is real positive"""
    flat = U.reshape(-1)
    lead = flat[np.argmax(np.abs(flat) > 1e-6)]
    return U * (np.conj(lead) / abs(lead))


def _key(U: np.ndarray) -> Tuple[float, ...]:
    c = np.round(_canonical(U), 8) + 0.0
    return tuple(np.concatenate([c.real.reshape(-1), c.imag.reshape(-1)]))


@lru_cache(maxsize=1)
def _group() -> Tuple[np.ndarray, ...]:
    elements: Dict[Tuple[float, ...], np.ndarray] = {}
    frontier = [np.eye(2, dtype=complex)]
    elements[_key(frontier[0])] = _canonical(frontier[0])
    while frontier:
        nxt = []
        for U in frontier:
            for g in (HADAMARD, PHASE_S):
                V = g @ U
                key = _key(V)
                if key not in elements:
                    elements[key] = _canonical(V)
                    nxt.append(V)
        frontier = nxt
    logger.debug(f"Clifford closure produced {len(elements)} elements")
    return tuple(elements.values())


def clifford_group() -> List[np.ndarray]:
    """The 24 single-qubit Cliffords, generated by closure of H and S"""
    return [U.copy() for U in _group()]


def clifford_stack() -> np.ndarray:
    return np.stack(_group())


def trace_moments(unitaries: np.ndarray, t_max: int = 3) -> List[float]:
    """Uniform averages of |Tr U|^(2t) for t = 1..t_max"""
    traces = np.abs(np.trace(np.asarray(unitaries), axis1=-2, axis2=-1)) ** 2
    return [float(np.mean(traces ** t)) for t in range(1, t_max + 1)]


def is_closed(unitaries: List[np.ndarray]) -> bool:
    keys = {_key(U) for U in unitaries}
    return all(_key(A @ B) in keys for A in unitaries for B in unitaries)
