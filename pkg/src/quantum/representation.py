#!/usr/bin/env python3
"""
Schur-Weyl combinatorics: partitions, irrep dimensions, the program dimension
d_n = C(n + d^2 - 1, d^2 - 1), the binomial lower bound and two-row characters.

Counts are exact Python integers.
"""

import logging
import math
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from ..core.errors import InvalidParams, TooManyParts, UnsupportedRank, ValidationError
from .models import Partition

logger = logging.getLogger(__name__)

RELATIVE_SLACK = 1e-9

PartitionLike = Union[Partition, Sequence[int]]


def _as_partition(lam: PartitionLike) -> Partition:
    return lam if isinstance(lam, Partition) else Partition(parts=tuple(lam))


def partitions(n: int, d: int) -> List[Partition]:
    """All partitions of n into at most d parts, lexicographically descending"""
    if n < 0 or d < 1:
        return []

    def build(remaining: int, largest: int, rows: int) -> List[Tuple[int, ...]]:
        if remaining == 0:
            return [()]
        if rows == 0:
            return []
        out = []
        for first in range(min(remaining, largest), 0, -1):
            for rest in build(remaining - first, first, rows - 1):
                out.append((first,) + rest)
        return out

    return [Partition(parts=p) for p in build(n, n, d)]


def weyl_dimension(lam: PartitionLike, d: int) -> int:
    """dim of the U(d) irrep with highest weight lam: prod_{i<j} (l_i - l_j + j - i) / (j - i)"""
    lam = _as_partition(lam)
    if lam.length > d:
        raise TooManyParts(f"{lam.parts} has more than d={d} parts")
    parts = lam.padded(d)
    numerator = 1
    denominator = 1
    for i in range(d):
        for j in range(i + 1, d):
            numerator *= parts[i] - parts[j] + j - i
            denominator *= j - i
    return numerator // denominator


def program_dimension_dn(n: int, d: int) -> int:
    if n < 0 or d < 1:
        raise InvalidParams(f"need n >= 0 and d >= 1 (got n={n}, d={d})")
    return math.comb(n + d * d - 1, d * d - 1)


def binomial_lb_log(m: int, k: int) -> float:
    """Natural log of (1/(m+k+1)) (1 + k/(m+1))^(m+1) (1 + m/(k+1))^(k+1)"""
    if m < 0 or k < 0:
        raise InvalidParams(f"need m, k >= 0 (got m={m}, k={k})")
    return (
        -math.log(m + k + 1)
        + (m + 1) * math.log1p(k / (m + 1))
        + (k + 1) * math.log1p(m / (k + 1))
    )


def binomial_lb_rhs(m: int, k: int) -> float:
    return math.exp(binomial_lb_log(m, k))


def binomial_holds(m: int, k: int) -> Tuple[bool, float]:
    """(C(m+k, k) >= rhs within relative slack, log margin)"""
    margin = math.log(math.comb(m + k, k)) - binomial_lb_log(m, k)
    return margin >= math.log1p(-RELATIVE_SLACK), margin


def add_box(lam: PartitionLike, d: int) -> List[Partition]:
    """Shapes obtained by adding one box to lam with at most d rows"""
    lam = _as_partition(lam)
    parts = list(lam.parts)
    out = []
    for row in range(min(len(parts) + 1, d)):
        grown = parts + [0] if row == len(parts) else list(parts)
        grown[row] += 1
        if row == 0 or grown[row] <= grown[row - 1]:
            out.append(Partition(parts=tuple(grown)))
    return out


def schur_character(lam: PartitionLike, x, y):
    """
    Two-row Schur polynomial s_lam(x, y) = (xy)^l2 * sum_{i=0..m} x^i y^(m-i), m = l1 - l2.

    x and y are unit-modulus eigenvalues (scalars or equal-shape arrays).
    """
    lam = _as_partition(lam)
    if lam.length > 2:
        raise UnsupportedRank(f"two-row characters only, got {lam.parts}")
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if np.any(np.abs(np.abs(x) - 1) > 1e-9) or np.any(np.abs(np.abs(y) - 1) > 1e-9):
        raise ValidationError("eigenvalues must lie on the unit circle")
    l1, l2 = lam.padded(2)
    m = l1 - l2
    total = sum(x ** i * y ** (m - i) for i in range(m + 1))
    value = (x * y) ** l2 * total
    return complex(value) if value.ndim == 0 else value


def character_of_unitary(lam: PartitionLike, U: np.ndarray):
    """Character of a 2x2 unitary (or a stack of them) in the irrep lam"""
    evals = np.linalg.eigvals(np.asarray(U, dtype=complex))
    evals = evals / np.abs(evals)
    return schur_character(lam, evals[..., 0], evals[..., 1])


def check_cauchy_identity(d_max: int = 4, n_max: int = 8) -> Dict[str, int]:
    """sum_lam dim(W_lam)^2 == d_n for all d <= d_max, n <= n_max"""
    checked = failures = 0
    for d in range(1, d_max + 1):
        for n in range(0, n_max + 1):
            lhs = sum(weyl_dimension(lam, d) ** 2 for lam in partitions(n, d))
            checked += 1
            if lhs != program_dimension_dn(n, d):
                failures += 1
                logger.error(f"Cauchy identity fails at d={d}, n={n}: {lhs} != {program_dimension_dn(n, d)}")
    return {"checked": checked, "failures": failures}


def check_binomial_lower_bound(m_max: int = 200, k_max: int = 200) -> Dict[str, Union[int, float]]:
    checked = failures = 0
    min_margin = math.inf
    for m in range(m_max + 1):
        for k in range(k_max + 1):
            ok, margin = binomial_holds(m, k)
            checked += 1
            min_margin = min(min_margin, margin)
            if not ok:
                failures += 1
                logger.error(f"binomial lower bound fails at m={m}, k={k} (log margin {margin})")
    return {"checked": checked, "failures": failures, "min_log_margin": min_margin}


def check_character_branching(samples: int = 1000, seed: int = 0) -> Dict[str, Union[int, float]]:
    """chi_(1)^2 == chi_(2) + chi_(1,1) on random phase pairs"""
    rng = np.random.default_rng(seed)
    x, y = np.exp(1j * rng.uniform(0, 2 * np.pi, (2, samples)))
    lhs = schur_character((1,), x, y) ** 2
    rhs = schur_character((2,), x, y) + schur_character((1, 1), x, y)
    err = float(np.max(np.abs(lhs - rhs)))
    return {"checked": samples, "failures": int(np.sum(np.abs(lhs - rhs) > 1e-9)), "max_error": err}
