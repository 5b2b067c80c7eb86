#!/usr/bin/env python3
"""Single-qubit Clifford group and its design moments"""

import numpy as np
import pytest

from src.quantum.clifford import HADAMARD, PHASE_S, clifford_group, clifford_stack, is_closed, trace_moments
from src.quantum.matrixcore import unitarity_gap


def test_group_size_and_closure():
    group = clifford_group()
    assert len(group) == 24
    assert is_closed(group)
    assert all(unitarity_gap(U) < 1e-12 for U in group)


def test_contains_generators_up_to_phase():
    group = clifford_group()
    for g in (HADAMARD, PHASE_S, np.eye(2)):
        assert any(abs(abs(np.trace(U.conj().T @ g)) - 2) < 1e-9 for U in group)


def test_exact_three_design_moments():
    moments = trace_moments(clifford_stack(), t_max=4)
    assert moments[:3] == pytest.approx([1.0, 2.0, 5.0], abs=1e-12)
    # the fourth moment is 14 for Haar; the Clifford group is not a 4-design
    assert moments[3] != pytest.approx(14.0, abs=1e-6)


def test_returned_copies_are_independent():
    first = clifford_group()
    first[0][0, 0] = 42
    assert clifford_group()[0][0, 0] != 42
