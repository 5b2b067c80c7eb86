#!/usr/bin/env python3
"""Epsilon-nets, the postselection processor and whole-circuit programming"""

import math

import numpy as np
import pytest

from src.core.errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InvalidEpsilon,
    InvalidParams,
    NoCertifiedNet,
    TooLarge,
)
from src.programming import processor
from src.programming.models import NetConstruction
from src.quantum.circuit import random_brickwork
from src.quantum.matrixcore import (
    apply_unitary,
    diamond_distance_unitary,
    haar_unitary,
    random_density,
)
from src.quantum.models import BrickworkCircuit, ConnectivityGraph, DenseGate, GateSlot


@pytest.fixture(scope="module")
def unit_net():
    return processor.build_net_u2(1.0)


@pytest.fixture
def single_qubit_identities():
    """N=2, k=1, D=2 circuit whose gates are all identities"""
    eye = DenseGate(matrix=np.eye(2))
    slots = tuple(GateSlot(layer=r, support=(q,), gate=eye) for r in range(2) for q in range(2))
    return BrickworkCircuit(graph=ConnectivityGraph.line(2), k=1, depth=2, slots=slots)


class TestEuler:
    def test_angles_reproduce_unitary_up_to_phase(self):
        for seed in range(5):
            U = haar_unitary(2, seed)
            V = processor.euler_zyz(*processor.euler_angles(U))
            assert diamond_distance_unitary(U, V) < 1e-9

    def test_vectorized_shape(self):
        out = processor.euler_zyz(np.zeros(3), np.linspace(0, 1, 3), np.ones(3))
        assert out.shape == (3, 2, 2)


class TestGridNet:
    def test_size_at_unit_radius(self, unit_net):
        assert processor.grid_shape(1.0) == (10, 5, 10)
        assert unit_net.size == 501
        assert unit_net.coverage_certificate.certified

    def test_index_zero_is_identity(self, unit_net):
        assert np.allclose(unit_net.element(0), np.eye(2))
        index, gap = unit_net.nearest(np.eye(2))
        assert index == 0
        assert gap == pytest.approx(0.0, abs=1e-12)

    def test_nearest_returns_own_index(self, unit_net):
        for t in (1, 17, 250, 500):
            index, gap = unit_net.nearest(unit_net.element(t))
            assert index == t
            assert gap == pytest.approx(0.0, abs=1e-9)

    def test_nearest_ignores_global_phase(self, unit_net):
        U = haar_unitary(2, 11)
        assert unit_net.nearest(U)[0] == unit_net.nearest(np.exp(0.7j) * U)[0]

    def test_random_unitaries_covered(self):
        net = processor.build_net_u2(0.2)
        for seed in range(20):
            _, gap = net.nearest(haar_unitary(2, seed))
            assert gap <= 0.2 + 1e-12

    def test_lattice_search_matches_scan(self, monkeypatch, unit_net):
        scanned = [unit_net.nearest(haar_unitary(2, s)) for s in range(10)]
        monkeypatch.setenv("QPROG_NET_SCAN_LIMIT", "1")
        from src.core.config import get_settings

        get_settings.cache_clear()
        searched = [unit_net.nearest(haar_unitary(2, s)) for s in range(10)]
        for (_, a), (_, b) in zip(scanned, searched):
            assert b <= 1.0 + 1e-12
            assert b >= a - 1e-12

    def test_audit_within_radius(self):
        net = processor.build_net_u2(0.5, audit=200, seed=3)
        assert net.coverage_certificate.verified_samples == 200
        assert net.coverage_certificate.max_observed_gap <= 0.5

    def test_elements_batch_matches_single(self, unit_net):
        batch = unit_net.elements([0, 3, 499])
        for row, t in zip(batch, (0, 3, 499)):
            assert np.allclose(row, unit_net.element(t))

    def test_levels_refine_by_three(self):
        assert processor.grid_level(1.0) == 0
        assert processor.grid_shape(0.5) == (30, 15, 30)
        assert processor.build_net_u2(0.5).grid_level == 1
        assert processor.grid_level(0.2) == 2

    def test_finer_level_contains_coarser(self, unit_net):
        fine = processor.build_net_u2(0.5)
        for t in (0, 1, 17, 250, 500):
            assert np.allclose(fine.element(fine.lift_index(t, 0)), unit_net.element(t), atol=1e-12)

    def test_finer_level_never_farther(self, unit_net):
        fine = processor.build_net_u2(0.5)
        for seed in range(10):
            U = haar_unitary(2, 300 + seed)
            assert fine.nearest(U)[1] <= unit_net.nearest(U)[1] + 1e-12

    def test_lift_needs_coarser_level(self, unit_net):
        with pytest.raises(InvalidParams):
            unit_net.lift_index(3, 1)

    @pytest.mark.parametrize("eps", [0.0, -0.1, 1.5])
    def test_bad_radius(self, eps):
        with pytest.raises(InvalidEpsilon):
            processor.build_net_u2(eps)

    def test_index_out_of_range(self, unit_net):
        with pytest.raises(IndexOutOfRange):
            unit_net.element(unit_net.size)

    def test_dimension_checked(self, unit_net):
        with pytest.raises(DimensionMismatch):
            unit_net.nearest(np.eye(4))


class TestSampledNet:
    def test_never_certified(self):
        net = processor.build_net_sampled(1, 0.5, budget=64, seed=1, audit=50)
        assert net.construction == NetConstruction.SAMPLED
        assert not net.coverage_certificate.certified
        assert net.coverage_certificate.verified_samples == 50

    def test_single_element_leaves_large_gap(self):
        net = processor.build_net_sampled(1, 0.5, budget=1, seed=2, audit=200)
        assert net.coverage_certificate.max_observed_gap > 1.5

    def test_own_elements_audit_to_zero(self):
        net = processor.build_net_sampled(2, 0.5, budget=16, seed=5, audit=0)
        certificate = processor.audit_net(net, net.elements())
        assert certificate.max_observed_gap == pytest.approx(0.0, abs=1e-9)

    def test_larger_budget_extends_smaller(self):
        small = processor.build_net_sampled(1, 0.5, budget=8, seed=9, audit=0)
        large = processor.build_net_sampled(1, 0.5, budget=32, seed=9, audit=0)
        assert np.allclose(small.elements(), large.elements(range(8)))

    def test_rejects_three_qubit_gates(self):
        with pytest.raises(InvalidParams):
            processor.build_net_sampled(3, 0.5, budget=4, seed=0)


class TestProcessor:
    def test_index_program_applies_element(self, unit_net):
        rho = random_density(2, 4)
        out = processor.apply_processor(rho, 42, unit_net)
        assert np.allclose(out, apply_unitary(rho, unit_net.element(42)))

    def test_identity_element_leaves_state_unchanged(self):
        net = processor.build_net_sampled(1, 0.5, budget=8, seed=6, audit=0)
        net._elements[3] = np.eye(2)
        rho = random_density(2, 7)
        index, gap = processor.program_state_for(np.eye(2), net)
        assert index == 3
        assert gap == pytest.approx(0.0, abs=1e-12)
        assert np.allclose(processor.apply_processor(rho, index, net), rho)

    def test_mixed_program_is_convex_combination(self, unit_net):
        rho = random_density(2, 8)
        out = processor.apply_processor(rho, {1: 0.25, 9: 0.75}, unit_net)
        expected = 0.25 * apply_unitary(rho, unit_net.element(1)) + 0.75 * apply_unitary(rho, unit_net.element(9))
        assert np.allclose(out, expected)
        assert np.trace(out).real == pytest.approx(1.0)

    def test_density_program_reads_diagonal(self):
        net = processor.build_net_sampled(1, 0.5, budget=4, seed=3, audit=0)
        program = np.diag([0.5, 0.0, 0.5, 0.0]).astype(complex)
        program[0, 2] = program[2, 0] = 0.3
        rho = random_density(2, 1)
        expected = processor.apply_processor(rho, {0: 0.5, 2: 0.5}, net)
        assert np.allclose(processor.apply_processor(rho, program, net), expected)

    def test_weights_must_sum_to_one(self, unit_net):
        with pytest.raises(InvalidParams):
            processor.apply_processor(np.eye(2) / 2, {0: 0.5}, unit_net)


class TestLocations:
    def test_round_trip(self):
        c = random_brickwork(4, 3, 2, seed=1)
        supports, m = processor.location_table(c)
        assert m == math.ceil(math.log2(len(supports) * 3))
        for slot in c.slots:
            location = processor.encode_location(slot.layer, slot.support, supports)
            assert processor.decode_location(location, c) == (slot.layer, slot.support)

    def test_decode_rejects_layer_past_depth(self):
        c = random_brickwork(4, 2, 2, seed=1)
        supports, _ = processor.location_table(c)
        with pytest.raises(IndexOutOfRange):
            processor.decode_location(len(supports) * 2, c)


class TestProgramCircuit:
    def test_single_gate(self):
        c = random_brickwork(1, 1, 1, seed=3)
        result = processor.program_circuit(c, 0.3)
        assert result.location_bits == 0
        assert result.per_gate_eps == pytest.approx(0.3)
        assert result.total_cost_bits == pytest.approx(math.log2(result.net_size))
        assert result.achieved_error <= 0.3

    def test_random_circuit_within_budget(self):
        c = random_brickwork(6, 4, 1, seed=12)
        result = processor.program_circuit(c, 0.5)
        assert len(result.program.records) == c.num_gates
        assert result.achieved_error <= 0.5
        assert result.achieved_error <= result.gap_sum + 1e-9
        assert all(len(r.location_bits) == result.location_bits for r in result.program.records)

    def test_identity_circuit_is_exact(self, single_qubit_identities):
        result = processor.program_circuit(single_qubit_identities, 0.5)
        assert all(r.net_index == 0 for r in result.program.records)
        assert result.achieved_error == pytest.approx(0.0, abs=1e-12)
        assert result.gap_sum == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("seed", range(6))
    def test_error_never_grows_as_epsilon_shrinks(self, seed):
        c = random_brickwork(3, 2, 1, seed=seed)
        errors = [processor.program_circuit(c, eps).achieved_error for eps in (1.0, 0.7, 0.5, 0.3, 0.2)]
        for coarse, fine in zip(errors, errors[1:]):
            assert fine <= coarse + 1e-12

    def test_records_index_the_final_net(self):
        c = random_brickwork(3, 2, 1, seed=0)
        result = processor.program_circuit(c, 0.5)
        net = processor.build_net_u2(result.per_gate_eps)
        assert result.net_size == net.size
        for record, slot in zip(result.program.records, c.slots):
            gap = diamond_distance_unitary(net.element(record.net_index), slot.matrix())
            assert gap == pytest.approx(record.gap, abs=1e-9)

    def test_skipping_verification(self):
        c = random_brickwork(3, 2, 1, seed=2)
        result = processor.program_circuit(c, 0.5, verify=False)
        assert result.achieved_error is None
        assert result.notes

    def test_epsilon_above_one(self):
        with pytest.raises(InvalidEpsilon):
            processor.program_circuit(random_brickwork(2, 1, 1, seed=0), 2.0)

    def test_two_qubit_gates_need_certified_net(self):
        c = random_brickwork(4, 2, 2, seed=0)
        with pytest.raises(NoCertifiedNet):
            processor.program_circuit(c, 0.5)
        sampled = processor.build_net_sampled(2, 0.5, budget=16, seed=0, audit=0)
        with pytest.raises(NoCertifiedNet):
            processor.program_circuit(c, 0.5, net=sampled)

    def test_coarse_supplied_net_rejected(self, unit_net):
        c = random_brickwork(2, 2, 1, seed=0)
        with pytest.raises(NoCertifiedNet):
            processor.program_circuit(c, 0.5, net=unit_net)


class TestErrorPropagation:
    def test_zero_perturbation(self):
        report = processor.verify_error_propagation(random_brickwork(3, 2, 2, seed=1), 0.0, trials=2, seed=0)
        assert report.max_ratio == 0.0

    def test_perturbation_radius(self):
        rng = np.random.default_rng(0)
        E = processor.perturbation_within(4, 0.3, rng)
        assert diamond_distance_unitary(E, np.eye(4)) == pytest.approx(0.3, abs=1e-9)

    def test_single_gate_ratio_at_most_one(self):
        report = processor.verify_error_propagation(random_brickwork(2, 1, 2, seed=4), 0.1, trials=5, seed=3)
        assert report.num_gates == 1
        assert report.max_ratio <= 1.0 + 1e-9

    def test_ratio_bounded_for_deeper_circuit(self):
        report = processor.verify_error_propagation(random_brickwork(5, 4, 2, seed=8), 0.05, trials=4, seed=1)
        assert 0.0 < report.max_ratio <= 1.0 + 1e-6

    def test_size_guard(self):
        with pytest.raises(TooLarge):
            processor.verify_error_propagation(random_brickwork(9, 1, 1, seed=0), 0.1, trials=1, seed=0)
