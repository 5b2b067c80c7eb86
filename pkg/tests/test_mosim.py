#!/usr/bin/env python3
"""Measure-and-operate channel simulation at d = 2"""

import math

import numpy as np
import pytest

from src.core.errors import InvalidParams, InvalidZeta, NotUnitary, UnsupportedN, ValidationError
from src.quantum import mosim
from src.quantum.matrixcore import choi_of_unitary, depolarizing_choi, haar_unitaries, haar_unitary
from src.quantum.models import ProbeConfig, UnitaryEnsemble

SAMPLES = 20_000


@pytest.fixture
def single():
    return ProbeConfig(n=1)


@pytest.fixture
def double():
    return ProbeConfig(n=2)


class TestProbe:
    def test_single_copy_is_bell_state(self, single):
        expected = np.array([1, 0, 0, 1]) / math.sqrt(2)
        assert np.allclose(mosim.probe_state(single), expected)

    def test_symmetric_weights_avoid_singlet_block(self):
        cfg = ProbeConfig(n=2, q_weights={(2,): 1.0, (1, 1): 0.0})
        singlet = np.array([0, 1, -1, 0]) / math.sqrt(2)
        assert abs(np.vdot(np.kron(singlet, singlet), mosim.probe_state(cfg))) < 1e-12

    def test_normalized(self):
        rng = np.random.default_rng(1)
        for _ in range(5):
            q = float(rng.uniform())
            cfg = ProbeConfig(n=2, q_weights={(2,): q, (1, 1): 1.0 - q})
            assert np.linalg.norm(mosim.probe_state(cfg)) == pytest.approx(1.0)

    def test_program_state_rotates_system_half(self, single):
        U = haar_unitary(2, 3)
        state = mosim.program_state(U, single).reshape(2, 2)
        assert np.allclose(state, U / math.sqrt(2))

    def test_three_copies_unsupported(self):
        with pytest.raises(UnsupportedN):
            ProbeConfig(n=3)

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValidationError):
            ProbeConfig(n=2, q_weights={(2,): 0.7, (1, 1): 0.7})

    def test_single_copy_has_one_shape(self):
        with pytest.raises(ValidationError):
            ProbeConfig(n=1, q_weights={(2,): 1.0})


class TestEstimateP:
    def test_clifford_average_is_exact(self, single):
        est = mosim.estimate_p(np.eye(2), single, ensemble=UnitaryEnsemble.CLIFFORD)
        assert est.p_hat == pytest.approx(1 / 3, abs=1e-12)
        assert est.samples == 24

    def test_two_copies_exceed_one(self, single, double):
        assert mosim.exact_p(single) == pytest.approx(1 / 3, abs=1e-12)
        assert mosim.exact_p(double) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.slow
    def test_haar_estimate_near_one_third(self, single):
        est = mosim.estimate_p(np.eye(2), single, 100_000, UnitaryEnsemble.HAAR, seed=42)
        assert abs(est.p_hat - 1 / 3) <= 3 * est.stderr
        assert est.stderr > 0

    def test_seeded_runs_repeat(self, single):
        a = mosim.estimate_p(np.eye(2), single, 2000, UnitaryEnsemble.HAAR, seed=7)
        b = mosim.estimate_p(np.eye(2), single, 2000, UnitaryEnsemble.HAAR, seed=7)
        assert a.p_hat == b.p_hat

    def test_covariance(self, single):
        check = mosim.check_covariance(haar_unitary(2, 1), haar_unitary(2, 2), single, SAMPLES, seed=5)
        assert check.holds

    def test_too_few_samples(self, single):
        with pytest.raises(InvalidParams):
            mosim.estimate_p(np.eye(2), single, 999, UnitaryEnsemble.HAAR, seed=0)
        with pytest.raises(InvalidParams):
            mosim.estimate_p(np.eye(2), single, 0, UnitaryEnsemble.HAAR, seed=0)

    def test_haar_needs_seed(self, single):
        with pytest.raises(InvalidParams):
            mosim.estimate_p(np.eye(2), single, SAMPLES, UnitaryEnsemble.HAAR, seed=None)

    def test_non_unitary_target(self, single):
        with pytest.raises(NotUnitary):
            mosim.estimate_p(np.diag([1.0, 0.5]), single, ensemble=UnitaryEnsemble.CLIFFORD)


class TestChannel:
    def test_identity_target_is_depolarized(self, single):
        est = mosim.simulate_mo_channel(np.eye(2), single, SAMPLES, UnitaryEnsemble.HAAR, seed=11)
        expected = choi_of_unitary(np.eye(2)) / 3 + 2 * depolarizing_choi(2) / 3
        assert np.trace(est.choi_hat).real == pytest.approx(2.0, abs=1e-9)
        assert np.allclose(est.choi_hat, est.choi_hat.conj().T)
        assert np.max(np.abs(est.choi_hat - expected)) <= 5 * np.max(est.choi_stderr) + 1e-9

    def test_clifford_channel_exact(self, single):
        est = mosim.simulate_mo_channel(np.eye(2), single, ensemble=UnitaryEnsemble.CLIFFORD)
        expected = choi_of_unitary(np.eye(2)) / 3 + 2 * depolarizing_choi(2) / 3
        assert np.allclose(est.choi_hat, expected, atol=1e-12)
        assert est.p_exact_channel == pytest.approx(1 / 3, abs=1e-12)

    @pytest.mark.slow
    def test_model_fit_for_random_targets(self, single):
        for i in range(5):
            est = mosim.simulate_mo_channel(haar_unitary(2, 100 + i), single, SAMPLES, UnitaryEnsemble.HAAR, seed=i)
            assert est.fit_residual <= est.fit_tolerance

    def test_serialized_choi(self, single):
        est = mosim.simulate_mo_channel(np.eye(2), single, ensemble=UnitaryEnsemble.CLIFFORD)
        dumped = est.model_dump()
        assert len(dumped["choi_hat"]) == 4
        assert len(dumped["choi_hat"][0][0]) == 2


class TestZeta:
    def test_bound_holds(self, single):
        check = mosim.zeta_perturbation_check(single, 0.2, SAMPLES, seed=3)
        assert check.holds
        assert check.bound <= 0.1 + 1e-12
        assert check.deviation <= 0.1 + check.tolerance

    def test_zero_perturbation(self, single):
        check = mosim.zeta_perturbation_check(single, 0.2, SAMPLES, seed=3, perturbation=0.0)
        assert check.deviation == pytest.approx(0.0, abs=1e-15)
        assert check.holds

    def test_deviation_shrinks_with_zeta(self, single):
        large = mosim.zeta_perturbation_check(single, 0.4, SAMPLES, seed=3)
        small = mosim.zeta_perturbation_check(single, 0.01, SAMPLES, seed=3)
        assert small.deviation < large.deviation

    @pytest.mark.parametrize("zeta", [0.0, 0.6])
    def test_zeta_range(self, single, zeta):
        with pytest.raises(InvalidZeta):
            mosim.zeta_perturbation_check(single, zeta, SAMPLES)

    def test_two_copy_bound_is_half_zeta(self, double):
        check = mosim.zeta_perturbation_check(double, 0.2, SAMPLES, seed=3)
        assert check.bound == pytest.approx(0.1)
        assert check.holds

    @pytest.mark.parametrize("n", [1, 2])
    def test_reference_moves_by_exact_trace_distance(self, n):
        cfg = ProbeConfig(n=n)
        ref = mosim.reference_state(cfg)
        moved = mosim.perturb_reference(cfg, 0.2, seed=1)
        delta = np.outer(moved, moved.conj()) - np.outer(ref, ref.conj())
        assert np.abs(np.linalg.eigvalsh(delta)).sum() == pytest.approx(0.2)
        assert np.linalg.norm(moved) == pytest.approx(np.linalg.norm(ref))

    def test_perturbation_too_large(self, single):
        with pytest.raises(InvalidParams):
            mosim.perturb_reference(single, 100.0)


class TestAcceptance:
    @pytest.mark.parametrize("n", [1, 2])
    def test_weights_follow_characters(self, n):
        cfg = ProbeConfig(n=n)
        V = haar_unitaries(2, 17, 50)
        assert np.allclose(mosim.acceptance_weights(V, cfg), mosim.character_weights(V, cfg), atol=1e-10)

    def test_identity_accepts_with_full_weight(self, single):
        assert mosim.acceptance_weights(np.eye(2)[None], single)[0] == pytest.approx(4.0)


class TestResidualScaling:
    def test_fit_residual_falls_with_samples(self):
        cfg = ProbeConfig(n=1)
        U = haar_unitary(2, 21)
        residuals = [mosim.simulate_mo_channel(U, cfg, samples, UnitaryEnsemble.HAAR, seed=8).fit_residual
                     for samples in (2_000, 32_000)]
        # 16x the samples: expected ratio 4
        assert residuals[1] < residuals[0] / 2
