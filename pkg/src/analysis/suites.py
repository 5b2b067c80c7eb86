#!/usr/bin/env python3
"""
Property suites run by `verify`. Each check reports how many instances were
tested and how many failed; sizes shrink with quick=True.
"""

import logging
import math
import time
from typing import Callable, Dict, List

import numpy as np
from pydantic import BaseModel, Field, computed_field

from ..core.errors import NumericFailure
from ..core.parallel import derive_seed, parallel_map, rng_for
from ..programming import bounds, lightcone, processor
from ..programming.models import ConeStats
from ..quantum import circuit as circuits
from ..quantum import matrixcore as mc
from ..quantum import mosim, representation
from ..quantum.clifford import clifford_group, is_closed, trace_moments
from ..quantum.models import Axis, Ensemble, GateSlot, PauliGate, ProbeConfig, UnitaryEnsemble

logger = logging.getLogger(__name__)

SUITES = ("repr", "matrixcore", "circuit", "bounds", "lightcone", "processor", "mosim")

LOWER_BRACKET = (1e-4, 1e-2)
UPPER_BRACKET = (100.0, 2000.0)


class CheckResult(BaseModel):
    name: str
    checked: int
    failures: int
    detail: Dict[str, float] = Field(default_factory=dict)
    seconds: float = 0.0

    @computed_field
    @property
    def passed(self) -> bool:
        return self.failures == 0


class SuiteResult(BaseModel):
    suite: str
    checks: List[CheckResult]

    @computed_field
    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _timed(name: str, fn: Callable[[], CheckResult]) -> CheckResult:
    start = time.perf_counter()
    result = fn()
    result.seconds = round(time.perf_counter() - start, 3)
    level = logging.INFO if result.passed else logging.ERROR
    logger.log(level, f"{name}: {result.checked} checked, {result.failures} failures")
    return result


def _count(name: str, outcomes: List[bool], **detail: float) -> CheckResult:
    return CheckResult(name=name, checked=len(outcomes), failures=sum(1 for ok in outcomes if not ok), detail=detail)


def repr_suite(quick: bool = False, seed: int = 0) -> SuiteResult:
    def cauchy():
        r = representation.check_cauchy_identity(4, 8)
        return CheckResult(name="cauchy_identity", checked=r["checked"], failures=r["failures"])

    def binomial():
        top = 60 if quick else 200
        r = representation.check_binomial_lower_bound(top, top)
        return CheckResult(name="binomial_lower_bound", checked=r["checked"], failures=r["failures"],
                           detail={"min_log_margin": r["min_log_margin"]})

    def branching():
        r = representation.check_character_branching(1000, seed)
        return CheckResult(name="character_branching", checked=r["checked"], failures=r["failures"],
                           detail={"max_error": r["max_error"]})

    def row_dimension():
        return _count("weyl_dimension_one_row", [representation.weyl_dimension((n,), 2) == n + 1 for n in range(51)])

    return SuiteResult(suite="repr", checks=[_timed(n, f) for n, f in (
        ("cauchy_identity", cauchy), ("binomial_lower_bound", binomial),
        ("character_branching", branching), ("weyl_dimension_one_row", row_dimension))])


def _random_pair(d: int, seed: int, i: int):
    return mc.haar_unitary(d, derive_seed(seed, 2 * i)), mc.haar_unitary(d, derive_seed(seed, 2 * i + 1))


def matrixcore_suite(quick: bool = False, seed: int = 0) -> SuiteResult:
    pairs = 100 if quick else 1000

    def sandwich():
        outcomes = []
        for d in (2, 4):
            for i in range(pairs):
                U, V = _random_pair(d, derive_seed(seed, d), i)
                low = mc.phase_optimized_distance(U, V)
                dia = mc.diamond_distance_unitary(U, V)
                outcomes.append(low - 1e-8 <= dia <= 2 * low + 1e-8)
        return _count("diamond_sandwich", outcomes)

    def randomized_lower():
        U, V = _random_pair(2, seed, 0)
        dia = mc.diamond_distance_unitary(U, V)
        best = max(mc.channel_output_distance(U, V, mc.random_pure_state(4, derive_seed(seed, 100 + i)))
                   for i in range(pairs))
        return _count("diamond_randomized_lower", [best <= dia + 1e-8], best_input=best, diamond=dia)

    def holevo():
        outcomes = []
        count = 20 if quick else 100
        for i in range(count):
            rng = rng_for(seed, 500 + i)
            members = rng.integers(2, 6)
            weights = rng.dirichlet(np.ones(members))
            states = [mc.random_density(2, derive_seed(seed, 1000 * i + j)) for j in range(members)]
            ensemble = Ensemble(members=list(zip(weights, states)))
            chi = mc.holevo_information(ensemble)
            U = mc.haar_unitary(2, derive_seed(seed, 7000 + i))
            p = float(rng.uniform(0, 1))
            processed = Ensemble(members=[(w, mc.apply_channel_depolarizing(rho, U, p)) for w, rho in ensemble.members])
            chi_out = mc.holevo_information(processed)
            outcomes.append(chi >= -1e-9 and chi <= math.log(2) + 1e-9 and chi_out <= chi + 1e-9)
        return _count("holevo_properties", outcomes)

    def afw():
        outcomes = []
        for i in range(pairs):
            rho = mc.random_density(2, derive_seed(seed, 3 * i))
            sigma = mc.random_density(2, derive_seed(seed, 3 * i + 1))
            outcomes.append(mc.afw_check(rho, sigma, 2) >= -1e-9)
        return _count("afw_continuity", outcomes)

    def haar_moments():
        samples = 20_000 if quick else 100_000
        Us = mc.haar_unitaries(2, seed, samples)
        tr2 = np.abs(np.trace(Us, axis1=1, axis2=2)) ** 2
        outcomes = []
        detail = {}
        for power, expected in ((1, 1.0), (2, 2.0)):
            values = tr2 ** power
            mean, err = float(values.mean()), float(values.std(ddof=1) / math.sqrt(samples))
            detail[f"moment_{2 * power}"] = mean
            outcomes.append(abs(mean - expected) <= 3 * err)
        return _count("haar_trace_moments", outcomes, **detail)

    return SuiteResult(suite="matrixcore", checks=[_timed(n, f) for n, f in (
        ("diamond_sandwich", sandwich), ("diamond_randomized_lower", randomized_lower),
        ("holevo_properties", holevo), ("afw_continuity", afw), ("haar_trace_moments", haar_moments))])


def circuit_suite(quick: bool = False, seed: int = 0) -> SuiteResult:
    count = 10 if quick else 50

    def unitary_and_codec():
        outcomes = []
        for i in range(count):
            rng = rng_for(seed, i)
            n = int(rng.integers(2, 9))
            geometry = "1d-line" if i % 2 == 0 else "complete"
            c = circuits.random_brickwork(n, int(rng.integers(1, 5)), 2, geometry, derive_seed(seed, 10_000 + i))
            U = circuits.circuit_unitary(c)
            outcomes.append(mc.unitarity_gap(U) <= 1e-9)
            outcomes.append(circuits.parse_circuit(circuits.serialize_circuit(c)) == c)
            outcomes.append(c.num_gates * c.k <= c.num_qubits * c.depth)
        return _count("unitarity_codec_gate_count", outcomes)

    return SuiteResult(suite="circuit", checks=[_timed("unitarity_codec_gate_count", unitary_and_codec)])


def bounds_suite(quick: bool = False, seed: int = 0) -> SuiteResult:
    def consistency():
        rng = np.random.default_rng(seed)
        outcomes = []
        for _ in range(100 if quick else 1000):
            k = int(rng.integers(1, 4))
            n = int(rng.integers(k, 200))
            ell = int(rng.integers(0, 500))
            eps = float(rng.uniform(1e-4, 1.0))
            upper = bounds.program_cost_upper(n, k, ell, eps).value_bits
            outcomes.append(abs(upper - bounds.covering_log2_brickwork(n, k, ell, eps)) <= 1e-9 * max(1.0, upper))
        return _count("upper_equals_covering", outcomes)

    def tightness():
        exponents = range(6, 15) if quick else range(6, 21)
        outcomes = []
        for e in exponents:
            point = bounds.tightness_point(2 ** e)
            outcomes.append(point["lower_bits"] <= point["upper_bits"])
            outcomes.append(UPPER_BRACKET[0] <= point["upper_scaled"] <= UPPER_BRACKET[1])
            if e >= 10:
                outcomes.append(LOWER_BRACKET[0] <= point["lower_scaled"] <= LOWER_BRACKET[1])
        return _count("tightness_brackets", outcomes)

    def monotone_eps():
        grid = np.logspace(-3, 0, 25)
        upper = [bounds.program_cost_upper(64, 2, 128, e).value_bits for e in grid]
        cover = [bounds.covering_log2_unitary(4, e) for e in grid]
        lower_grid = grid[grid < 1 / 32]
        lower = [bounds.optimize_lower(1000, e, 0.5)[1].value_bits for e in lower_grid]
        outcomes = [b <= a + 1e-6 * max(1.0, abs(a)) for series in (upper, cover, lower) for a, b in zip(series, series[1:])]
        return _count("monotone_in_eps", outcomes)

    return SuiteResult(suite="bounds", checks=[_timed(n, f) for n, f in (
        ("upper_equals_covering", consistency), ("tightness_brackets", tightness), ("monotone_in_eps", monotone_eps))])


def _pauli_slots(rng: np.random.Generator, supports, axis: Axis):
    return [GateSlot(layer=0, support=s, gate=PauliGate(axis=axis, theta=float(rng.uniform(0, 2 * np.pi))))
            for s in supports]


def lightcone_suite(quick: bool = False, seed: int = 0) -> SuiteResult:
    count = 20 if quick else 100

    def replay():
        def one(i: int) -> List[bool]:
            rng = rng_for(seed, i)
            n = int(rng.integers(2, 9))
            depth = int(rng.integers(1, 6))
            c = circuits.random_brickwork(n, depth, 2 if n >= 2 else 1, "1d-line" if i % 2 else "complete",
                                          derive_seed(seed, 50_000 + i))
            out = []
            for w in range(1, depth + 1):
                dec = lightcone.decompose(c, w)
                check = lightcone.verify_decomposition(c, dec)
                out.append(check.passed and all(cone.depth <= w for cone in dec.cones))
            return out
        return _count("decomposition_replay", [ok for batch in parallel_map(one, list(range(count))) for ok in batch])

    def merge():
        outcomes = []
        for i in range(count):
            rng = rng_for(seed, 90_000 + i)
            n = int(rng.integers(3, 7))
            supports = [tuple(sorted(rng.choice(n, 2, replace=False).tolist())) for _ in range(3)]
            slots = _pauli_slots(rng, [supports[int(rng.integers(0, 3))] for _ in range(8)], Axis.X)
            before = np.eye(2 ** n, dtype=complex)
            for s in slots:
                before = mc.pauli_rotation("X", s.support, s.gate.theta, n) @ before
            after = np.eye(2 ** n, dtype=complex)
            for support, gate in lightcone.merge_pauli_cone(slots):
                after = mc.pauli_rotation("X", support, gate.theta, n) @ after
            outcomes.append(mc.operator_norm(before - after) <= 1e-10)
        return _count("pauli_merge_product", outcomes)

    def phase_gate():
        rng = np.random.default_rng(seed)
        outcomes = []
        for _ in range(100 if quick else 1000):
            theta, theta_tilde = rng.uniform(0, 2 * np.pi, 2)
            axis = str(rng.choice(["X", "Y", "Z"]))
            try:
                lightcone.phase_gate_error(theta, theta_tilde, axis, (0, 1), 2)
                outcomes.append(True)
            except NumericFailure:
                outcomes.append(False)
        return _count("phase_gate_bound", outcomes)

    def tradeoff_direction():
        degenerate = [ConeStats(distinct_supports=2, width=4, gates=25)] * 4
        distinct = [ConeStats(distinct_supports=25, width=16, gates=25)] * 4
        reduced = lightcone.structured_tradeoff(degenerate, 100, 2, 16, 0.01)
        full = lightcone.structured_tradeoff(distinct, 100, 2, 16, 0.01)
        ratios = lightcone.structured_sweep()["ratio"].tolist()
        generic = lightcone.generic_sweep()["ratio"].tolist()
        tail = generic[len(generic) // 2:]
        outcomes = [
            reduced.reduces_cost,
            not full.reduces_cost,
            all(b < a for a, b in zip(ratios, ratios[1:])),
            all(b > a for a, b in zip(tail, tail[1:])),
        ]
        return _count("tradeoff_direction", outcomes)

    return SuiteResult(suite="lightcone", checks=[_timed(n, f) for n, f in (
        ("decomposition_replay", replay), ("pauli_merge_product", merge),
        ("phase_gate_bound", phase_gate), ("tradeoff_direction", tradeoff_direction))])


def processor_suite(quick: bool = False, seed: int = 0) -> SuiteResult:
    count = 20 if quick else 100

    def construction():
        def one(i: int) -> List[bool]:
            rng = rng_for(seed, i)
            c = circuits.random_brickwork(int(rng.integers(1, 7)), int(rng.integers(1, 5)), 1, "1d-line",
                                          derive_seed(seed, 20_000 + i))
            out = []
            for eps in (0.2, 0.5, 1.0):
                programmed = processor.program_circuit(c, eps)
                budget = bounds.covering_log2_brickwork(c.num_qubits, 1, c.num_gates, eps)
                out.append(programmed.achieved_error <= eps + 1e-9 and programmed.total_cost_bits <= budget)
            return out
        return _count("program_circuit", [ok for batch in parallel_map(one, list(range(count))) for ok in batch])

    def propagation():
        worst = 0.0
        outcomes = []
        for i in range(5 if quick else 10):
            rng = rng_for(seed, 30_000 + i)
            c = circuits.random_brickwork(int(rng.integers(2, 7)), int(rng.integers(1, 4)), 2, "1d-line",
                                          derive_seed(seed, 40_000 + i))
            try:
                report = processor.verify_error_propagation(c, 0.05, 10, derive_seed(seed, i))
                worst = max(worst, report.max_ratio)
                outcomes.append(True)
            except NumericFailure:
                outcomes.append(False)
        return _count("error_propagation", outcomes, max_ratio=worst)

    def idempotence():
        net = processor.build_net_u2(1.0)
        hits = [net.nearest(net.element(t)) for t in range(net.size)]
        return _count("net_idempotence", [index == t and gap < 1e-7 for t, (index, gap) in enumerate(hits)])

    return SuiteResult(suite="processor", checks=[_timed(n, f) for n, f in (
        ("program_circuit", construction), ("error_propagation", propagation), ("net_idempotence", idempotence))])


def mosim_suite(quick: bool = False, seed: int = 0) -> SuiteResult:
    samples = 20_000 if quick else 100_000
    single = ProbeConfig(n=1)
    double = ProbeConfig(n=2)

    def depolarizing_coefficient():
        haar = mosim.estimate_p(np.eye(2), single, samples, UnitaryEnsemble.HAAR, seed)
        clifford = mosim.estimate_p(np.eye(2), single, ensemble=UnitaryEnsemble.CLIFFORD)
        return _count("p_single_copy", [
            abs(haar.p_hat - 1 / 3) <= 3 * haar.stderr,
            abs(clifford.p_hat - 1 / 3) <= 1e-12,
            abs(clifford.p_hat - haar.p_hat) <= 3 * haar.stderr,
        ], p_haar=haar.p_hat, stderr=haar.stderr)

    def clifford_design():
        group = clifford_group()
        moments = trace_moments(np.stack(group))
        return _count("clifford_group", [len(group) == 24, is_closed(group),
                                         abs(moments[0] - 1) < 1e-12, abs(moments[1] - 2) < 1e-12,
                                         abs(moments[2] - 5) < 1e-12])

    def exact_design_channel():
        haar = mosim.simulate_mo_channel(np.eye(2), single, samples, UnitaryEnsemble.HAAR, seed)
        clifford = mosim.simulate_mo_channel(np.eye(2), single, ensemble=UnitaryEnsemble.CLIFFORD)
        deviation = np.abs(haar.choi_hat - clifford.choi_hat)
        allowed = 3 * haar.choi_stderr + 1e-12
        return _count("clifford_equals_haar_channel", list((deviation <= allowed).reshape(-1)),
                      max_deviation=float(deviation.max()))

    def model_fit():
        outcomes = []
        for i in range(5):
            U = mc.haar_unitary(2, derive_seed(seed, 60_000 + i))
            est = mosim.simulate_mo_channel(U, single, samples // 5, UnitaryEnsemble.HAAR, derive_seed(seed, i + 1))
            outcomes.append(est.fit_residual <= est.fit_tolerance)
        return _count("depolarizing_model_fit", outcomes)

    def covariance():
        U_a = mc.haar_unitary(2, derive_seed(seed, 70_001))
        U_b = mc.haar_unitary(2, derive_seed(seed, 70_002))
        check = mosim.check_covariance(U_a, U_b, single, samples, seed)
        return _count("covariance", [check.holds], difference=check.difference)

    def two_copies():
        p1, p2 = mosim.exact_p(single), mosim.exact_p(double)
        return _count("two_copies_help", [p2 > p1, abs(p2 - 0.5) < 1e-12], p_single=p1, p_double=p2)

    def acceptance_characters():
        outcomes = []
        V = mc.haar_unitaries(2, derive_seed(seed, 80_000), 200)
        for cfg in (single, double):
            gap = np.abs(mosim.acceptance_weights(V, cfg) - mosim.character_weights(V, cfg))
            outcomes.extend((gap <= 1e-10).tolist())
        return _count("acceptance_character_formula", outcomes)

    def zeta():
        checks = [mosim.zeta_perturbation_check(cfg, 0.2, samples, seed) for cfg in (single, double)]
        return _count("zeta_perturbation", [c.holds and c.bound <= 0.1 + 1e-12 for c in checks],
                      deviation=max(c.deviation for c in checks), bound=checks[0].bound)

    return SuiteResult(suite="mosim", checks=[_timed(n, f) for n, f in (
        ("p_single_copy", depolarizing_coefficient), ("clifford_group", clifford_design),
        ("clifford_equals_haar_channel", exact_design_channel), ("depolarizing_model_fit", model_fit),
        ("covariance", covariance), ("two_copies_help", two_copies),
        ("acceptance_character_formula", acceptance_characters), ("zeta_perturbation", zeta))])


_RUNNERS: Dict[str, Callable[..., SuiteResult]] = {
    "repr": repr_suite,
    "matrixcore": matrixcore_suite,
    "circuit": circuit_suite,
    "bounds": bounds_suite,
    "lightcone": lightcone_suite,
    "processor": processor_suite,
    "mosim": mosim_suite,
}


def run_suite(name: str, quick: bool = False, seed: int = 0) -> List[SuiteResult]:
    """Run one suite, or every suite for name='all'"""
    names = SUITES if name == "all" else (name,)
    return [_RUNNERS[n](quick=quick, seed=seed) for n in names]
