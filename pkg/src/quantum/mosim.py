#!/usr/bin/env python3
"""
Monte-Carlo simulation of the measure-and-operate programming channel for a
qubit unitary from n in {1, 2} copies.

Register order is (A_1..A_n, R_1..R_n). For n = 2 the system copies are
written in the triplet/singlet basis; both multiplicity spaces are
one-dimensional, so the multiplicity vector is trivial.

The measurement is integrated analytically: each sampled estimate U_hat
contributes its acceptance weight |<psi_0| (V^{(x)n} (x) I) |psi_P>|^2,
V = U_hat^dag U, instead of a binary accept/reject outcome.
"""

import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import InvalidParams, InvalidZeta, NumericFailure, UnsupportedN
from ..core.parallel import chunk_ranges, derive_seed, parallel_map
from .clifford import clifford_stack
from .matrixcore import (
    choi_of_unitary,
    depolarizing_choi,
    haar_unitaries,
    require_unitary,
    sum_pairwise,
    trace_norm,
)
from .models import CovarianceCheck, MOEstimate, ProbeConfig, UnitaryEnsemble, ZetaCheck
from .representation import add_box, schur_character, weyl_dimension

logger = logging.getLogger(__name__)

D = 2
JACKKNIFE_BLOCKS = 32
MIN_SAMPLES = 1000
PERTURBATION_STREAM = 1 << 63

_SQRT_HALF = 1.0 / math.sqrt(2.0)
_SCHUR_BASIS = {
    1: {(1,): [np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)]},
    2: {
        (2,): [
            np.array([1, 0, 0, 0], dtype=complex),
            np.array([0, _SQRT_HALF, _SQRT_HALF, 0], dtype=complex),
            np.array([0, 0, 0, 1], dtype=complex),
        ],
        (1, 1): [np.array([0, _SQRT_HALF, -_SQRT_HALF, 0], dtype=complex)],
    },
}


def schur_basis(n: int) -> Dict[Tuple[int, ...], List[np.ndarray]]:
    if n not in _SCHUR_BASIS:
        raise UnsupportedN(f"Schur basis available for n in {{1, 2}}, got {n}")
    return _SCHUR_BASIS[n]


def _block_max_entangled(vectors: List[np.ndarray]) -> np.ndarray:
    """(1/sqrt(dim)) sum_i |e_i>_A |e_i>_R for a real orthonormal block basis"""
    return sum(np.kron(v, v) for v in vectors) / math.sqrt(len(vectors))


def probe_state(cfg: ProbeConfig) -> np.ndarray:
    """Probe vector sum_lam sqrt(q_lam) |Phi+_lam>, length 4^n"""
    basis = schur_basis(cfg.n)
    state = sum(math.sqrt(q) * _block_max_entangled(basis[lam]) for lam, q in cfg.q_weights.items())
    return state / np.linalg.norm(state)


def program_state(U: np.ndarray, cfg: ProbeConfig) -> np.ndarray:
    """(U^{(x)n} (x) I) |psi_P>"""
    Un = _tensor_power(np.asarray(U, dtype=complex)[None], cfg.n)[0]
    psi = probe_state(cfg).reshape(D ** cfg.n, D ** cfg.n)
    return (Un @ psi).reshape(-1)


def reference_state(cfg: ProbeConfig) -> np.ndarray:
    """Unnormalized psi_0 = sum_{lam in S} dim(W_lam) |Phi+_lam> over the shapes with q_lam > 0"""
    basis = schur_basis(cfg.n)
    return sum(
        weyl_dimension(lam, D) * _block_max_entangled(basis[lam])
        for lam, q in cfg.q_weights.items()
        if q > 0
    )


def _tensor_power(V: np.ndarray, n: int) -> np.ndarray:
    if n == 1:
        return V
    return np.einsum("sab,scd->sacbd", V, V).reshape(len(V), 4, 4)


def acceptance_weights(V: np.ndarray, cfg: ProbeConfig, reference: Optional[np.ndarray] = None) -> np.ndarray:
    """|<psi_0| (V^{(x)n} (x) I) |psi_P>|^2 for a stack of V = U_hat^dag U"""
    ref = reference_state(cfg) if reference is None else reference
    dim = D ** cfg.n
    psi = probe_state(cfg).reshape(dim, dim)
    moved = _tensor_power(V, cfg.n) @ psi
    amplitudes = np.einsum("ar,sar->s", ref.reshape(dim, dim).conj(), moved)
    return np.abs(amplitudes) ** 2


def _eigen_pairs(V: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    evals = np.linalg.eigvals(V)
    evals = evals / np.abs(evals)
    return evals[:, 0], evals[:, 1]


def character_weights(V: np.ndarray, cfg: ProbeConfig) -> np.ndarray:
    """|sum_lam sqrt(q_lam) chi_lam(V)|^2"""
    x, y = _eigen_pairs(V)
    amp = sum(math.sqrt(q) * schur_character(lam, x, y) for lam, q in cfg.q_weights.items())
    return np.abs(amp) ** 2


def fidelity_moments(V: np.ndarray, cfg: ProbeConfig) -> np.ndarray:
    """|sum_lam sqrt(q_lam) sum_{gamma in lam + box} chi_gamma(V)|^2"""
    x, y = _eigen_pairs(V)
    amp = sum(
        math.sqrt(q) * sum(schur_character(gamma, x, y) for gamma in add_box(lam, D))
        for lam, q in cfg.q_weights.items()
    )
    return np.abs(amp) ** 2


def _sample_estimates(ensemble: UnitaryEnsemble, samples: int, seed: Optional[int]) -> List[np.ndarray]:
    """Blocks of sampled U_hat; the Clifford ensemble is enumerated exactly as one block"""
    if UnitaryEnsemble(ensemble) == UnitaryEnsemble.CLIFFORD:
        return [clifford_stack()]
    if samples < MIN_SAMPLES:
        raise InvalidParams(f"need at least {MIN_SAMPLES} samples, got {samples}")
    if seed is None:
        raise InvalidParams("Haar sampling requires a seed")
    blocks = chunk_ranges(samples, JACKKNIFE_BLOCKS)
    logger.debug(f"Sampling {samples} Haar unitaries in {len(blocks)} blocks")
    return parallel_map(lambda r: haar_unitaries(D, seed, len(r), start=r.start), blocks)


def jackknife(block_sums: Sequence[np.ndarray], estimator: Callable) -> Tuple[np.ndarray, np.ndarray]:
    """Delete-one-block jackknife: (estimate, standard error), elementwise for arrays"""
    totals = [s.sum(axis=0) for s in block_sums]
    estimate = np.asarray(estimator(*totals))
    nblocks = len(block_sums[0])
    if nblocks < 2:
        return estimate, np.zeros_like(np.abs(estimate), dtype=float)
    loo = np.array([estimator(*[t - s[b] for t, s in zip(totals, block_sums)]) for b in range(nblocks)])
    spread = np.abs(loo - loo.mean(axis=0)) ** 2
    return estimate, np.sqrt((nblocks - 1) / nblocks * spread.sum(axis=0))


def _validate_target(U) -> np.ndarray:
    U = require_unitary(U, name="target unitary")
    if U.shape != (D, D):
        raise InvalidParams(f"target must be a 2x2 unitary, got {U.shape}")
    return U


def estimate_p(
    U,
    cfg: ProbeConfig,
    samples: int = 100_000,
    ensemble: UnitaryEnsemble = UnitaryEnsemble.HAAR,
    seed: Optional[int] = None,
) -> MOEstimate:
    """
    Depolarizing coefficient p = (E|sum_lam sqrt(q_lam) sum_gamma chi_gamma(U_hat^dag U)|^2 - 1) / (d^2 - 1).
    """
    U = _validate_target(U)
    blocks = _sample_estimates(ensemble, samples, seed)
    sums = np.array([sum_pairwise(fidelity_moments(B.conj().transpose(0, 2, 1) @ U, cfg)) for B in blocks])
    counts = np.array([len(B) for B in blocks], dtype=float)
    p_hat, stderr = jackknife([sums, counts], lambda s, c: (s / c - 1.0) / (D * D - 1))
    total = int(counts.sum())
    logger.info(f"Estimated p={float(p_hat):.6f} +/- {float(stderr):.6f} from {total} {UnitaryEnsemble(ensemble).value} samples")
    return MOEstimate(p_hat=float(p_hat), stderr=float(stderr), samples=total, ensemble=UnitaryEnsemble(ensemble))


def _p_model_fit(choi: np.ndarray, U: np.ndarray) -> Tuple[float, np.ndarray]:
    """Least-squares p for choi ~ p J(U) + (1 - p) I/d"""
    direction = choi_of_unitary(U) - depolarizing_choi(D)
    offset = choi - depolarizing_choi(D)
    p = float(np.real(np.vdot(direction, offset)) / np.real(np.vdot(direction, direction)))
    return p, p * choi_of_unitary(U) + (1.0 - p) * depolarizing_choi(D)


def simulate_mo_channel(
    U,
    cfg: ProbeConfig,
    samples: int = 100_000,
    ensemble: UnitaryEnsemble = UnitaryEnsemble.HAAR,
    seed: Optional[int] = None,
) -> MOEstimate:
    """
    Choi matrix of the simulated channel, self-normalized by the total acceptance
    weight so every batch is exactly trace preserving.
    """
    U = _validate_target(U)
    blocks = _sample_estimates(ensemble, samples, seed)
    ref = reference_state(cfg)
    w_sums, c_sums, x_sums = [], [], []
    for B in blocks:
        V = B.conj().transpose(0, 2, 1) @ U
        w = acceptance_weights(V, cfg, ref)
        u = B.transpose(0, 2, 1).reshape(len(B), -1)
        chois = np.einsum("s,si,sj->sij", w, u, u.conj())
        w_sums.append(sum_pairwise(w))
        c_sums.append(sum_pairwise(chois))
        x_sums.append(sum_pairwise(fidelity_moments(V, cfg)))
    w_sums, c_sums, x_sums = np.array(w_sums), np.array(c_sums), np.array(x_sums)
    counts = np.array([len(B) for B in blocks], dtype=float)

    choi_hat, choi_err = jackknife([c_sums, w_sums], lambda c, w: c / w)
    p_hat, p_err = jackknife([x_sums, counts], lambda s, c: (s / c - 1.0) / (D * D - 1))
    trace = float(np.trace(choi_hat).real)
    if abs(trace - D) > 1e-9:
        raise NumericFailure(f"simulated channel is not trace preserving (Tr J = {trace})")

    p_fit, model = _p_model_fit(choi_hat, U)
    residual = trace_norm(choi_hat - model)
    tolerance = 5.0 * D * float(np.linalg.norm(choi_err)) + 1e-9
    logger.info(f"MO channel: p_fit={p_fit:.6f}, residual={residual:.3e} (tolerance {tolerance:.3e})")
    return MOEstimate(
        p_hat=float(p_hat),
        stderr=float(p_err),
        samples=int(counts.sum()),
        ensemble=UnitaryEnsemble(ensemble),
        p_exact_channel=p_fit,
        choi_hat=choi_hat,
        choi_stderr=choi_err,
        fit_residual=residual,
        fit_tolerance=tolerance,
    )


def perturbation_bound(zeta: float) -> float:
    """Half-diamond deviation allowed when ||psi_0~ psi_0~^dag - psi_0 psi_0^dag||_1 <= zeta"""
    return 0.5 * zeta


def perturb_reference(cfg: ProbeConfig, distance: float, seed: int = 0) -> np.ndarray:
    """
    Unnormalized psi_0 rotated towards a random orthogonal direction at fixed norm R,
    so that the outer products differ by exactly `distance` in trace norm (2 R^2 sin theta).
    """
    ref = reference_state(cfg)
    norm2 = float(np.vdot(ref, ref).real)
    if distance == 0.0:
        return ref
    if distance > 2.0 * norm2:
        raise InvalidParams(f"trace distance {distance} exceeds 2 ||psi_0||^2 = {2.0 * norm2}")
    phi0 = ref / math.sqrt(norm2)
    rng = np.random.default_rng(derive_seed(seed, PERTURBATION_STREAM))
    chi = rng.standard_normal(len(phi0)) + 1j * rng.standard_normal(len(phi0))
    chi = chi - np.vdot(phi0, chi) * phi0
    chi = chi / np.linalg.norm(chi)
    angle = math.asin(distance / (2.0 * norm2))
    return math.sqrt(norm2) * (math.cos(angle) * phi0 + math.sin(angle) * chi)


def zeta_perturbation_check(
    cfg: ProbeConfig,
    zeta: float,
    samples: int = 100_000,
    seed: int = 0,
    perturbation: float = 1.0,
    ensemble: UnitaryEnsemble = UnitaryEnsemble.HAAR,
) -> ZetaCheck:
    """
    Move the unnormalized reference state by perturbation * zeta in trace norm and
    measure the change of the simulated channel on common samples against zeta / 2.
    """
    if not 0.0 < zeta <= 0.5:
        raise InvalidZeta(f"zeta must lie in (0, 0.5], got {zeta}")
    if not 0.0 <= perturbation <= 1.0:
        raise InvalidParams(f"perturbation fraction must lie in [0, 1], got {perturbation}")

    ref = reference_state(cfg)
    perturbed = perturb_reference(cfg, perturbation * zeta, seed)

    blocks = _sample_estimates(ensemble, samples, seed)
    diff_sums = []
    for B in blocks:
        w = acceptance_weights(B.conj().transpose(0, 2, 1), cfg, ref)
        w_tilde = acceptance_weights(B.conj().transpose(0, 2, 1), cfg, perturbed)
        u = B.transpose(0, 2, 1).reshape(len(B), -1)
        diff_sums.append(sum_pairwise(np.einsum("s,si,sj->sij", w_tilde - w, u, u.conj())))
    counts = np.array([len(B) for B in blocks], dtype=float)
    deviation, err = jackknife(
        [np.array(diff_sums), counts], lambda s, c: 0.5 * trace_norm(s / c / D)
    )

    deviation = float(deviation)
    bound = perturbation_bound(zeta)
    tolerance = 3.0 * float(err)
    slack = bound + tolerance - deviation
    logger.info(f"zeta={zeta}: deviation={deviation:.4e}, bound={bound:.4e}, tolerance={tolerance:.2e}")
    return ZetaCheck(
        zeta=zeta,
        perturbation=perturbation,
        deviation=deviation,
        bound=bound,
        tolerance=tolerance,
        slack=slack,
        holds=slack >= -1e-12,
    )


def check_covariance(U_a, U_b, cfg: ProbeConfig, samples: int = 100_000, seed: int = 0) -> CovarianceCheck:
    first = estimate_p(U_a, cfg, samples, UnitaryEnsemble.HAAR, seed)
    second = estimate_p(U_b, cfg, samples, UnitaryEnsemble.HAAR, derive_seed(seed, 1 << 32))
    combined = math.hypot(first.stderr, second.stderr)
    difference = abs(first.p_hat - second.p_hat)
    return CovarianceCheck(
        p_a=first.p_hat,
        p_b=second.p_hat,
        difference=difference,
        combined_stderr=combined,
        holds=difference <= 3.0 * combined,
    )


def exact_p(cfg: ProbeConfig) -> float:
    """p from the exact Clifford average (equal to the Haar value for n <= 2)"""
    return estimate_p(np.eye(D), cfg, ensemble=UnitaryEnsemble.CLIFFORD).p_hat
