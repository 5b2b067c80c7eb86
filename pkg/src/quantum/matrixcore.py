#!/usr/bin/env python3
"""
Dense linear algebra and quantum-information primitives.

Conventions:
  - Tensor factor 0 is the most significant qubit.
  - Choi matrices are unnormalized: J(E) = sum_mn |m><n| (x) E(|m><n|), trace d.
  - Entropies are in nats.
"""

import logging
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.linalg import expm, schur
from scipy.special import entr

from ..core.config import get_settings
from ..core.errors import (
    DimensionMismatch,
    InvalidP,
    NotDensity,
    NotUnitary,
    TooLarge,
)
from ..core.parallel import derive_seed

logger = logging.getLogger(__name__)

EIGEN_CLIP = 1e-14
DENSITY_TOL = 1e-10

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got array of shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DimensionMismatch("matrix has non-finite entries")
    return m


def unitarity_gap(U: np.ndarray) -> float:
    U = as_matrix(U)
    return float(np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0]), 2))


def is_unitary(U, tol: Optional[float] = None) -> bool:
    U = as_matrix(U)
    if U.shape[0] != U.shape[1]:
        return False
    tol = get_settings().unitary_tol if tol is None else tol
    return unitarity_gap(U) <= tol


def require_unitary(U, tol: float = 1e-9, name: str = "U") -> np.ndarray:
    U = as_matrix(U)
    if U.shape[0] != U.shape[1]:
        raise NotUnitary(f"{name} is not square: {U.shape}")
    gap = unitarity_gap(U)
    if gap > tol:
        raise NotUnitary(f"{name} is not unitary: ||U^dag U - I|| = {gap:.3e}")
    return U


def is_hermitian(A, tol: float = DENSITY_TOL) -> bool:
    A = as_matrix(A)
    return A.shape[0] == A.shape[1] and bool(np.allclose(A, A.conj().T, atol=tol))


def require_density(rho, name: str = "rho") -> np.ndarray:
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise NotDensity(f"{name} is not square: {rho.shape}")
    if not is_hermitian(rho):
        raise NotDensity(f"{name} is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > DENSITY_TOL:
        raise NotDensity(f"{name} has trace {np.trace(rho).real:.12f}")
    if np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() < -DENSITY_TOL:
        raise NotDensity(f"{name} is not positive semidefinite")
    return rho


def _same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")


def _haar_from_rng(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def haar_unitary(d: int, seed: int) -> np.ndarray:
    """Haar-random d x d unitary (Ginibre QR with phase-corrected R diagonal)"""
    if d < 1:
        raise DimensionMismatch(f"dimension must be >= 1, got {d}")
    return _haar_from_rng(d, np.random.default_rng(int(seed) & ((1 << 64) - 1)))


def haar_unitaries(d: int, seed: int, count: int, start: int = 0) -> np.ndarray:
    """Stack of Haar unitaries; sample i is drawn from seed XOR (start + i)"""
    out = np.empty((count, d, d), dtype=complex)
    for i in range(count):
        out[i] = _haar_from_rng(d, np.random.default_rng(derive_seed(seed, start + i)))
    return out


def random_pure_state(d: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(int(seed) & ((1 << 64) - 1))
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return psi / np.linalg.norm(psi)


def random_density(d: int, seed: int, rank: Optional[int] = None) -> np.ndarray:
    """Random density matrix from a d x rank Ginibre matrix (Hilbert-Schmidt measure at full rank)"""
    rank = d if rank is None else rank
    rng = np.random.default_rng(int(seed) & ((1 << 64) - 1))
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def operator_norm(A) -> float:
    return float(np.linalg.norm(as_matrix(A), 2))


def trace_norm(A) -> float:
    A = as_matrix(A)
    if is_hermitian(A, tol=1e-12):
        return float(np.abs(np.linalg.eigvalsh((A + A.conj().T) / 2)).sum())
    return float(np.linalg.svd(A, compute_uv=False).sum())


def trace_distance(rho, sigma) -> float:
    rho, sigma = as_matrix(rho), as_matrix(sigma)
    _same_shape(rho, sigma)
    if not (is_hermitian(rho) and is_hermitian(sigma)):
        raise NotDensity("trace distance requires Hermitian inputs")
    delta = rho - sigma
    return 0.5 * float(np.abs(np.linalg.eigvalsh((delta + delta.conj().T) / 2)).sum())


def _minimal_arc(phases: np.ndarray) -> np.ndarray:
    """Length of the smallest arc of the unit circle containing all phases (last axis)"""
    p = np.sort(np.mod(phases, 2 * np.pi), axis=-1)
    gaps = np.diff(p, axis=-1)
    wrap = 2 * np.pi - (p[..., -1] - p[..., 0])
    largest = np.maximum(wrap, gaps.max(axis=-1) if gaps.shape[-1] else 0.0)
    return np.clip(2 * np.pi - largest, 0.0, 2 * np.pi)


def eigenphase_arc(U, V) -> float:
    """Minimal arc spanned by the eigenphases of U^dag V"""
    U = require_unitary(U, name="U")
    V = require_unitary(V, name="V")
    _same_shape(U, V)
    T, _ = schur(U.conj().T @ V, output="complex")
    return float(_minimal_arc(np.angle(np.diagonal(T))))


def diamond_distance_unitary(U, V) -> float:
    """
    Exact diamond distance between the channels X -> U X U^dag and X -> V X V^dag.

    Equals 2 sqrt(1 - nu^2) with nu the distance from the origin to the convex hull
    of the eigenvalues of U^dag V; for eigenphases on an arc of length L this is
    2 sin(min(L, pi) / 2).
    """
    arc = eigenphase_arc(U, V)
    return float(2.0 * np.sin(min(arc, np.pi) / 2.0))


def phase_optimized_distance(U, V) -> float:
    """min over phi of ||U - e^{i phi} V|| in operator norm"""
    arc = eigenphase_arc(U, V)
    return float(2.0 * np.sin(arc / 4.0))


def diamond_distance_unitary_batch(Us: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Diamond distance between each unitary in a stack and a single V"""
    Us = np.asarray(Us, dtype=complex)
    V = as_matrix(V)
    W = np.einsum("nji,jk->nik", Us.conj(), V)
    d = V.shape[0]
    if d == 1:
        return np.zeros(len(Us))
    arcs = _minimal_arc(np.angle(np.linalg.eigvals(W)))
    return 2.0 * np.sin(np.minimum(arcs, np.pi) / 2.0)


def von_neumann_entropy(rho) -> float:
    """S(rho) = -Tr rho ln rho in nats"""
    rho = require_density(rho)
    evals = np.clip(np.linalg.eigvalsh((rho + rho.conj().T) / 2), EIGEN_CLIP, None)
    return float(entr(evals).sum())


def holevo_information(ensemble) -> float:
    """chi = S(sum w rho) - sum w S(rho), nats. Takes an Ensemble of states or (weight, rho) pairs."""
    from .models import Ensemble, EnsembleKind

    if not isinstance(ensemble, Ensemble):
        ensemble = Ensemble(members=[(float(w), as_matrix(rho)) for w, rho in ensemble])
    if ensemble.kind != EnsembleKind.STATES:
        raise NotDensity("holevo information needs an ensemble of states")
    weights = np.array([w for w, _ in ensemble.members], dtype=float)
    states = [require_density(rho, name=f"member {i}") for i, (_, rho) in enumerate(ensemble.members)]
    average = sum(w * rho for w, rho in zip(weights, states))
    average = average / np.trace(average).real
    chi = von_neumann_entropy(average) - sum(w * von_neumann_entropy(rho) for w, rho in zip(weights, states))
    return float(max(chi, 0.0) if chi > -1e-12 else chi)


def afw_check(rho, sigma, subspace_dim: Optional[int] = None) -> float:
    """
    Slack of the continuity bound |S(rho) - S(sigma)| <= ln(dim) * T + ln 2,
    with T the trace distance. The subspace dimension on which the states differ
    is taken from the caller; the full dimension is used when it is unknown.
    """
    rho = require_density(rho, "rho")
    sigma = require_density(sigma, "sigma")
    _same_shape(rho, sigma)
    dim = rho.shape[0] if subspace_dim is None else int(subspace_dim)
    gap = abs(von_neumann_entropy(rho) - von_neumann_entropy(sigma))
    return float(np.log(dim) * trace_distance(rho, sigma) + np.log(2.0) - gap)


def apply_local(op: np.ndarray, support: Sequence[int], matrix: np.ndarray, num_qubits: int) -> np.ndarray:
    """Left-multiply a (2^N x M) matrix by op acting on the ordered qubits `support`"""
    k = len(support)
    cols = matrix.shape[1]
    tensor = matrix.reshape([2] * num_qubits + [cols])
    op_t = np.asarray(op, dtype=complex).reshape([2] * (2 * k))
    tensor = np.tensordot(op_t, tensor, axes=(list(range(k, 2 * k)), list(support)))
    tensor = np.moveaxis(tensor, list(range(k)), list(support))
    return tensor.reshape(2 ** num_qubits, cols)


def embed_operator(op: np.ndarray, support: Sequence[int], num_qubits: int) -> np.ndarray:
    return apply_local(op, support, np.eye(2 ** num_qubits, dtype=complex), num_qubits)


def _check_support(support: Sequence[int], num_qubits: int) -> None:
    if num_qubits > get_settings().verify_max_qubits:
        raise TooLarge(f"dense Pauli operator on {num_qubits} qubits exceeds the guard")
    if len(set(support)) != len(support) or any(q < 0 or q >= num_qubits for q in support):
        raise DimensionMismatch(f"invalid support {list(support)} for N={num_qubits}")


def pauli_string_matrix(axis: str, support: Sequence[int], num_qubits: int) -> np.ndarray:
    """Tensor product of `axis` on the support qubits and identity elsewhere"""
    _check_support(support, num_qubits)
    axis = str(getattr(axis, "value", axis))
    factors = [PAULI[axis] if q in set(support) else PAULI["I"] for q in range(num_qubits)]
    out = np.array([[1.0 + 0j]])
    for f in factors:
        out = np.kron(out, f)
    return out


def pauli_rotation(axis: str, support: Sequence[int], theta: float, num_qubits: int) -> np.ndarray:
    """exp(i theta P) = cos(theta) I + i sin(theta) P for a Pauli string P"""
    P = pauli_string_matrix(axis, support, num_qubits)
    return np.cos(theta) * np.eye(P.shape[0]) + 1j * np.sin(theta) * P


def pauli_rotation_series(axis: str, support: Sequence[int], theta: float, num_qubits: int) -> np.ndarray:
    """Matrix-exponential evaluation of exp(i theta P), used as an independent check"""
    return expm(1j * theta * pauli_string_matrix(axis, support, num_qubits))


def apply_unitary(rho, U) -> np.ndarray:
    U = as_matrix(U)
    return U @ as_matrix(rho) @ U.conj().T


def apply_channel_depolarizing(rho, U, p: float) -> np.ndarray:
    """p U rho U^dag + (1 - p) Tr(rho) I / d"""
    if not 0.0 <= p <= 1.0:
        raise InvalidP(f"mixing coefficient must lie in [0, 1], got {p}")
    U = require_unitary(U)
    rho = as_matrix(rho)
    _same_shape(rho, U)
    d = U.shape[0]
    return p * apply_unitary(rho, U) + (1.0 - p) * np.trace(rho) * np.eye(d) / d


def choi_of(channel: Callable[[np.ndarray], np.ndarray], d: int) -> np.ndarray:
    """Assemble sum_mn |m><n| (x) channel(|m><n|)"""
    J = np.zeros((d * d, d * d), dtype=complex)
    for m in range(d):
        for n in range(d):
            basis = np.zeros((d, d), dtype=complex)
            basis[m, n] = 1.0
            J[m * d:(m + 1) * d, n * d:(n + 1) * d] = channel(basis)
    return J


def choi_of_unitary(U) -> np.ndarray:
    U = as_matrix(U)
    u = U.T.reshape(-1)
    return np.outer(u, u.conj())


def depolarizing_choi(d: int) -> np.ndarray:
    return np.eye(d * d, dtype=complex) / d


def max_entangled_choi(d: int) -> np.ndarray:
    return choi_of_unitary(np.eye(d))


def channel_output_distance(U, V, psi: np.ndarray) -> float:
    """Trace distance between (U (x) I)|psi> and (V (x) I)|psi> for a state on system (x) reference"""
    U, V = as_matrix(U), as_matrix(V)
    d = U.shape[0]
    psi = np.asarray(psi, dtype=complex).reshape(d, -1)
    a = (U @ psi).reshape(-1)
    b = (V @ psi).reshape(-1)
    overlap = abs(np.vdot(a, b)) ** 2
    return float(np.sqrt(max(0.0, 1.0 - overlap)))


def sum_pairwise(terms: np.ndarray) -> np.ndarray:
    """Pairwise summation along axis 0; order independent up to rounding of the fixed tree"""
    terms = np.asarray(terms)
    while len(terms) > 1:
        if len(terms) % 2:
            terms = np.concatenate([terms[:-2], (terms[-2] + terms[-1])[None]], axis=0)
        terms = terms[0::2] + terms[1::2]
    return terms[0] if len(terms) else terms
