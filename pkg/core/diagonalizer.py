"""
Quadratic Hamiltonians and their diagonalization by Bogoliubov maps.

H = sum h_ij a†_i a_j + 1/2 sum s (k_ij a†_i a†_j + conj(k_ij) a_j a_i),
with s = +1 for bosons and s = -1 for fermions. Its block matrix is
A_H = ((h, k), (conj k, conj h)) for bosons and ((h, -k), (conj k, -conj h))
for fermions.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Union

import numpy as np
from scipy.linalg import cholesky, eigh, eigvalsh, expm, solve_triangular, sqrtm

from core.bogoliubov import (
    DEFAULT_TOL,
    BogoliubovMap,
    Statistics,
    as_complex_matrix,
    matrix_norm,
    metric,
)
from core.errors import (
    BadCutoff,
    BadParameter,
    GramTooLarge,
    NoConvergence,
    NotPositive,
    OddKernel,
    SymmetryViolation,
)
from core.fock_space import multimode_annihilators
from core.mode_decomposition import canonical_basis, eigenvalue_clusters
from core.ren_sequence import Classification, RenSequence, Tail, classify_ren1

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class QuadraticHamiltonian:
    h: np.ndarray
    k: np.ndarray
    statistics: Statistics
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        h = as_complex_matrix(self.h, "h")
        k = as_complex_matrix(self.k, "k")
        statistics = Statistics.parse(self.statistics)
        if h.shape[0] != h.shape[1] or h.shape != k.shape:
            raise BadParameter(f"h and k must be square of equal size, got {h.shape} and {k.shape}")
        scale = self.tol * max(1.0, matrix_norm(h), matrix_norm(k))
        if matrix_norm(h - h.conj().T) > scale:
            raise SymmetryViolation("h is not Hermitian")
        sign = 1 if statistics is Statistics.BOSONIC else -1
        if matrix_norm(k - sign * k.T) > scale:
            expected = "symmetric" if sign == 1 else "antisymmetric"
            raise SymmetryViolation(f"k is not {expected}")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "statistics", statistics)

    @property
    def n(self) -> int:
        return self.h.shape[0]


def hamiltonian_to_blocks(ham: QuadraticHamiltonian) -> np.ndarray:
    """Block matrix A_H of the Hamiltonian."""
    h, k = ham.h, ham.k
    if ham.statistics is Statistics.BOSONIC:
        return np.block([[h, k], [k.conj(), h.conj()]])
    return np.block([[h, -k], [k.conj(), -h.conj()]])


def generator_matrix(ham: QuadraticHamiltonian) -> np.ndarray:
    """B_H = A_H S for bosons, A_H for fermions."""
    a_h = hamiltonian_to_blocks(ham)
    if ham.statistics is Statistics.BOSONIC:
        return a_h @ metric(Statistics.BOSONIC, ham.n)
    return a_h


@dataclass(frozen=True, eq=False)
class DiagonalizationResult:
    map: BogoliubovMap
    energies: np.ndarray
    residual: float

    @property
    def statistics(self) -> Statistics:
        return self.map.statistics


def _swap(n: int) -> np.ndarray:
    return np.block([[np.zeros((n, n)), np.eye(n)], [np.eye(n), np.zeros((n, n))]])


def _fix_phase(column: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry real and positive."""
    pivot = column[np.argmax(np.abs(column))]
    return column * (abs(pivot) / pivot) if pivot != 0 else column


def _split_blocks(a_h: np.ndarray) -> tuple:
    full = as_complex_matrix(a_h, "A_H")
    if full.shape[0] != full.shape[1] or full.shape[0] % 2:
        raise BadParameter(f"A_H must be an even square matrix, got shape {full.shape}")
    return full, full.shape[0] // 2


def _assemble(columns: List[np.ndarray], energies: np.ndarray, a_h: np.ndarray,
              statistics: Statistics, target: np.ndarray, tol: float) -> DiagonalizationResult:
    n = a_h.shape[0] // 2
    upper = np.column_stack(columns)
    full = np.hstack([upper, _swap(n) @ upper.conj()])
    bmap = BogoliubovMap(full[:n, :n], full[:n, n:], statistics)
    residual = matrix_norm(full.conj().T @ a_h @ full - target)
    threshold = 1e3 * tol * max(1.0, matrix_norm(a_h))
    if residual > threshold:
        raise NoConvergence(f"Diagonalization residual {residual:.3e} exceeds {threshold:.3e}")
    bmap = bmap.validate(max(tol, 1e3 * tol * max(1.0, matrix_norm(a_h))))
    logger.info(f"Diagonalized {n}-mode {statistics.value} Hamiltonian, residual {residual:.3e}")
    return DiagonalizationResult(bmap, energies, residual)


def diagonalize_bosonic(a_h, tol: float = DEFAULT_TOL) -> DiagonalizationResult:
    """
    Diagonalize a positive bosonic block matrix: V* A_H V = diag(E, E).

    Cholesky factor A_H = K* K, Hermitian eigenvectors W of K S K*, and
    T = K^-1 W |L|^(1/2), whose first n columns are (u; conj v).

    Raises:
        SymmetryViolation: A_H is not Hermitian or its lower blocks are not (conj k, conj h)
        NotPositive: h is not positive definite
        GramTooLarge: ||h^-1/2 k conj(h)^-1/2|| >= 1 - 10 tol
        NoConvergence: the assembled map misses the target diagonal
    """
    a_h, n = _split_blocks(a_h)
    scale = max(1.0, matrix_norm(a_h))
    if matrix_norm(a_h - a_h.conj().T) > tol * scale:
        raise SymmetryViolation("A_H is not Hermitian")
    swap = _swap(n)
    if matrix_norm(swap @ a_h.conj() @ swap - a_h) > tol * scale:
        raise SymmetryViolation("A_H lower blocks are not (conj k, conj h)")
    h, k = a_h[:n, :n], a_h[:n, n:]
    lowest = float(np.min(eigvalsh((h + h.conj().T) / 2))) if n else 1.0
    if lowest <= tol * max(1.0, matrix_norm(h)):
        raise NotPositive(f"h is not positive definite (lowest eigenvalue {lowest:.3e})")
    root = np.linalg.inv(sqrtm(h))
    gram = root @ k @ root.conj()
    gram_norm = matrix_norm(gram, "operator")
    logger.debug(f"Bosonic Gram norm ||G|| = {gram_norm:.6g}")
    if gram_norm >= 1 - 10 * tol:
        raise GramTooLarge(f"||h^-1/2 k h^-1/2|| = {gram_norm:.6g} is not below 1")

    s = metric(Statistics.BOSONIC, n)
    factor = cholesky((a_h + a_h.conj().T) / 2, lower=False)
    middle = factor @ s @ factor.conj().T
    values, vectors = eigh((middle + middle.conj().T) / 2)
    positive = np.where(values > 0)[0]
    if positive.size != n:
        raise NoConvergence(f"Expected {n} positive symplectic eigenvalues, found {positive.size}")
    order = positive[np.argsort(-values[positive], kind="stable")]
    columns_t = solve_triangular(factor, vectors[:, order] * np.sqrt(values[order]))
    energies = values[order]

    columns: List[np.ndarray] = []
    for cluster in eigenvalue_clusters(-energies):
        block = columns_t[:, cluster]
        # S-orthonormal, so the canonical candidates project through T T* S
        columns.extend(canonical_basis(block, metric=s) if cluster.size > 1 else [block[:, 0]])
    columns = [_fix_phase(c) for c in columns]
    energies = np.where(np.abs(energies) <= tol, 0.0, energies)
    target = np.diag(np.concatenate([energies, energies]))
    return _assemble(columns, energies, a_h, Statistics.BOSONIC, target, tol)


def diagonalize_fermionic(a_h, tol: float = DEFAULT_TOL) -> DiagonalizationResult:
    """
    Diagonalize a fermionic block matrix: V* A_H V = diag(E, -E), V unitary.

    Positive eigenvectors give the first block column directly; the kernel
    is split into (x, swap conj x) pairs built from vectors fixed by that
    antiunitary symmetry.

    Raises:
        OddKernel: the kernel has odd dimension
    """
    a_h, n = _split_blocks(a_h)
    scale = max(1.0, matrix_norm(a_h))
    if matrix_norm(a_h - a_h.conj().T) > tol * scale:
        raise SymmetryViolation("A_H is not Hermitian")
    swap = _swap(n)
    if matrix_norm(swap @ a_h.conj() @ swap + a_h) > tol * scale:
        raise SymmetryViolation("A_H lacks the particle-hole block structure")
    values, vectors = eigh((a_h + a_h.conj().T) / 2)
    zero = tol * scale
    positive = np.where(values > zero)[0]
    negative = np.where(values < -zero)[0]
    kernel = np.where(np.abs(values) <= zero)[0]
    if positive.size != negative.size or kernel.size % 2:
        raise OddKernel(f"Kernel of A_H has dimension {kernel.size} "
                        f"({positive.size} positive, {negative.size} negative eigenvalues)")

    order = positive[np.argsort(-values[positive], kind="stable")]
    energies = values[order]
    columns: List[np.ndarray] = []
    for cluster in eigenvalue_clusters(-energies):
        block = vectors[:, order[cluster]]
        columns.extend(_fix_phase(c) for c in canonical_basis(block))
    if kernel.size:
        columns.extend(_kernel_pairs(vectors[:, kernel], swap))
    energies = np.concatenate([energies, np.zeros(kernel.size // 2)])
    logger.debug(f"Fermionic spectrum: {positive.size} positive, kernel dimension {kernel.size}")
    target = np.diag(np.concatenate([energies, -energies]))
    return _assemble(columns, energies, a_h, Statistics.FERMIONIC, target, tol)


def _kernel_pairs(kernel: np.ndarray, swap: np.ndarray) -> List[np.ndarray]:
    """Vectors x with {x, swap conj x} an orthonormal basis of the kernel, input order."""
    dim = kernel.shape[1]
    projector = kernel @ kernel.conj().T
    real_basis: List[np.ndarray] = []
    for j in range(kernel.shape[0]):
        if len(real_basis) == dim:
            break
        x = projector[:, j]
        mirrored = swap @ x.conj()
        for candidate in (x + mirrored, 1j * (x - mirrored)):
            for r in real_basis:
                candidate = candidate - r * np.vdot(r, candidate).real
            norm = np.linalg.norm(candidate)
            if norm > 1e-6 and len(real_basis) < dim:
                real_basis.append(candidate / norm)
    if len(real_basis) < dim:
        raise OddKernel(f"Could only build {len(real_basis)} of {dim} symmetric kernel vectors")
    return [(real_basis[i] - 1j * real_basis[i + 1]) / np.sqrt(2) for i in range(0, dim, 2)]


def diagonalize(ham: QuadraticHamiltonian, tol: float = DEFAULT_TOL) -> DiagonalizationResult:
    a_h = hamiltonian_to_blocks(ham)
    if ham.statistics is Statistics.BOSONIC:
        return diagonalize_bosonic(a_h, tol)
    return diagonalize_fermionic(a_h, tol)


@dataclass(frozen=True)
class NormalOrderingConstant:
    sequence: RenSequence
    classification: Classification

    @property
    def value(self) -> Optional[complex]:
        return self.classification.value if self.classification.is_summable else None


def normal_ordering_constant(h_diag: Union[Callable, np.ndarray], energies: Union[Callable, np.ndarray],
                             tail: Optional[Tail] = None, horizon: int = 1_000_000,
                             name: str = "normal-ordering") -> NormalOrderingConstant:
    """
    c = 1/2 sum_j (E_j - h_jj) as a classified formal sum.

    Finite arrays give an exact Summable value; rules need `tail`, the
    declared decay of 1/2 (E_j - h_jj).
    """
    if callable(h_diag) != callable(energies):
        raise BadParameter("h_diag and energies must both be rules or both be tables")
    if callable(h_diag):
        def terms(j):
            return 0.5 * (np.asarray(energies(j)) - np.asarray(h_diag(j)))
        sequence = RenSequence(terms, tail or Tail.unknown(), name=name)
    else:
        h_values = np.asarray(h_diag, dtype=complex).ravel()
        e_values = np.asarray(energies, dtype=complex).ravel()
        if h_values.shape != e_values.shape:
            raise BadParameter(f"Got {h_values.size} diagonal entries but {e_values.size} energies")
        sequence = RenSequence(0.5 * (e_values - h_values), Tail.exact(), name=name)
    return NormalOrderingConstant(sequence, classify_ren1(sequence, horizon))


def normal_ordering_from_result(ham: QuadraticHamiltonian,
                                result: DiagonalizationResult) -> NormalOrderingConstant:
    """Finite constant 1/2 (tr E - tr h); modes beyond len(E) contribute -h_jj/2."""
    energies = np.zeros(ham.n)
    energies[:result.energies.size] = result.energies
    return normal_ordering_constant(np.real(np.diag(ham.h)), energies)


def heisenberg_flow(ham: QuadraticHamiltonian, t: float, tol: float = 1e-9) -> BogoliubovMap:
    """exp(i t B_H): the one-particle map of the Heisenberg dynamics generated by H."""
    flow = expm(1j * t * generator_matrix(ham))
    return BogoliubovMap.from_matrix(flow, ham.statistics, tol).validate(tol)


def hamiltonian_operator(ham: QuadraticHamiltonian, cutoff: int = 30) -> np.ndarray:
    """Second-quantized H on at most two truncated modes."""
    ops = _mode_ladder(ham, cutoff)
    sign = 1 if ham.statistics is Statistics.BOSONIC else -1
    dim = ops[0].shape[0] if ops else 1
    operator = np.zeros((dim, dim), dtype=complex)
    for i, ai in enumerate(ops):
        for j, aj in enumerate(ops):
            operator += ham.h[i, j] * ai.conj().T @ aj
            operator += 0.5 * sign * (ham.k[i, j] * ai.conj().T @ aj.conj().T
                                      + np.conj(ham.k[i, j]) * aj @ ai)
    return operator


def _mode_ladder(ham: QuadraticHamiltonian, cutoff: int) -> List[np.ndarray]:
    if ham.n > 2:
        raise BadParameter(f"Fock representation supports at most 2 modes, got {ham.n}")
    if ham.statistics is Statistics.BOSONIC and cutoff < 4:
        raise BadCutoff(f"Bosonic cutoff must be at least 4, got {cutoff}")
    return multimode_annihilators(ham.statistics, ham.n, cutoff)


def heisenberg_identity_check(ham: QuadraticHamiltonian, basis_index: Optional[int] = None,
                              cutoff: int = 30) -> float:
    """
    Largest deviation of A†(i B_H F) from i[H, A†(F)] for canonical generators F.

    A†(F) = sum f1_j a†_j + f2_j a_j. Bosonic comparisons only use states
    whose occupations stay at least three below the cutoff, where the
    truncated commutator is exact.

    Args:
        ham: Hamiltonian on one or two modes
        basis_index: Single generator to check (all 2n when None)
        cutoff: Bosonic truncation
    """
    ops = _mode_ladder(ham, cutoff)
    n = ham.n
    operator = hamiltonian_operator(ham, cutoff)
    generator = generator_matrix(ham)
    indices = range(2 * n) if basis_index is None else [basis_index]

    dim = operator.shape[0]
    if ham.statistics is Statistics.BOSONIC:
        digits = np.array([[(i // (cutoff + 1) ** m) % (cutoff + 1) for m in range(n)]
                           for i in range(dim)])
        columns = np.where(np.all(digits <= cutoff - 3, axis=1))[0]
    else:
        columns = np.arange(dim)

    def field(vector: np.ndarray) -> np.ndarray:
        return sum(vector[j] * ops[j].conj().T + vector[n + j] * ops[j] for j in range(n))

    worst = 0.0
    for index in indices:
        if not 0 <= index < 2 * n:
            raise BadParameter(f"Generator index {index} out of range for {n} modes")
        unit = np.zeros(2 * n, dtype=complex)
        unit[index] = 1.0
        lhs = field(1j * generator @ unit)
        created = field(unit)
        rhs = 1j * (operator @ created - created @ operator)
        worst = max(worst, matrix_norm((lhs - rhs)[:, columns]))
    logger.debug(f"Heisenberg identity residual {worst:.3e}")
    return worst
