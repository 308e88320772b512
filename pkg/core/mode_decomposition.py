"""
Mode decomposition of Bogoliubov transformations.

The antilinear operator C = u* v J is stored as the matrix M = u* v with
C x = M conj(x). Bosonic maps split into independent squeezed modes,
fermionic maps into invariant modes, particle-hole modes and Cooper pairs.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Union

import numpy as np
from scipy.linalg import eigh

from core.bogoliubov import DEFAULT_TOL, BogoliubovMap, Statistics, matrix_norm
from core.errors import DegenerateBasis, NotBosonic, NotFermionic, UnpairedEigenvector

logger = logging.getLogger(__name__)

# Projected candidates shorter than this are treated as linearly dependent
CANDIDATE_THRESHOLD = 1e-6


@dataclass(frozen=True, eq=False)
class BosonicMode:
    """u f = mu g and v conj(f) = nu g, with mu**2 - nu**2 = 1."""
    index: int
    mu: float
    nu: float
    f: Optional[np.ndarray] = None
    g: Optional[np.ndarray] = None

    @classmethod
    def from_squeeze(cls, xi: float, index: int = 0) -> "BosonicMode":
        return cls(index, float(np.cosh(xi)), float(np.sinh(xi)))

    @property
    def t(self) -> float:
        """nu / (2 mu), the vacuum expansion parameter."""
        return self.nu / (2.0 * self.mu)

    @property
    def xi(self) -> float:
        return float(np.arcsinh(self.nu))


class FermionicKind(str, Enum):
    INVARIANT = "invariant"
    PARTICLE_HOLE = "particle_hole"
    COOPER_PAIR = "cooper_pair"


@dataclass(frozen=True, eq=False)
class FermionicMode:
    """
    One fermionic mode or mode pair.

    Invariant:    u f = eta,          v conj(f) = 0
    ParticleHole: u f = 0,            v conj(f) = eta
    CooperPair:   u f_e = alpha eta_e, u f_o = alpha eta_o,
                  v conj(f_e) = beta eta_o, v conj(f_o) = -beta eta_e
    """
    kind: FermionicKind
    index: int = 0
    alpha: float = 1.0
    beta: float = 0.0
    f: Optional[np.ndarray] = None
    eta: Optional[np.ndarray] = None
    f_odd: Optional[np.ndarray] = None
    eta_odd: Optional[np.ndarray] = None

    @classmethod
    def invariant(cls, index: int = 0) -> "FermionicMode":
        return cls(FermionicKind.INVARIANT, index, 1.0, 0.0)

    @classmethod
    def particle_hole(cls, index: int = 0) -> "FermionicMode":
        return cls(FermionicKind.PARTICLE_HOLE, index, 0.0, 1.0)

    @classmethod
    def cooper_pair(cls, alpha: float, beta: float, index: int = 0) -> "FermionicMode":
        return cls(FermionicKind.COOPER_PAIR, index, float(alpha), float(beta))

    @classmethod
    def from_angle(cls, xi: float, index: int = 0) -> "FermionicMode":
        """Cooper pair with alpha = cos xi, beta = sin xi."""
        return cls.cooper_pair(np.cos(xi), np.sin(xi), index)

    @property
    def xi(self) -> float:
        return float(np.arctan2(self.beta, self.alpha))

    @property
    def size(self) -> int:
        """Number of one-particle modes this entry occupies."""
        return 2 if self.kind is FermionicKind.COOPER_PAIR else 1


Mode = Union[BosonicMode, FermionicMode]


@dataclass(frozen=True, eq=False)
class ModeDecomposition:
    statistics: Statistics
    modes: List[Mode]
    residual: float
    n: int

    def __len__(self) -> int:
        return len(self.modes)

    def count(self, kind: FermionicKind) -> int:
        return sum(1 for m in self.modes if getattr(m, "kind", None) is kind)


def build_C(bmap: BogoliubovMap, tol: float = DEFAULT_TOL) -> np.ndarray:
    """
    Linear part M of C = u* v J, so that C x = M conj(x).

    Raises:
        NotValidated: the map fails the Bogoliubov relations
    """
    bmap = bmap.validate(tol)
    return bmap.u.conj().T @ bmap.v


def c_asymmetry(m: np.ndarray, statistics: Statistics) -> float:
    """Distance of M from symmetric (bosonic) or antisymmetric (fermionic) form."""
    if Statistics.parse(statistics) is Statistics.BOSONIC:
        return matrix_norm(m - m.T)
    return matrix_norm(m + m.T)


def eigenvalue_clusters(values: np.ndarray, rel_tol: float = 1e-9) -> List[np.ndarray]:
    """Group indices of sorted eigenvalues whose neighbours lie within rel_tol."""
    if values.size == 0:
        return []
    clusters = [[0]]
    for i in range(1, values.size):
        prev = values[clusters[-1][-1]]
        if abs(values[i] - prev) <= rel_tol * max(1.0, abs(prev)):
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return [np.array(c) for c in clusters]


def canonical_basis(subspace: np.ndarray, metric: Optional[np.ndarray] = None,
                    existing: Optional[List[np.ndarray]] = None) -> List[np.ndarray]:
    """
    Orthonormal basis of span(subspace) built from projected unit vectors in input order.

    The columns of `subspace` must be orthonormal for the inner product
    x* metric y (identity when omitted), with positive norms.
    """
    dim = subspace.shape[1]
    size = subspace.shape[0]
    s = np.eye(size) if metric is None else metric
    chosen: List[np.ndarray] = []
    against = list(existing or [])
    for j in range(size):
        if len(chosen) == dim:
            break
        x = subspace @ (subspace.conj().T @ s[:, j])
        for c in against + chosen:
            x = x - c * (c.conj() @ s @ x)
        norm2 = float(np.real(x.conj() @ s @ x))
        if norm2 > CANDIDATE_THRESHOLD ** 2:
            chosen.append(x / np.sqrt(norm2))
    if len(chosen) < dim:
        raise DegenerateBasis(f"Only {len(chosen)} of {dim} basis vectors could be orthonormalized")
    return chosen


def _orthonormality_error(vectors: List[np.ndarray]) -> float:
    if not vectors:
        return 0.0
    stack = np.column_stack(vectors)
    return matrix_norm(stack.conj().T @ stack - np.eye(len(vectors)))


def decompose_bosonic(bmap: BogoliubovMap, tol: float = DEFAULT_TOL) -> ModeDecomposition:
    """
    Split a bosonic map into independent modes.

    The symmetric M = A + iB becomes the real symmetric ((A, B), (B, -A)),
    whose eigenvectors (x; y) with eigenvalue sigma > 0 give solutions
    f = x + iy of M conj(f) = sigma f; sigma = mu nu.

    Args:
        bmap: Bosonic map
        tol: Validation tolerance

    Returns:
        ModeDecomposition with modes sorted by descending |nu|
    """
    if bmap.statistics is not Statistics.BOSONIC:
        raise NotBosonic("decompose_bosonic needs a bosonic map")
    m = build_C(bmap, tol)
    n = bmap.n
    a, b = m.real, m.imag
    real_form = np.block([[a, b], [b, -a]])
    real_form = (real_form + real_form.T) / 2
    sigma, vectors = eigh(real_form)
    zero = max(tol, 1e-12 * matrix_norm(m))

    f_vectors: List[np.ndarray] = []
    positive = np.where(sigma > zero)[0]
    for cluster in eigenvalue_clusters(sigma[positive]):
        block = vectors[:, positive[cluster]]
        for w in canonical_basis(block):
            f_vectors.append(w[:n] + 1j * w[n:])
    logger.debug(f"Bosonic decomposition: {len(f_vectors)} squeezed modes of {n}")

    zero_modes = canonical_basis(_complement(f_vectors, n))
    modes = []
    for f in f_vectors + zero_modes:
        uf = bmap.u @ f
        mu = float(np.linalg.norm(uf))
        g = uf / mu
        nu = float(np.real(np.vdot(g, bmap.v @ f.conj())))
        modes.append(BosonicMode(0, mu, nu, f, g))
    modes.sort(key=lambda mode: -abs(mode.nu))
    modes = [BosonicMode(i, m_.mu, m_.nu, m_.f, m_.g) for i, m_ in enumerate(modes)]

    error = max(_orthonormality_error([m_.f for m_ in modes]),
                _orthonormality_error([m_.g for m_ in modes]))
    if error > np.sqrt(tol):
        raise DegenerateBasis(f"Mode vectors deviate from orthonormality by {error:.3e}")
    decomposition = ModeDecomposition(Statistics.BOSONIC, modes, 0.0, n)
    return check_reconstruction(decomposition, bmap, tol)


def _complement(vectors: List[np.ndarray], n: int) -> np.ndarray:
    """Orthonormal columns spanning the complement of `vectors`."""
    if not vectors:
        return np.eye(n, dtype=complex)
    stack = np.column_stack(vectors)
    projector = np.eye(n) - stack @ stack.conj().T
    values, basis = eigh((projector + projector.conj().T) / 2)
    return basis[:, values > 0.5]


def decompose_fermionic(bmap: BogoliubovMap, tol: float = DEFAULT_TOL) -> ModeDecomposition:
    """
    Split a fermionic map into invariant modes, particle-hole modes and Cooper pairs.

    Eigenspaces of u*u with eigenvalue 1 are invariant, with eigenvalue 0
    particle-hole; the remaining eigenspaces pair up through
    f_odd ~ M conj(f_even).

    Raises:
        UnpairedEigenvector: an eigenspace with 0 < mu**2 < 1 has odd dimension
    """
    if bmap.statistics is not Statistics.FERMIONIC:
        raise NotFermionic("decompose_fermionic needs a fermionic map")
    m = build_C(bmap, tol)
    n = bmap.n
    u, v = bmap.u, bmap.v
    gram = u.conj().T @ u
    mu2, vectors = eigh((gram + gram.conj().T) / 2)
    zero = max(tol, 1e-12 * matrix_norm(m))

    invariant = np.where(mu2 >= 1 - zero)[0]
    holes = np.where(mu2 <= zero)[0]
    paired = np.where((mu2 > zero) & (mu2 < 1 - zero))[0]

    modes: List[FermionicMode] = []
    if holes.size:
        for f in canonical_basis(vectors[:, holes]):
            modes.append(FermionicMode(FermionicKind.PARTICLE_HOLE, 0, 0.0, 1.0,
                                       f, v @ f.conj()))
    pairs: List[FermionicMode] = []
    for cluster in eigenvalue_clusters(mu2[paired]):
        block = vectors[:, paired[cluster]]
        if block.shape[1] % 2:
            raise UnpairedEigenvector(
                f"Eigenspace of u*u at {mu2[paired[cluster[0]]]:.6g} has odd dimension {block.shape[1]}"
            )
        pairs.extend(_pair_cluster(block, m, u, v))
    pairs.sort(key=lambda mode: -mode.beta)
    modes.extend(pairs)
    if invariant.size:
        for f in canonical_basis(vectors[:, invariant]):
            uf = u @ f
            modes.append(FermionicMode(FermionicKind.INVARIANT, 0, 1.0, 0.0,
                                       f, uf / np.linalg.norm(uf)))
    modes = [FermionicMode(mode.kind, i, mode.alpha, mode.beta, mode.f, mode.eta,
                           mode.f_odd, mode.eta_odd) for i, mode in enumerate(modes)]
    logger.debug(f"Fermionic decomposition: {holes.size} particle-hole, {len(pairs)} pairs, "
                 f"{invariant.size} invariant")

    inputs, outputs = [], []
    for mode in modes:
        inputs.extend([mode.f] + ([mode.f_odd] if mode.f_odd is not None else []))
        outputs.extend([mode.eta] + ([mode.eta_odd] if mode.eta_odd is not None else []))
    error = max(_orthonormality_error(inputs), _orthonormality_error(outputs))
    if error > np.sqrt(tol):
        raise DegenerateBasis(f"Mode vectors deviate from orthonormality by {error:.3e}")
    decomposition = ModeDecomposition(Statistics.FERMIONIC, modes, 0.0, n)
    return check_reconstruction(decomposition, bmap, tol)


def _pair_cluster(block: np.ndarray, m: np.ndarray, u: np.ndarray,
                  v: np.ndarray) -> List[FermionicMode]:
    """Cooper pairs spanning one eigenspace of u*u, seeded in input order."""
    dim = block.shape[1]
    chosen: List[np.ndarray] = []
    pairs = []
    for j in range(block.shape[0]):
        if len(chosen) == dim:
            break
        x = block @ block.conj()[j, :]
        for c in chosen:
            x = x - c * np.vdot(c, x)
        norm = np.linalg.norm(x)
        if norm <= CANDIDATE_THRESHOLD:
            continue
        f_even = x / norm
        f_odd = m @ f_even.conj()
        for c in chosen + [f_even]:
            f_odd = f_odd - c * np.vdot(c, f_odd)
        f_odd = f_odd / np.linalg.norm(f_odd)
        chosen.extend([f_even, f_odd])

        alpha = float(np.linalg.norm(u @ f_even))
        eta_even = u @ f_even / alpha
        eta_odd = u @ f_odd / alpha
        beta = float(np.real(np.vdot(eta_odd, v @ f_even.conj())))
        pairs.append(FermionicMode(FermionicKind.COOPER_PAIR, 0, alpha, beta,
                                   f_even, eta_even, f_odd, eta_odd))
    if len(chosen) < dim:
        raise DegenerateBasis(f"Only {len(chosen)} of {dim} paired vectors could be built")
    return pairs


def reconstruct(decomposition: ModeDecomposition) -> BogoliubovMap:
    """Assemble (u, v) from the mode vectors and parameters."""
    n = decomposition.n
    u = np.zeros((n, n), dtype=complex)
    v = np.zeros((n, n), dtype=complex)
    for mode in decomposition.modes:
        if isinstance(mode, BosonicMode):
            u += mode.mu * np.outer(mode.g, mode.f.conj())
            v += mode.nu * np.outer(mode.g, mode.f)
        elif mode.kind is FermionicKind.INVARIANT:
            u += np.outer(mode.eta, mode.f.conj())
        elif mode.kind is FermionicKind.PARTICLE_HOLE:
            v += np.outer(mode.eta, mode.f)
        else:
            u += mode.alpha * (np.outer(mode.eta, mode.f.conj())
                               + np.outer(mode.eta_odd, mode.f_odd.conj()))
            v += mode.beta * (np.outer(mode.eta_odd, mode.f) - np.outer(mode.eta, mode.f_odd))
    return BogoliubovMap(u, v, decomposition.statistics)


def check_reconstruction(decomposition: ModeDecomposition, bmap: BogoliubovMap,
                         tol: float = DEFAULT_TOL) -> ModeDecomposition:
    """
    Attach the reconstruction residual of `decomposition` against `bmap`.

    Raises:
        DegenerateBasis: the modes rebuild the map only to worse than sqrt(tol)
    """
    rebuilt = reconstruct(decomposition)
    residual = max(matrix_norm(rebuilt.u - bmap.u), matrix_norm(rebuilt.v - bmap.v))
    if residual > np.sqrt(tol):
        raise DegenerateBasis(f"Modes rebuild the map with residual {residual:.3e}")
    if residual > 10 * tol:
        logger.warning(f"Reconstruction residual {residual:.3e} exceeds {10 * tol:.3e}")
    return ModeDecomposition(decomposition.statistics, decomposition.modes, residual,
                             decomposition.n)


def decompose(bmap: BogoliubovMap, tol: float = DEFAULT_TOL) -> ModeDecomposition:
    if bmap.statistics is Statistics.BOSONIC:
        return decompose_bosonic(bmap, tol)
    return decompose_fermionic(bmap, tol)
