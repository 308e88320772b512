"""
Bogoliubov transformations as complex block matrices.
Validates the defining relations, composes and adjoins maps, and converts
between the two linear block-matrix conventions.
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import unitary_group

from core.errors import (
    BadParameter,
    DimensionMismatch,
    NonFiniteEntry,
    NotValidated,
    StatisticsMismatch,
    SymmetryViolation,
    UnsupportedTarget,
)

logger = logging.getLogger(__name__)

# Default tolerance for analytically constructed maps
DEFAULT_TOL = 1e-10


class Statistics(str, Enum):
    """Particle statistics of the underlying mode algebra."""
    BOSONIC = "bosonic"
    FERMIONIC = "fermionic"

    @property
    def sign(self) -> int:
        """Sign in front of the v-terms of the relations (-1 bosonic, +1 fermionic)."""
        return -1 if self is Statistics.BOSONIC else 1

    @classmethod
    def parse(cls, value: Union[str, "Statistics"]) -> "Statistics":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise BadParameter(f"Unknown statistics '{value}'") from None


class RepresentationTag(str, Enum):
    """Block-matrix conventions a map can be written in."""
    L2_DIRECT_SUM = "l2_direct_sum"
    H_PLUS_HSTAR = "h_plus_hstar"
    W11 = "w11"

    @classmethod
    def parse(cls, value: Union[str, "RepresentationTag"]) -> "RepresentationTag":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise UnsupportedTarget(f"Unknown representation '{value}'") from None


def as_complex_matrix(value, name: str = "matrix") -> np.ndarray:
    """Copy `value` into a read-only finite complex 2-d array."""
    try:
        arr = np.array(value, dtype=complex)
    except (TypeError, ValueError) as e:
        raise DimensionMismatch(f"{name} is not a rectangular array: {e}") from None
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteEntry(f"{name} contains NaN or Inf entries")
    arr.setflags(write=False)
    return arr


def matrix_norm(matrix: np.ndarray, norm: str = "max") -> float:
    """Max-absolute-entry norm (default) or operator 2-norm."""
    if matrix.size == 0:
        return 0.0
    if norm == "max":
        return float(np.max(np.abs(matrix)))
    if norm == "operator":
        return float(np.linalg.norm(matrix, 2))
    raise BadParameter(f"Unknown norm '{norm}', expected 'max' or 'operator'")


@dataclass(frozen=True)
class GeneralizedVector:
    """Coefficients (f1, f2) of a†(f1) + a(conj f2) in the canonical basis."""
    f1: np.ndarray
    f2: np.ndarray

    def __post_init__(self):
        f1 = np.array(self.f1, dtype=complex).ravel()
        f2 = np.array(self.f2, dtype=complex).ravel()
        if f1.shape != f2.shape:
            raise DimensionMismatch(f"Components differ in length: {f1.size} vs {f2.size}")
        object.__setattr__(self, "f1", f1)
        object.__setattr__(self, "f2", f2)

    @property
    def n(self) -> int:
        return self.f1.size

    @classmethod
    def basis(cls, n: int, index: int) -> "GeneralizedVector":
        """Canonical generator: (e_index, 0) for index < n, else (0, e_{index-n})."""
        if not 0 <= index < 2 * n:
            raise BadParameter(f"Basis index {index} out of range for {n} modes")
        flat = np.zeros(2 * n, dtype=complex)
        flat[index] = 1.0
        return cls(flat[:n], flat[n:])

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.f1, self.f2])


@dataclass(frozen=True)
class RelationReport:
    """Residuals of the four Bogoliubov relations."""
    residuals: Tuple[float, float, float, float]
    tolerance: float
    norm: str = "max"

    @property
    def max_residual(self) -> float:
        return max(self.residuals)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "residuals": list(self.residuals),
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "norm": self.norm,
            "passed": self.passed,
        }


@dataclass(frozen=True, eq=False)
class BogoliubovMap:
    """
    Transformation V = ((u, v), (conj v, conj u)) acting on (f1, f2).

    The creation operator b†(f) equals a†(u f) + a(v conj f).
    """
    u: np.ndarray
    v: np.ndarray
    statistics: Statistics
    validated: bool = False

    def __post_init__(self):
        u = as_complex_matrix(self.u, "u")
        v = as_complex_matrix(self.v, "v")
        if u.shape[0] != u.shape[1]:
            raise DimensionMismatch(f"u must be square, got shape {u.shape}")
        if u.shape != v.shape:
            raise DimensionMismatch(f"u and v differ in shape: {u.shape} vs {v.shape}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "statistics", Statistics.parse(self.statistics))

    @property
    def n(self) -> int:
        return self.u.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        """The 2n x 2n block matrix acting on l2 + l2."""
        return np.block([[self.u, self.v], [self.v.conj(), self.u.conj()]])

    def validate(self, tol: float = DEFAULT_TOL) -> "BogoliubovMap":
        """Return a copy marked validated, or raise NotValidated."""
        if self.validated:
            return self
        report = validate_bogoliubov(self, tol)
        if not report.passed:
            raise NotValidated(
                f"Relation residual {report.max_residual:.3e} exceeds tolerance {tol:.3e}"
            )
        return replace(self, validated=True)

    @classmethod
    def from_matrix(cls, matrix, statistics: Union[str, Statistics],
                    tol: float = DEFAULT_TOL) -> "BogoliubovMap":
        """Repack a 2n x 2n matrix, checking its conjugate block structure."""
        full = as_complex_matrix(matrix, "matrix")
        if full.shape[0] != full.shape[1] or full.shape[0] % 2:
            raise DimensionMismatch(f"Expected an even square matrix, got shape {full.shape}")
        n = full.shape[0] // 2
        candidate = cls(full[:n, :n], full[:n, n:], statistics)
        deviation = matrix_norm(candidate.matrix - full)
        if deviation > tol * max(1.0, matrix_norm(full)):
            raise SymmetryViolation(
                f"Lower blocks are not the conjugates of the upper blocks (deviation {deviation:.3e})"
            )
        return candidate

    @classmethod
    def identity(cls, n: int, statistics: Union[str, Statistics]) -> "BogoliubovMap":
        return cls(np.eye(n), np.zeros((n, n)), statistics, validated=True)

    @classmethod
    def rotation(cls, w, statistics: Union[str, Statistics]) -> "BogoliubovMap":
        """One-particle unitary w, no mixing of creators and annihilators."""
        w = as_complex_matrix(w, "w")
        return cls(w, np.zeros_like(w), statistics)

    @classmethod
    def squeeze(cls, xi: Union[float, Sequence[float]], phase: float = 0.0) -> "BogoliubovMap":
        """Independent single-mode bosonic squeezes (cosh xi_j, e^{i phase} sinh xi_j)."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        return cls(np.diag(np.cosh(xi)), np.diag(np.exp(1j * phase) * np.sinh(xi)),
                   Statistics.BOSONIC)

    @classmethod
    def pair_squeeze(cls, n: int, i: int, j: int, xi: float,
                     phase: float = 0.0) -> "BogoliubovMap":
        """Two-mode bosonic squeeze coupling modes i != j."""
        _check_pair(n, i, j)
        u = np.eye(n, dtype=complex)
        v = np.zeros((n, n), dtype=complex)
        u[i, i] = u[j, j] = np.cosh(xi)
        v[i, j] = v[j, i] = np.exp(1j * phase) * np.sinh(xi)
        return cls(u, v, Statistics.BOSONIC)

    @classmethod
    def pair_rotation(cls, n: int, i: int, j: int, theta: float,
                      phase: float = 0.0) -> "BogoliubovMap":
        """Fermionic pairing rotation of modes i != j by angle theta."""
        _check_pair(n, i, j)
        u = np.eye(n, dtype=complex)
        v = np.zeros((n, n), dtype=complex)
        u[i, i] = u[j, j] = np.cos(theta)
        v[i, j] = np.exp(1j * phase) * np.sin(theta)
        v[j, i] = -v[i, j]
        return cls(u, v, Statistics.FERMIONIC)

    @classmethod
    def particle_hole(cls, n: int, modes: Iterable[int], phase: float = 0.0) -> "BogoliubovMap":
        """Fermionic particle-hole swap on the listed modes."""
        u = np.eye(n, dtype=complex)
        v = np.zeros((n, n), dtype=complex)
        for j in modes:
            u[j, j] = 0.0
            v[j, j] = np.exp(1j * phase)
        return cls(u, v, Statistics.FERMIONIC)


def _check_pair(n: int, i: int, j: int):
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise BadParameter(f"Need two distinct modes below {n}, got ({i}, {j})")


def _require_same_shape(a: BogoliubovMap, b: BogoliubovMap):
    if a.n != b.n:
        raise DimensionMismatch(f"Maps act on {a.n} and {b.n} modes")
    if a.statistics is not b.statistics:
        raise StatisticsMismatch(f"Cannot combine {a.statistics.value} and {b.statistics.value} maps")


def validate_bogoliubov(bmap: BogoliubovMap, tol: float = DEFAULT_TOL,
                        norm: str = "max") -> RelationReport:
    """
    Check the four Bogoliubov relations.

    Args:
        bmap: Map to check
        tol: Tolerance on the largest residual
        norm: 'max' (largest entry) or 'operator'

    Returns:
        RelationReport with one residual per relation
    """
    if not tol > 0:
        raise BadParameter(f"Tolerance must be positive, got {tol}")
    u, v = bmap.u, bmap.v
    s = bmap.statistics.sign
    eye = np.eye(bmap.n)
    deviations = (
        u.conj().T @ u + s * (v.T @ v.conj()) - eye,
        u.conj().T @ v + s * (v.T @ u.conj()),
        u @ u.conj().T + s * (v @ v.conj().T) - eye,
        u @ v.T + s * (v @ u.T),
    )
    residuals = tuple(matrix_norm(d, norm) for d in deviations)
    report = RelationReport(residuals, tol, norm)
    logger.debug(f"Relation residuals for {bmap.n}-mode {bmap.statistics.value} map: {residuals}")
    return report


def adjoint(bmap: BogoliubovMap) -> BogoliubovMap:
    """V* written again in block form: blocks (u*, v^T)."""
    return BogoliubovMap(bmap.u.conj().T, bmap.v.T, bmap.statistics)


def compose(a: BogoliubovMap, b: BogoliubovMap) -> BogoliubovMap:
    """Block product A B of the two 2n x 2n matrices."""
    _require_same_shape(a, b)
    n = a.n
    product = a.matrix @ b.matrix
    return BogoliubovMap(product[:n, :n], product[:n, n:], a.statistics)


def apply_to_generator(bmap: BogoliubovMap, vector: GeneralizedVector) -> GeneralizedVector:
    """Coefficients of the transformed generator in the original a†/a basis."""
    if vector.n != bmap.n:
        raise DimensionMismatch(f"Vector has {vector.n} components, map acts on {bmap.n} modes")
    u, v = bmap.u, bmap.v
    return GeneralizedVector(u @ vector.f1 + v @ vector.f2,
                             v.conj() @ vector.f1 + u.conj() @ vector.f2)


def convert_representation(bmap: BogoliubovMap,
                           target: Union[str, RepresentationTag]) -> np.ndarray:
    """
    Write the map as a 2n x 2n matrix in the requested convention.

    L2_DIRECT_SUM is ((u, v), (conj v, conj u)). H_PLUS_HSTAR records the
    off-diagonal blocks through the conjugation J, so they appear as
    ((u, conj v), (v, conj u)). W11 is nonlinear and has no matrix.
    """
    target = RepresentationTag.parse(target)
    if target is RepresentationTag.L2_DIRECT_SUM:
        return bmap.matrix
    if target is RepresentationTag.H_PLUS_HSTAR:
        return np.block([[bmap.u, bmap.v.conj()], [bmap.v, bmap.u.conj()]])
    raise UnsupportedTarget("The real-linear W11 representation is not linear over C")


def from_representation(matrix, source: Union[str, RepresentationTag],
                        statistics: Union[str, Statistics],
                        tol: float = DEFAULT_TOL) -> BogoliubovMap:
    """Inverse of convert_representation."""
    source = RepresentationTag.parse(source)
    if source is RepresentationTag.L2_DIRECT_SUM:
        return BogoliubovMap.from_matrix(matrix, statistics, tol)
    if source is RepresentationTag.H_PLUS_HSTAR:
        full = as_complex_matrix(matrix, "matrix")
        if full.shape[0] != full.shape[1] or full.shape[0] % 2:
            raise DimensionMismatch(f"Expected an even square matrix, got shape {full.shape}")
        n = full.shape[0] // 2
        candidate = BogoliubovMap(full[:n, :n], full[:n, n:].conj(), statistics)
        deviation = matrix_norm(convert_representation(candidate, source) - full)
        if deviation > tol * max(1.0, matrix_norm(full)):
            raise SymmetryViolation(f"Matrix is not in h+h* block form (deviation {deviation:.3e})")
        return candidate
    raise UnsupportedTarget("The real-linear W11 representation is not linear over C")


def metric(statistics: Union[str, Statistics], n: int) -> np.ndarray:
    """S = diag(1, -1) for bosons, the identity for fermions."""
    if Statistics.parse(statistics) is Statistics.BOSONIC:
        return np.diag(np.concatenate([np.ones(n), -np.ones(n)]))
    return np.eye(2 * n)


def symplectic_residual(bmap: BogoliubovMap) -> float:
    """Largest entry of V* S V - S; zero exactly when the relations hold."""
    s = metric(bmap.statistics, bmap.n)
    full = bmap.matrix
    return matrix_norm(full.conj().T @ s @ full - s)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    if n == 1:
        return np.array([[np.exp(1j * rng.uniform(0, 2 * np.pi))]])
    return unitary_group.rvs(n, random_state=rng)


def random_map(n: int, statistics: Union[str, Statistics], layers: int = 3,
               rng: Optional[np.random.Generator] = None,
               strength: float = 0.8) -> BogoliubovMap:
    """
    Compose random elementary maps into a valid Bogoliubov transformation.

    Args:
        n: Number of modes
        statistics: Bosonic or fermionic
        layers: Number of (rotation, mixing) layers
        rng: Random generator (a fresh default_rng when None)
        strength: Upper bound for squeeze parameters and pairing angles

    Returns:
        Composite map; relation residuals stay at rounding level
    """
    statistics = Statistics.parse(statistics)
    rng = rng if rng is not None else np.random.default_rng()
    result = BogoliubovMap.identity(n, statistics)
    for _ in range(layers):
        result = compose(result, BogoliubovMap.rotation(random_unitary(n, rng), statistics))
        if statistics is Statistics.BOSONIC:
            mixer = BogoliubovMap.squeeze(rng.uniform(0, strength, n), rng.uniform(0, 2 * np.pi))
            if n > 1:
                i, j = rng.choice(n, size=2, replace=False)
                mixer = compose(mixer, BogoliubovMap.pair_squeeze(
                    n, int(i), int(j), rng.uniform(0, strength), rng.uniform(0, 2 * np.pi)))
        elif n > 1:
            i, j = rng.choice(n, size=2, replace=False)
            mixer = BogoliubovMap.pair_rotation(
                n, int(i), int(j), rng.uniform(0, strength * np.pi / 2), rng.uniform(0, 2 * np.pi))
        else:
            flip = [0] if rng.uniform() < 0.5 else []
            mixer = BogoliubovMap.particle_hole(1, flip, rng.uniform(0, 2 * np.pi))
        result = compose(result, mixer)
    return result
