"""
Truncated single-mode and two-mode Fock spaces.

Bosonic modes keep occupations 0..cutoff; fermionic modes are exact.
Two fermionic modes use the occupation index n1 + 2 n2 with
a1 = Z (x) a and a2 = a (x) I, so a2† a1† |00> = +|11>.
"""

import logging
from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, List, Optional, Union

import numpy as np
from scipy.linalg import eigh, expm
from scipy.special import gammaln

from core.bogoliubov import Statistics
from core.errors import BadCutoff, BadParameter, PrereqFailed
from core.mode_decomposition import BosonicMode, FermionicKind, FermionicMode
from core.ren_sequence import evaluate_terms

logger = logging.getLogger(__name__)

PAULI_Z = np.diag([1.0, -1.0]).astype(complex)
FERMION_A = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)

Target = Union[float, BosonicMode, FermionicMode]


@dataclass(frozen=True, eq=False)
class TruncatedModeSpace:
    statistics: Statistics
    cutoff: int
    a: np.ndarray
    adag: np.ndarray
    N: np.ndarray

    @property
    def dim(self) -> int:
        return self.cutoff + 1

    def vacuum(self) -> np.ndarray:
        state = np.zeros(self.dim, dtype=complex)
        state[0] = 1.0
        return state


def mode_operators(statistics: Union[str, Statistics], cutoff: int = 1) -> TruncatedModeSpace:
    """
    Ladder matrices a|n> = sqrt(n)|n-1>, a†|n> = sqrt(n+1)|n+1>, truncated at `cutoff`.

    Fermionic spaces are always two-dimensional.
    """
    statistics = Statistics.parse(statistics)
    if statistics is Statistics.FERMIONIC:
        cutoff = 1
    elif int(cutoff) != cutoff or cutoff < 1:
        raise BadCutoff(f"Bosonic cutoff must be an integer >= 1, got {cutoff}")
    cutoff = int(cutoff)
    a = np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), k=1).astype(complex)
    adag = a.conj().T
    return TruncatedModeSpace(statistics, cutoff, a, adag, adag @ a)


def pair_operators() -> List[np.ndarray]:
    """Annihilators (a1, a2) on the 4-dim space of a fermionic mode pair."""
    return multimode_annihilators(Statistics.FERMIONIC, 2)


def multimode_annihilators(statistics: Union[str, Statistics], modes: int,
                           cutoff: int = 1) -> List[np.ndarray]:
    """
    Annihilators on the tensor product of `modes` single-mode spaces.

    Mode j is digit j of the occupation index. Fermionic operators carry a
    Jordan-Wigner string of Z on all higher modes.
    """
    statistics = Statistics.parse(statistics)
    space = mode_operators(statistics, cutoff)
    eye = np.eye(space.dim, dtype=complex)
    string = PAULI_Z if statistics is Statistics.FERMIONIC else eye
    operators = []
    for j in range(modes):
        # kron order runs from the highest mode down to mode 0
        factors = [string] * (modes - 1 - j) + [space.a] + [eye] * j
        operators.append(reduce(np.kron, factors))
    return operators


def _unitary_exp(generator: np.ndarray) -> np.ndarray:
    """exp(G) for skew-Hermitian G through the Hermitian eigenproblem of iG."""
    hermitian = 1j * generator
    values, vectors = eigh((hermitian + hermitian.conj().T) / 2)
    return (vectors * np.exp(-1j * values)) @ vectors.conj().T


def build_implementer_bosonic(xi: float, cutoff: int) -> np.ndarray:
    """exp(-(xi/2)(a†² - a²)) on the truncated space; U a U* = cosh xi a + sinh xi a†."""
    space = mode_operators(Statistics.BOSONIC, cutoff)
    generator = -(xi / 2.0) * (space.adag @ space.adag - space.a @ space.a)
    return _unitary_exp(generator)


def build_implementer_fermionic(mode: FermionicMode) -> np.ndarray:
    """
    Per-mode implementer.

    Invariant gives the 2x2 identity, ParticleHole gives a + a†, a Cooper
    pair gives exp(-xi (a2† a1† - a1 a2)) with sin xi = beta on the pair space.
    """
    if mode.kind is FermionicKind.INVARIANT:
        return np.eye(2, dtype=complex)
    if mode.kind is FermionicKind.PARTICLE_HOLE:
        return FERMION_A + FERMION_A.conj().T
    a1, a2 = pair_operators()
    generator = -mode.xi * (a2.conj().T @ a1.conj().T - a1 @ a2)
    return expm(generator)


def implementer(target: Target, cutoff: int = 40) -> np.ndarray:
    if isinstance(target, FermionicMode):
        return build_implementer_fermionic(target)
    xi = target.xi if isinstance(target, BosonicMode) else float(target)
    return build_implementer_bosonic(xi, cutoff)


@dataclass(frozen=True)
class ConjugationReport:
    residuals: List[float]
    sector_bound: int

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0

    def to_dict(self) -> dict:
        return {"residuals": list(self.residuals), "sector_bound": self.sector_bound,
                "max_residual": self.max_residual}


def conjugation_pairs(target: Target, cutoff: int = 40) -> List[tuple]:
    """(U A U*, expected) for every ladder operator A the implementer transforms."""
    u = implementer(target, cutoff)
    ud = u.conj().T
    if isinstance(target, FermionicMode):
        if target.kind is not FermionicKind.COOPER_PAIR:
            expected = FERMION_A if target.kind is FermionicKind.INVARIANT else FERMION_A.conj().T
            return [(u @ FERMION_A @ ud, expected)]
        a1, a2 = pair_operators()
        c, s = np.cos(target.xi), np.sin(target.xi)
        return [
            (u @ a2 @ ud, c * a2 + s * a1.conj().T),
            (u @ a1 @ ud, c * a1 - s * a2.conj().T),
            (u @ a2.conj().T @ ud, c * a2.conj().T + s * a1),
            (u @ a1.conj().T @ ud, c * a1.conj().T - s * a2),
        ]
    xi = target.xi if isinstance(target, BosonicMode) else float(target)
    space = mode_operators(Statistics.BOSONIC, cutoff)
    return [
        (u @ space.a @ ud, np.cosh(xi) * space.a + np.sinh(xi) * space.adag),
        (u @ space.adag @ ud, np.cosh(xi) * space.adag + np.sinh(xi) * space.a),
    ]


def _sectors(target: Target, dim: int) -> np.ndarray:
    """Particle number of every basis state."""
    if isinstance(target, FermionicMode) and target.kind is FermionicKind.COOPER_PAIR:
        return np.array([bin(i).count("1") for i in range(dim)])
    return np.arange(dim)


def verify_conjugation(target: Target, cutoff: int = 40, sector_bound: int = 10) -> ConjugationReport:
    """
    Residuals ||(U A U* - B) psi|| on basis states psi, grouped by particle number.

    Args:
        target: Squeeze parameter xi, a BosonicMode or a FermionicMode
        cutoff: Bosonic truncation
        sector_bound: Highest particle number checked

    Returns:
        ConjugationReport with sector_bound + 1 residuals
    """
    if sector_bound < 0:
        raise BadParameter(f"Sector bound must be non-negative, got {sector_bound}")
    bosonic = not isinstance(target, FermionicMode)
    if bosonic and sector_bound >= cutoff:
        raise PrereqFailed(f"Sector bound {sector_bound} needs a cutoff above it, got {cutoff}")
    pairs = conjugation_pairs(target, cutoff)
    dim = pairs[0][0].shape[0]
    sectors = _sectors(target, dim)
    residuals = []
    for sector in range(sector_bound + 1):
        worst = 0.0
        for index in np.where(sectors == sector)[0]:
            for conjugated, expected in pairs:
                worst = max(worst, float(np.linalg.norm((conjugated - expected)[:, index])))
        residuals.append(worst)
    report = ConjugationReport(residuals, sector_bound)
    logger.debug(f"Conjugation check: max residual {report.max_residual:.3e} over {sector_bound + 1} sectors")
    return report


def bosonic_vacuum(t: float, cutoff: int, normalized: bool = True) -> np.ndarray:
    """
    Squeezed vacuum amplitudes (-t)^N sqrt((2N)!)/N! on occupation 2N.

    The normalized rule carries the prefactor (1 - 4t^2)^(1/4); the
    unnormalized one has amplitude 1 on the empty state.
    """
    _check_t(t)
    if cutoff < 0:
        raise BadCutoff(f"Cutoff must be non-negative, got {cutoff}")
    state = np.zeros(cutoff + 1, dtype=complex)
    pairs = np.arange(cutoff // 2 + 1)
    log_size = 0.5 * gammaln(2 * pairs + 1) - gammaln(pairs + 1)
    if t == 0:
        state[0] = 1.0
    else:
        state[2 * pairs] = np.sign(-t) ** pairs * np.exp(log_size + pairs * np.log(abs(t)))
    if normalized:
        state *= (1 - 4 * t * t) ** 0.25
    return state


def fermionic_vacuum(mode: FermionicMode, normalized: bool = True) -> np.ndarray:
    """Vacuum of one fermionic mode entry: |0>, |1>, or 1|00> - (beta/alpha)|11>."""
    if mode.kind is FermionicKind.INVARIANT:
        return np.array([1.0, 0.0], dtype=complex)
    if mode.kind is FermionicKind.PARTICLE_HOLE:
        return np.array([0.0, 1.0], dtype=complex)
    if normalized:
        return np.array([mode.alpha, 0.0, 0.0, -mode.beta], dtype=complex)
    return np.array([1.0, 0.0, 0.0, -mode.beta / mode.alpha], dtype=complex)


def vacuum_annihilation_check(target: Target, cutoff: int = 40) -> float:
    """
    Norm of the transformed annihilators applied to the vacuum amplitude rule.

    Bosonic: ||(nu a† + mu a) Omega_V||. Fermionic: the largest of the
    per-mode annihilators b = U a U* applied to the rule vacuum.
    """
    if isinstance(target, FermionicMode):
        vacuum = fermionic_vacuum(target)
        if target.kind is FermionicKind.INVARIANT:
            return float(np.linalg.norm(FERMION_A @ vacuum))
        if target.kind is FermionicKind.PARTICLE_HOLE:
            return float(np.linalg.norm(FERMION_A.conj().T @ vacuum))
        a1, a2 = pair_operators()
        alpha, beta = target.alpha, target.beta
        return max(float(np.linalg.norm((alpha * a2 + beta * a1.conj().T) @ vacuum)),
                   float(np.linalg.norm((alpha * a1 - beta * a2.conj().T) @ vacuum)))
    mode = target if isinstance(target, BosonicMode) else BosonicMode.from_squeeze(float(target))
    space = mode_operators(Statistics.BOSONIC, cutoff)
    vacuum = bosonic_vacuum(mode.t, cutoff)
    residual = float(np.linalg.norm((mode.nu * space.adag + mode.mu * space.a) @ vacuum))
    if cutoff % 2:
        # The odd top level is empty, so the truncated a† drops the 2K -> 2K+1 term
        logger.debug(f"Odd cutoff {cutoff}: residual includes the truncated top component")
    return residual


def _check_t(t: float):
    if not 0 <= abs(t) < 0.5:
        raise BadParameter(f"Squeezed vacuum needs |t| < 1/2, got {t}")


def particle_moment(t: float, power: float, cutoff: Optional[int] = None,
                    rtol: float = 1e-17) -> float:
    """
    E[N**power] in the single-mode squeezed vacuum with parameter t.

    Sums (1 - 4t^2)^(1/2) sum_N t^(2N) (2N)!/(N!)^2 (2N)^power, stopping at
    `cutoff` occupation when given, otherwise once the geometric tail bound
    drops below rtol times the running sum.
    """
    _check_t(t)
    if t == 0:
        return 1.0 if power == 0 else 0.0
    prefactor = 0.5 * np.log1p(-4 * t * t)
    total = 0.0
    block = 256
    start = 0
    limit = None if cutoff is None else cutoff // 2
    while True:
        stop = start + block if limit is None else min(start + block, limit + 1)
        pairs = np.arange(start, stop, dtype=float)
        logs = (prefactor + 2 * pairs * np.log(abs(t)) + gammaln(2 * pairs + 1)
                - 2 * gammaln(pairs + 1))
        occupations = 2 * pairs
        with np.errstate(divide="ignore"):
            weights = np.where(occupations > 0, np.power(occupations, power),
                               1.0 if power == 0 else 0.0)
        terms = np.exp(logs) * weights
        total += float(np.sum(terms))
        if limit is not None and stop > limit:
            return total
        last = terms[-1]
        # Every later term ratio is below 4t^2 ((N+1)/N)^power
        ratio = 4 * t * t * ((pairs[-1] + 1) / pairs[-1]) ** power
        if ratio < 1 and last * ratio / (1 - ratio) <= rtol * max(total, 1e-300):
            logger.debug(f"Moment {power} at t={t}: {stop} terms, tail below {rtol:.1e}")
            return total
        start = stop
        if start > 10_000_000:
            raise BadParameter(f"Moment series at t={t} did not settle")


def rapid_decay_norm(t: float, n: int, cutoff: Optional[int] = None) -> float:
    """||N^n Omega_V||^2 for the single-mode squeezed vacuum, i.e. E[N^(2n)]."""
    if n < 0:
        raise BadParameter(f"Power must be non-negative, got {n}")
    return particle_moment(t, 2 * n, cutoff)


def coherent_divergence_probe(alpha: float, phi_rule: Callable, count: int) -> np.ndarray:
    """
    Partial sums sum_{k <= K} phi_k alpha for K = 1..count.

    These are the coefficients of a(phi) applied to a product of coherent
    states with equal displacement; unbounded growth means a(phi) is undefined.
    """
    if count < 1:
        raise BadParameter(f"Need at least one term, got {count}")
    values = evaluate_terms(phi_rule, np.arange(1, count + 1)) * alpha
    return np.cumsum(values).real if np.all(values.imag == 0) else np.cumsum(values)


def coherent_state(alpha: float, cutoff: int) -> np.ndarray:
    """Coherent state e^(-alpha/2) alpha^(N/2)/sqrt(N!) truncated at `cutoff`."""
    levels = np.arange(cutoff + 1, dtype=float)
    if alpha == 0:
        state = np.zeros(cutoff + 1, dtype=complex)
        state[0] = 1.0
        return state
    return np.exp(-alpha / 2 + levels / 2 * np.log(alpha) - 0.5 * gammaln(levels + 1)).astype(complex)


def annihilation_counterexample(k: int, n: int) -> dict:
    """
    Mode vector sqrt(1 - e^(-2k))|0> + e^(-k)|k+1> and its rapid-decay ratios.

    ||N^n psi|| / ||psi|| stays bounded in k while ||N^n a psi|| / ||a psi|| = k^n,
    so a single annihilator can break uniform decay.
    """
    if k < 1 or n < 0:
        raise BadParameter(f"Need k >= 1 and n >= 0, got k={k}, n={n}")
    space = mode_operators(Statistics.BOSONIC, k + 1)
    psi = np.zeros(k + 2, dtype=complex)
    psi[0] = np.sqrt(-np.expm1(-2.0 * k))
    psi[k + 1] = np.exp(-k)
    number_power = np.linalg.matrix_power(space.N, n)
    lowered = space.a @ psi
    return {
        "k": k,
        "n": n,
        "state_ratio": float(np.linalg.norm(number_power @ psi) / np.linalg.norm(psi)),
        "annihilated_ratio": float(np.linalg.norm(number_power @ lowered) / np.linalg.norm(lowered)),
    }


@dataclass
class StateVector:
    """Amplitudes over the occupation basis of one mode or one mode pair."""
    amplitudes: np.ndarray
    statistics: Statistics = Statistics.BOSONIC

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).ravel()
        if not np.all(np.isfinite(self.amplitudes)):
            raise BadParameter("State vector has non-finite amplitudes")
        self.statistics = Statistics.parse(self.statistics)

    @property
    def cutoff(self) -> int:
        return self.amplitudes.size - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def apply(self, operator: np.ndarray) -> "StateVector":
        return StateVector(operator @ self.amplitudes, self.statistics)

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass
class ProductState:
    """Finitely many independent mode states; the operator lift acts factor-wise."""
    factors: List[StateVector] = field(default_factory=list)

    @property
    def norms(self) -> np.ndarray:
        return np.array([f.norm for f in self.factors])

    @property
    def norm(self) -> float:
        return float(np.prod(self.norms)) if self.factors else 1.0

    def apply_local(self, index: int, operator: np.ndarray) -> "ProductState":
        if not 0 <= index < len(self.factors):
            raise BadParameter(f"No factor {index} in a product of {len(self.factors)}")
        factors = list(self.factors)
        factors[index] = factors[index].apply(operator)
        return ProductState(factors)

    def overlaps(self, other: "ProductState") -> np.ndarray:
        if len(other.factors) != len(self.factors):
            raise BadParameter("Product states differ in length")
        return np.array([a.overlap(b) for a, b in zip(self.factors, other.factors)])
