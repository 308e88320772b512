"""
Implementability of Bogoliubov transformations given as maps or mode families.

Decides Fock-space implementability through the Shale-Stinespring sum,
implementability on infinite tensor products and on the extended state
space, and describes the transformed vacuum as e^r times a product state.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Union

import numpy as np

from core.bogoliubov import BogoliubovMap, Statistics
from core.errors import PrereqFailed, UnknownTail
from core.fock_space import bosonic_vacuum, fermionic_vacuum, rapid_decay_norm
from core.mode_decomposition import (
    BosonicMode,
    FermionicKind,
    FermionicMode,
    Mode,
    ModeDecomposition,
)
from core.ren_sequence import (
    Classification,
    RenSequence,
    Tail,
    TailKind,
    Verdict,
    classify_ren1,
)

logger = logging.getLogger(__name__)

FAMILY_HORIZON = 20_000
# Number of leading modes whose parameters are checked before trusting a family
SAMPLE_SIZE = 64


@dataclass
class ModeFamily:
    """
    Countable collection of independent modes indexed by j = 1, 2, ...

    `tail` declares the decay of the per-mode Shale-Stinespring weight
    (nu**2 for bosons; 2 beta**2 per Cooper pair, 1 per particle-hole mode
    for fermions). `particle_holes` is the number of particle-hole modes:
    an int, math.inf, or None when unknown.
    """
    statistics: Statistics
    generator: Callable[[int], Mode]
    size: Optional[int] = None
    tail: Tail = field(default_factory=Tail.unknown)
    particle_holes: Optional[Union[int, float]] = None
    name: str = ""

    def __post_init__(self):
        self.statistics = Statistics.parse(self.statistics)
        if self.size is not None and self.particle_holes is None \
                and self.statistics is Statistics.FERMIONIC:
            self.particle_holes = sum(
                1 for j in range(1, self.size + 1)
                if self.generator(j).kind is FermionicKind.PARTICLE_HOLE
            )
        if self.statistics is Statistics.BOSONIC:
            self.particle_holes = 0

    @property
    def is_finite(self) -> bool:
        return self.size is not None

    @classmethod
    def from_modes(cls, modes: List[Mode], statistics: Union[str, Statistics],
                   name: str = "") -> "ModeFamily":
        modes = list(modes)
        return cls(statistics, lambda j: modes[j - 1], len(modes), Tail.exact(), name=name)

    @classmethod
    def from_decomposition(cls, decomposition: ModeDecomposition) -> "ModeFamily":
        return cls.from_modes(decomposition.modes, decomposition.statistics, "decomposition")

    @classmethod
    def identity(cls, statistics: Union[str, Statistics],
                 size: Optional[int] = None) -> "ModeFamily":
        statistics = Statistics.parse(statistics)
        if statistics is Statistics.BOSONIC:
            def generator(j):
                return BosonicMode(j, 1.0, 0.0)
        else:
            def generator(j):
                return FermionicMode.invariant(j)
        return cls(statistics, generator, size, Tail.exact(0.0), particle_holes=0,
                   name="identity")

    def rule(self, extract: Callable[[Mode], float]) -> Callable:
        """Vectorised j -> extract(generator(j))."""
        return np.vectorize(lambda j: extract(self.generator(int(j))), otypes=[float])

    def modes(self, count: int) -> List[Mode]:
        count = count if self.size is None else min(count, self.size)
        return [self.generator(j) for j in range(1, count + 1)]


def mode_weight(mode: Mode) -> float:
    """Contribution of one mode to tr(v* v)."""
    if isinstance(mode, BosonicMode):
        return mode.nu ** 2
    if mode.kind is FermionicKind.PARTICLE_HOLE:
        return 1.0
    if mode.kind is FermionicKind.COOPER_PAIR:
        return 2.0 * mode.beta ** 2
    return 0.0


def shale_stinespring(source: Union[ModeFamily, BogoliubovMap]) -> RenSequence:
    """
    The formal sum tr(v* v) for a finite map or a mode family.

    Raises:
        UnknownTail: infinite family without a tail declaration
    """
    if isinstance(source, BogoliubovMap):
        weights = np.sum(np.abs(source.v) ** 2, axis=0)
        return RenSequence(weights, Tail.exact(), name="tr(v*v)")
    if source.is_finite:
        weights = [mode_weight(m) for m in source.modes(source.size)]
        return RenSequence(weights, Tail.exact(), name=f"{source.name}:tr(v*v)")
    if source.tail.kind is TailKind.UNKNOWN:
        raise UnknownTail(f"Family '{source.name}' declares no tail for its Shale-Stinespring terms")
    return RenSequence(source.rule(mode_weight), source.tail, name=f"{source.name}:tr(v*v)")


@dataclass(frozen=True)
class ImplementabilityVerdict:
    fock: Verdict
    itp: Verdict
    ess: Verdict
    trace_vv: Optional[Classification]
    particle_hole_count: Optional[Union[int, float]]

    def to_dict(self) -> dict:
        count = self.particle_hole_count
        if count is not None and math.isinf(count):
            count = "infinite"
        return {
            "fock": self.fock.value,
            "itp": self.itp.value,
            "ess": self.ess.value,
            "trace_vv": self.trace_vv.to_dict() if self.trace_vv else None,
            "particle_hole_count": count,
        }


def _sample_is_valid(fam: ModeFamily, tol: float = 1e-8) -> bool:
    for mode in fam.modes(SAMPLE_SIZE):
        if isinstance(mode, BosonicMode):
            if fam.statistics is not Statistics.BOSONIC or abs(mode.mu ** 2 - mode.nu ** 2 - 1) > tol:
                return False
        elif fam.statistics is not Statistics.FERMIONIC:
            return False
        elif mode.kind is FermionicKind.COOPER_PAIR:
            if abs(mode.alpha ** 2 + mode.beta ** 2 - 1) > tol or not (mode.alpha > 0 and mode.beta > 0):
                return False
    return True


def classify_implementability(fam: ModeFamily,
                              horizon: int = FAMILY_HORIZON) -> ImplementabilityVerdict:
    """
    Where the family's transformation can be implemented.

    fock follows the Shale-Stinespring classification; countable families
    always implement on infinite tensor products; the extended state space
    covers every bosonic family and fermionic families with finitely many
    particle-hole modes.
    """
    itp = Verdict.YES if _sample_is_valid(fam) else Verdict.UNKNOWN
    holes = fam.particle_holes
    trace = None
    if fam.statistics is Statistics.FERMIONIC and holes is not None and math.isinf(holes):
        fock = Verdict.NO
    else:
        try:
            trace = classify_ren1(shale_stinespring(fam), horizon)
        except UnknownTail as e:
            logger.info(f"Fock implementability undecided: {e}")
            trace = None
        if trace is not None and trace.is_summable:
            fock = Verdict.YES
        elif trace is not None and trace.is_divergent:
            fock = Verdict.NO
        else:
            fock = Verdict.UNKNOWN

    if fam.statistics is Statistics.BOSONIC or fock is Verdict.YES:
        ess = Verdict.YES
    elif holes is None:
        ess = Verdict.UNKNOWN
    elif math.isinf(holes):
        ess = Verdict.NO
    else:
        ess = Verdict.YES
    verdict = ImplementabilityVerdict(fock, itp, ess, trace, holes)
    logger.info(f"Family '{fam.name}': fock={fock.value} itp={itp.value} ess={ess.value}")
    return verdict


def renorm_term(mode: Mode) -> float:
    """Per-mode contribution to the vacuum renormalization exponent."""
    if isinstance(mode, BosonicMode):
        return 0.25 * math.log1p(-(mode.nu / mode.mu) ** 2)
    if mode.kind is FermionicKind.COOPER_PAIR:
        return math.log(mode.alpha)
    return 0.0


def _renorm_tail(tail: Tail) -> Tail:
    """Tail of the exponent terms from the weight tail; both behave like -weight/4."""
    if tail.kind is TailKind.EXACT:
        return Tail.exact(0.0) if tail.value == 0 else Tail.unknown()
    return tail.scaled(-0.25)


@dataclass
class VacuumDescription:
    """Omega_V = e^r Psi_V with Psi_V a product of unnormalized mode vacua."""
    family: ModeFamily
    renorm_exponent: RenSequence
    classification: Classification

    def mode(self, index: int) -> Mode:
        return self.family.generator(index)

    def amplitude(self, index: int, occupation) -> complex:
        """Unnormalized amplitude of mode `index` at `occupation` (pair tuple for Cooper pairs)."""
        mode = self.mode(index)
        if isinstance(mode, BosonicMode):
            if occupation % 2:
                return 0.0
            return complex(bosonic_vacuum(mode.t, occupation, normalized=False)[occupation])
        vector = fermionic_vacuum(mode, normalized=False)
        if mode.kind is FermionicKind.COOPER_PAIR:
            n1, n2 = occupation
            return complex(vector[n1 + 2 * n2])
        return complex(vector[occupation])

    def mode_state(self, index: int, cutoff: int = 40, normalized: bool = True) -> np.ndarray:
        mode = self.mode(index)
        if isinstance(mode, BosonicMode):
            return bosonic_vacuum(mode.t, cutoff, normalized)
        return fermionic_vacuum(mode, normalized)

    def to_dict(self) -> dict:
        return {"statistics": self.family.statistics.value,
                "renorm_exponent": self.classification.to_dict()}


def vacuum_data(fam: ModeFamily, horizon: int = FAMILY_HORIZON) -> VacuumDescription:
    """
    Renormalization exponent and per-mode amplitude rules of the transformed vacuum.

    Raises:
        PrereqFailed: the family is not implementable on infinite tensor products
    """
    if not _sample_is_valid(fam):
        raise PrereqFailed(f"Family '{fam.name}' violates its mode invariants")
    if fam.is_finite:
        terms = [renorm_term(m) for m in fam.modes(fam.size)]
        exponent = RenSequence(terms, Tail.exact(), name=f"{fam.name}:renorm")
    else:
        exponent = RenSequence(fam.rule(renorm_term), _renorm_tail(fam.tail),
                               name=f"{fam.name}:renorm")
    return VacuumDescription(fam, exponent, classify_ren1(exponent, horizon))


def uniform_decay_check(fam: ModeFamily, n: int = 1,
                        sample: int = SAMPLE_SIZE) -> dict:
    """
    Whether the vacuum has uniformly bounded ||N_k^n Omega_k||^2.

    This holds exactly when t_k = nu_k/(2 mu_k) stays away from 1/2, i.e.
    when the weights nu_k**2 stay bounded. The reported bound is the sup
    over the sampled modes.
    """
    if fam.statistics is Statistics.FERMIONIC:
        return {"uniform": Verdict.YES.value, "bound": 1.0}
    modes = fam.modes(sample)
    bound = max((rapid_decay_norm(abs(m.t), n) for m in modes), default=0.0)
    if fam.is_finite or fam.tail.kind is TailKind.EXACT:
        uniform = Verdict.YES
    elif fam.tail.kind is TailKind.POWER_DECAY:
        uniform = Verdict.YES if fam.tail.exponent >= 0 else Verdict.NO
    else:
        uniform = Verdict.UNKNOWN
    return {"uniform": uniform.value, "bound": bound}


def product_norms(description: VacuumDescription, indices: Iterable[int],
                  cutoff: int = 40) -> np.ndarray:
    """Norms of the unnormalized mode vacua, the C-sequence data of Psi_V."""
    return np.array([np.linalg.norm(description.mode_state(j, cutoff, normalized=False))
                     for j in indices])
