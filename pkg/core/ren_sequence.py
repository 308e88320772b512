"""
Classified formal sums and infinite-tensor-product sequence classifiers.

A sequence is never declared convergent or divergent from floating-point
partial sums alone: every verdict rests on a declared tail.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Sequence, Union

import mpmath
import numpy as np

from core.errors import BadParameter, DimensionMismatch

logger = logging.getLogger(__name__)

DEFAULT_HORIZON = 1_000_000
BLOCK_SIZE = 65_536
# Vector-valued families are materialised, so they get a shorter horizon
VECTOR_HORIZON = 10_000

Terms = Union[Callable, Sequence[complex], np.ndarray]


class Verdict(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class TailKind(str, Enum):
    EXACT = "exact"
    POWER_DECAY = "power_decay"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Tail:
    """
    Declared asymptotics of a sequence.

    EXACT carries the closed-form sum (`value`); for table-like inputs it
    means "zero beyond the listed terms". POWER_DECAY states
    terms ~ coefficient * j**(-exponent) with |term_j| <= |coefficient| j**(-exponent)
    past the evaluation horizon; a missing coefficient is estimated from the
    last evaluated block and the resulting bound is marked non-rigorous.
    """
    kind: TailKind = TailKind.UNKNOWN
    exponent: Optional[float] = None
    coefficient: Optional[float] = None
    value: Optional[complex] = None

    @classmethod
    def exact(cls, value: complex = 0.0) -> "Tail":
        return cls(TailKind.EXACT, value=value)

    @classmethod
    def power(cls, exponent: float, coefficient: Optional[float] = None) -> "Tail":
        return cls(TailKind.POWER_DECAY, exponent=float(exponent),
                   coefficient=None if coefficient is None else float(coefficient))

    @classmethod
    def unknown(cls) -> "Tail":
        return cls(TailKind.UNKNOWN)

    @classmethod
    def from_dict(cls, data: Optional[dict]) -> "Tail":
        if not data:
            return cls.unknown()
        kind = str(data.get("type", data.get("kind", "unknown"))).lower()
        if kind in ("exact", "closed_form"):
            value = data.get("value", 0.0)
            if isinstance(value, dict):
                value = complex(value.get("re", 0.0), value.get("im", 0.0))
            return cls.exact(value)
        if kind in ("power", "power_decay"):
            if "exponent" not in data:
                raise BadParameter("Power-decay tail needs an 'exponent'")
            return cls.power(data["exponent"], data.get("coefficient"))
        if kind == "unknown":
            return cls.unknown()
        raise BadParameter(f"Unknown tail type '{kind}'")

    def to_dict(self) -> dict:
        data = {"type": self.kind.value}
        if self.exponent is not None:
            data["exponent"] = self.exponent
        if self.coefficient is not None:
            data["coefficient"] = self.coefficient
        if self.value is not None:
            data["value"] = {"re": complex(self.value).real, "im": complex(self.value).imag}
        return data

    def scaled(self, factor: float) -> "Tail":
        """Tail of the sequence multiplied by a real factor."""
        if self.kind is TailKind.EXACT:
            return Tail.exact(factor * self.value if self.value is not None else None)
        if self.kind is TailKind.POWER_DECAY:
            return Tail.power(self.exponent,
                              None if self.coefficient is None else factor * self.coefficient)
        return self

    @staticmethod
    def difference(first: "Tail", second: "Tail") -> "Tail":
        """Best tail for (first - second) derivable from the two declarations."""
        if TailKind.UNKNOWN in (first.kind, second.kind):
            return Tail.unknown()
        if first.kind is TailKind.EXACT and second.kind is TailKind.EXACT:
            if first.value is None or second.value is None:
                return Tail.unknown()
            return Tail.exact(first.value - second.value)
        if first.kind is TailKind.EXACT:
            return second.scaled(-1.0)
        if second.kind is TailKind.EXACT:
            return first
        if first.exponent != second.exponent:
            return first if first.exponent < second.exponent else second.scaled(-1.0)
        if first.coefficient is None or second.coefficient is None:
            return Tail.unknown()
        leading = first.coefficient - second.coefficient
        if leading == 0.0:
            # Leading orders cancel; the true decay is not declared
            return Tail.unknown()
        return Tail.power(first.exponent, leading)


class RenClass(str, Enum):
    SUMMABLE = "summable"
    DIVERGENT_PLUS = "divergent_plus"
    DIVERGENT_MINUS = "divergent_minus"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class Classification:
    kind: RenClass
    value: Optional[complex] = None
    bound: Optional[float] = None
    rigorous: bool = True
    terms_evaluated: int = 0

    @property
    def is_summable(self) -> bool:
        return self.kind is RenClass.SUMMABLE

    @property
    def is_divergent(self) -> bool:
        return self.kind in (RenClass.DIVERGENT_PLUS, RenClass.DIVERGENT_MINUS)

    def to_dict(self) -> dict:
        data = {"class": self.kind.value, "rigorous": self.rigorous,
                "terms_evaluated": self.terms_evaluated}
        if self.value is not None:
            value = complex(self.value)
            data["value"] = value.real if value.imag == 0 else {"re": value.real, "im": value.imag}
        if self.bound is not None:
            data["bound"] = self.bound
            # Without a declared coefficient the remainder bound is extrapolated from the last block
            data["bound_estimated"] = not self.rigorous
        return data


@dataclass
class RenSequence:
    """
    A formal sum over j = start, start + 1, ... (or a finite table).

    `terms` is either a callable j -> complex (vectorised callables receive a
    float array of indices) or a finite sequence of values.
    """
    terms: Terms
    tail: Tail = field(default_factory=Tail.unknown)
    start: int = 1
    length: Optional[int] = None
    name: str = ""

    def __post_init__(self):
        if not callable(self.terms):
            values = np.asarray(self.terms, dtype=complex).ravel()
            self.terms = values
            self.length = values.size

    @property
    def is_finite(self) -> bool:
        return self.length is not None

    def evaluate(self, count: int, offset: int = 0) -> np.ndarray:
        """Terms number offset .. offset+count-1 (0-based positions)."""
        if not callable(self.terms):
            return self.terms[offset:offset + count]
        indices = np.arange(self.start + offset, self.start + offset + count)
        return evaluate_terms(self.terms, indices)

    def classification(self, horizon: int = DEFAULT_HORIZON) -> Classification:
        return classify_ren1(self, horizon)


def evaluate_terms(rule: Callable, indices: np.ndarray) -> np.ndarray:
    """Evaluate `rule` on integer indices, vectorised when the rule allows it."""
    try:
        with np.errstate(all="ignore"):
            values = np.asarray(rule(indices.astype(float)), dtype=complex)
        if values.shape == indices.shape:
            return values
    except (TypeError, ValueError, IndexError, KeyError, ZeroDivisionError):
        pass
    return np.array([complex(rule(int(j))) for j in indices], dtype=complex)


class _Accumulator:
    """Neumaier-compensated running sum of complex block totals."""

    def __init__(self):
        self.total = 0j
        self.compensation = 0j

    def add(self, value: complex):
        for part in ("real", "imag"):
            total = getattr(self.total, part)
            comp = getattr(self.compensation, part)
            x = getattr(value, part)
            t = total + x
            if abs(total) >= abs(x):
                comp += (total - t) + x
            else:
                comp += (x - t) + total
            if part == "real":
                self.total = complex(t, self.total.imag)
                self.compensation = complex(comp, self.compensation.imag)
            else:
                self.total = complex(self.total.real, t)
                self.compensation = complex(self.compensation.real, comp)

    @property
    def value(self) -> complex:
        return self.total + self.compensation


def partial_sums(seq: RenSequence, horizon: int) -> tuple:
    """
    Sum the first `horizon` terms block by block.

    Returns:
        (sum, number of terms, last block of terms, 1-based index of the first term of that block)
    """
    count = horizon if seq.length is None else min(horizon, seq.length)
    acc = _Accumulator()
    last_block = np.zeros(0, dtype=complex)
    last_start = seq.start
    for offset in range(0, count, BLOCK_SIZE):
        block = seq.evaluate(min(BLOCK_SIZE, count - offset), offset)
        if not np.all(np.isfinite(block)):
            raise BadParameter(f"Sequence '{seq.name}' produced a non-finite term near index {seq.start + offset}")
        acc.add(complex(np.sum(block)))
        last_block = block
        last_start = seq.start + offset
    return acc.value, count, last_block, last_start


def _tail_sign(block: np.ndarray, coefficient: Optional[float]) -> int:
    """+1/-1 when the tail is eventually signed, 0 otherwise."""
    if coefficient is not None and coefficient != 0.0:
        return 1 if coefficient > 0 else -1
    if block.size == 0 or np.any(np.abs(block.imag) > 0):
        return 0
    if np.all(block.real > 0):
        return 1
    if np.all(block.real < 0):
        return -1
    return 0


def classify_ren1(seq: RenSequence, horizon: int = DEFAULT_HORIZON) -> Classification:
    """
    Classify a formal sum as Summable, DivergentPlus, DivergentMinus or Indeterminate.

    Args:
        seq: Sequence with its declared tail
        horizon: Number of terms summed explicitly

    Returns:
        Classification, Summable carrying a remainder bound. The bound is
        only an estimate (rigorous=False) when the power tail has no coefficient.
    """
    tail = seq.tail
    if seq.is_finite:
        total, count, _, _ = partial_sums(seq, seq.length)
        bound = float(np.finfo(float).eps * count * max(1.0, abs(total)))
        return Classification(RenClass.SUMMABLE, total, bound, True, count)

    if tail.kind is TailKind.EXACT:
        if tail.value is None:
            return Classification(RenClass.INDETERMINATE)
        return Classification(RenClass.SUMMABLE, complex(tail.value), 0.0, True, 0)

    if tail.kind is TailKind.UNKNOWN:
        logger.debug(f"Sequence '{seq.name}' has no declared tail; classified indeterminate")
        return Classification(RenClass.INDETERMINATE)

    p = tail.exponent
    if p <= 1:
        # Only the sign of the tail matters here
        block = last_block(seq, horizon)
        sign = _tail_sign(block, tail.coefficient)
        if sign > 0:
            return Classification(RenClass.DIVERGENT_PLUS, terms_evaluated=horizon)
        if sign < 0:
            return Classification(RenClass.DIVERGENT_MINUS, terms_evaluated=horizon)
        return Classification(RenClass.INDETERMINATE, terms_evaluated=horizon)

    total, count, block, block_start = partial_sums(seq, horizon)
    rigorous = tail.coefficient is not None
    if rigorous:
        coefficient = abs(tail.coefficient)
    else:
        idx = np.arange(block_start, block_start + block.size, dtype=float)
        coefficient = float(np.max(np.abs(block) * idx ** p)) if block.size else 0.0
        logger.warning(f"Sequence '{seq.name}' declares no tail coefficient; remainder bound is estimated")
    last = seq.start + count - 1
    bound = coefficient * last ** (1 - p) / (p - 1)
    logger.debug(f"Sequence '{seq.name}': partial sum {total} over {count} terms, remainder <= {bound:.3e}")
    return Classification(RenClass.SUMMABLE, total, bound, rigorous, count)


def last_block(seq: RenSequence, horizon: int) -> np.ndarray:
    """The final block of terms before the horizon."""
    count = horizon if seq.length is None else min(horizon, seq.length)
    size = min(BLOCK_SIZE, count)
    return seq.evaluate(size, count - size)


def ren1_equivalent(first: RenSequence, second: RenSequence, tol: float = 1e-10,
                    tail: Optional[Tail] = None,
                    horizon: int = DEFAULT_HORIZON) -> Verdict:
    """
    Decide r1 ~ r2: the difference is absolutely summable and sums to zero.

    Args:
        first, second: Sequences over the same index set
        tol: Certification tolerance for the zero sum
        tail: Declared tail of the difference (derived from the two tails if omitted)

    Returns:
        YES when |sum| and its remainder bound are both below tol under a
        declared tail, NO when the difference diverges or is certainly
        nonzero, UNKNOWN otherwise
    """
    if first.start != second.start or first.length != second.length:
        return Verdict.NO if (first.is_finite and second.is_finite) else Verdict.UNKNOWN
    if first is second or (callable(first.terms) and first.terms is second.terms):
        return Verdict.YES

    if first.is_finite:
        terms = np.asarray(first.terms) - np.asarray(second.terms)
    else:
        def terms(j, a=first.terms, b=second.terms):
            return a(j) - b(j)
    diff_tail = tail if tail is not None else Tail.difference(first.tail, second.tail)
    difference = RenSequence(terms, diff_tail, first.start, first.length,
                             name=f"{first.name}-{second.name}")
    result = classify_ren1(difference, horizon)
    logger.debug(f"Ren1 difference classified as {result.kind.value}")
    if result.is_divergent:
        return Verdict.NO
    if not result.is_summable:
        return Verdict.UNKNOWN
    size = abs(result.value)
    if size <= tol and result.bound <= tol and result.rigorous:
        return Verdict.YES
    if size - result.bound > tol:
        return Verdict.NO
    return Verdict.UNKNOWN


def _as_sequence(values: Terms, tail: Tail, transform: Callable, name: str) -> RenSequence:
    """Wrap `transform(values_j)` as a RenSequence over j = 1, 2, ..."""
    if callable(values):
        return RenSequence(lambda j: transform(np.asarray(values(j))), tail, name=name)
    raw = np.asarray(values, dtype=complex)
    return RenSequence(transform(raw), tail, name=name)


class ProductKind(str, Enum):
    VALUE = "value"
    ZERO = "zero"
    DIVERGENT = "divergent"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class ProductNorm:
    kind: ProductKind
    value: Optional[float] = None
    bound: Optional[float] = None

    def to_dict(self) -> dict:
        data = {"kind": self.kind.value}
        if self.value is not None:
            data["value"] = self.value
        if self.bound is not None:
            data["bound"] = self.bound
        return data


class Equivalence(str, Enum):
    EQUIVALENT = "equivalent"
    WEAKLY_EQUIVALENT = "weakly_equivalent"
    INEQUIVALENT = "inequivalent"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class ITPFamilyReport:
    is_c: Verdict
    is_c0: Verdict
    product_norm: ProductNorm
    equivalence_to_reference: Equivalence = Equivalence.UNKNOWN

    def to_dict(self) -> dict:
        return {
            "is_C": self.is_c.value,
            "is_C0": self.is_c0.value,
            "product_norm": self.product_norm.to_dict(),
            "equivalence_to_reference": self.equivalence_to_reference.value,
        }


def classify_itp_family(norms: Terms, tail: Tail,
                        horizon: int = DEFAULT_HORIZON,
                        reference_overlaps: Optional[Terms] = None,
                        overlap_tail: Optional[Tail] = None) -> ITPFamilyReport:
    """
    Classify per-mode norms of a product vector.

    `tail` describes the decay of |norm_k - 1|. C0 means that sum is finite;
    C means the product of norms converges, including convergence to zero.
    """
    deviations = _as_sequence(norms, tail, lambda x: np.abs(x - 1.0), "norm-deviation")
    deviation_class = classify_ren1(deviations, horizon)

    # Any vanishing factor makes the product zero outright
    if callable(norms):
        sample = evaluate_terms(norms, np.arange(1, min(horizon, BLOCK_SIZE) + 1))
    else:
        sample = np.asarray(norms, dtype=complex)
    has_zero = bool(np.any(sample == 0.0))

    equivalence = Equivalence.UNKNOWN
    if reference_overlaps is not None:
        equivalence = compare_itp(reference_overlaps, overlap_tail or Tail.unknown(),
                                  horizon=horizon)

    if deviation_class.is_summable:
        c0 = Verdict.YES
    elif deviation_class.is_divergent:
        c0 = Verdict.NO
    else:
        c0 = Verdict.UNKNOWN

    if has_zero:
        return ITPFamilyReport(Verdict.YES, c0, ProductNorm(ProductKind.ZERO, 0.0), equivalence)

    if c0 is Verdict.YES:
        return ITPFamilyReport(Verdict.YES, Verdict.YES,
                               _product_of_norms(norms, tail, horizon),
                               equivalence)

    if c0 is Verdict.NO:
        excess = _as_sequence(norms, Tail.unknown(), lambda x: np.real(x) - 1.0, "norm-excess")
        direction = _tail_sign(last_block(excess, horizon), None)
        if direction < 0:
            return ITPFamilyReport(Verdict.YES, Verdict.NO, ProductNorm(ProductKind.ZERO, 0.0),
                                   equivalence)
        if direction > 0:
            return ITPFamilyReport(Verdict.NO, Verdict.NO, ProductNorm(ProductKind.DIVERGENT),
                                   equivalence)
        return ITPFamilyReport(Verdict.UNKNOWN, Verdict.NO, ProductNorm(ProductKind.UNKNOWN),
                               equivalence)

    return ITPFamilyReport(Verdict.UNKNOWN, Verdict.UNKNOWN, ProductNorm(ProductKind.UNKNOWN),
                           equivalence)


def _product_of_norms(norms: Terms, tail: Tail,
                      horizon: int) -> ProductNorm:
    """Value of prod ||Psi_k|| for a C0 family."""
    if tail.kind is TailKind.EXACT and tail.value == 0:
        return ProductNorm(ProductKind.VALUE, 1.0, 0.0)
    if tail.kind is TailKind.POWER_DECAY:
        # |log x| <= 2|x - 1| once |x - 1| <= 1/2
        log_tail = Tail.power(tail.exponent,
                              None if tail.coefficient is None else 2 * abs(tail.coefficient))
        logs = _as_sequence(norms, log_tail, lambda x: np.log(np.abs(x)), "log-norm")
        log_class = classify_ren1(logs, horizon)
        value = float(np.exp(complex(log_class.value).real))
        return ProductNorm(ProductKind.VALUE, value, float(value * np.expm1(log_class.bound)))
    logs = _as_sequence(norms, Tail.unknown(), lambda x: np.log(np.abs(x)), "log-norm")
    total, _, _, _ = partial_sums(logs, horizon)
    return ProductNorm(ProductKind.VALUE, float(np.exp(total.real)), None)


def itp_equivalence(overlaps: Terms, mode: str = "strong", tail: Optional[Tail] = None,
                    horizon: int = DEFAULT_HORIZON) -> Equivalence:
    """
    Equivalence of two product vectors from their per-mode overlaps.

    strong: sum |<Phi_k, Psi_k> - 1| < inf.
    weak:   sum ||<Phi_k, Psi_k>| - 1| < inf.
    `tail` describes the decay of the summed deviations.
    """
    tail = tail or Tail.unknown()
    if mode == "strong":
        deviations = _as_sequence(overlaps, tail, lambda z: np.abs(z - 1.0), "overlap-deviation")
        success = Equivalence.EQUIVALENT
    elif mode == "weak":
        deviations = _as_sequence(overlaps, tail, lambda z: np.abs(np.abs(z) - 1.0),
                                  "overlap-modulus-deviation")
        success = Equivalence.WEAKLY_EQUIVALENT
    else:
        raise BadParameter(f"Unknown equivalence mode '{mode}', expected 'strong' or 'weak'")
    result = classify_ren1(deviations, horizon)
    if result.is_summable:
        return success
    if result.is_divergent:
        return Equivalence.INEQUIVALENT
    return Equivalence.UNKNOWN


def compare_itp(overlaps: Terms, strong_tail: Tail, weak_tail: Optional[Tail] = None,
                horizon: int = DEFAULT_HORIZON) -> Equivalence:
    """Strongest equivalence established by the declared tails."""
    strong = itp_equivalence(overlaps, "strong", strong_tail, horizon)
    if strong is Equivalence.EQUIVALENT:
        return strong
    weak = itp_equivalence(overlaps, "weak", weak_tail or strong_tail, horizon)
    if weak is Equivalence.WEAKLY_EQUIVALENT:
        return weak
    if strong is Equivalence.INEQUIVALENT and weak is Equivalence.INEQUIVALENT:
        return Equivalence.INEQUIVALENT
    return Equivalence.UNKNOWN


def phase_variation(overlaps: Terms, tail: Tail,
                    horizon: int = DEFAULT_HORIZON) -> Classification:
    """Classify sum |arg <Phi_k, Psi_k>|; divergence is an infinite phase variation."""
    return classify_ren1(_as_sequence(overlaps, tail, lambda z: np.abs(np.angle(z)), "phase"),
                         horizon)


def _materialize(family, horizon: int) -> List[np.ndarray]:
    if callable(family):
        return [np.asarray(family(j), dtype=complex).ravel() for j in range(1, horizon + 1)]
    return [np.asarray(vec, dtype=complex).ravel() for vec in family]


def same_functional(first, second, tail: Optional[Tail] = None, tol: float = 1e-10,
                    horizon: int = VECTOR_HORIZON) -> Verdict:
    """
    Decide whether two vector families define the same product functional.

    Needs second_k = c_k first_k for every k with prod c_k = 1. For the
    listed data the product is formed exactly; `tail` covers what follows:
    EXACT means c_k = 1 beyond the data, POWER_DECAY with exponent > 1
    bounds |c_k - 1| there.
    """
    tail = tail or Tail.exact(1.0)
    left = _materialize(first, horizon)
    right = _materialize(second, horizon)
    if len(left) != len(right):
        raise DimensionMismatch(f"Families list {len(left)} and {len(right)} vectors")

    product = 1.0 + 0j
    for k, (a, b) in enumerate(zip(left, right), start=1):
        if a.shape != b.shape:
            raise DimensionMismatch(f"Vectors at index {k} differ in length")
        weight = np.vdot(a, a).real
        if weight == 0.0:
            if np.linalg.norm(b) > tol:
                return Verdict.NO
            continue
        c = np.vdot(a, b) / weight
        if np.linalg.norm(b - c * a) > tol * max(1.0, np.linalg.norm(b)):
            logger.debug(f"Vectors at index {k} are not parallel")
            return Verdict.NO
        product *= c

    deviation = abs(product - 1.0)
    if tail.kind is TailKind.EXACT:
        return Verdict.YES if deviation <= tol else Verdict.NO
    if tail.kind is TailKind.POWER_DECAY and tail.exponent > 1 and tail.coefficient is not None:
        # log|prod of tail factors| <= 2 sum |c_k - 1| for small deviations
        remainder = abs(tail.coefficient) * len(left) ** (1 - tail.exponent) / (tail.exponent - 1)
        spread = abs(product) * (np.exp(2 * remainder) - 1.0)
        if deviation + spread <= tol:
            return Verdict.YES
        if deviation - spread > tol:
            return Verdict.NO
    return Verdict.UNKNOWN


class FormFactorClass(str, Enum):
    FINITE_SUPPORT = "finite_support"
    L1 = "l1"
    LP = "lp"
    L2_ONLY = "l2_only"
    NOT_L2 = "not_l2"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class FormFactorReport:
    kind: FormFactorClass
    p: Optional[float] = None

    @property
    def domains(self) -> List[str]:
        """Operator domains a#(phi) can be taken on."""
        if self.kind is FormFactorClass.FINITE_SUPPORT:
            return ["test_functions", "uniform_decay", "holder"]
        if self.kind is FormFactorClass.L1:
            return ["uniform_decay", "holder"]
        if self.kind in (FormFactorClass.LP, FormFactorClass.L2_ONLY):
            return ["holder"]
        return []

    def to_dict(self) -> dict:
        data = {"class": self.kind.value, "domains": self.domains}
        if self.p is not None:
            data["p"] = self.p
        return data


def classify_form_factor(phi: Terms, tail: Optional[Tail] = None) -> FormFactorReport:
    """
    Strongest summability class of a form factor.

    A finite table is finitely supported. For a rule, `tail` declares
    |phi_k| ~ k**(-s): s > 1 gives l1, 1/2 < s < 1 gives l^p for every
    p > 1/s (reported as p = 1/s), the harmonic borderline s = 1 is
    reported as L2_ONLY, and s <= 1/2 leaves l2.
    """
    if not callable(phi):
        return FormFactorReport(FormFactorClass.FINITE_SUPPORT)
    tail = tail or Tail.unknown()
    if tail.kind is TailKind.EXACT:
        return FormFactorReport(FormFactorClass.FINITE_SUPPORT)
    if tail.kind is TailKind.UNKNOWN:
        return FormFactorReport(FormFactorClass.UNKNOWN)
    s = tail.exponent
    if s > 1:
        return FormFactorReport(FormFactorClass.L1, 1.0)
    if s == 1:
        return FormFactorReport(FormFactorClass.L2_ONLY, 2.0)
    if s > 0.5:
        return FormFactorReport(FormFactorClass.LP, 1.0 / s)
    return FormFactorReport(FormFactorClass.NOT_L2)


def zeta(s: float) -> float:
    """Riemann zeta, used for closed-form p-series values."""
    return float(mpmath.zeta(s))
