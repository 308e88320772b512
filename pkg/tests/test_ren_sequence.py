import numpy as np
import pytest

from core.errors import BadParameter, DimensionMismatch
from core.ren_sequence import (
    Equivalence,
    FormFactorClass,
    ProductKind,
    RenClass,
    RenSequence,
    Tail,
    TailKind,
    Verdict,
    classify_form_factor,
    classify_itp_family,
    classify_ren1,
    compare_itp,
    itp_equivalence,
    phase_variation,
    ren1_equivalent,
    same_functional,
    zeta,
)


def test_p_series_sum():
    seq = RenSequence(lambda j: j ** -2.0, Tail.power(2, 1.0), name="p2")
    result = classify_ren1(seq)
    assert result.kind is RenClass.SUMMABLE
    assert result.rigorous
    assert abs(result.value - zeta(2)) <= result.bound
    assert result.bound <= 1e-5


def test_harmonic_series_diverges_by_sign():
    assert classify_ren1(RenSequence(lambda j: 1.0 / j, Tail.power(1, 1.0))).kind \
        is RenClass.DIVERGENT_PLUS
    assert classify_ren1(RenSequence(lambda j: -1.0 / j, Tail.power(1, -1.0))).kind \
        is RenClass.DIVERGENT_MINUS


def test_sign_read_from_terms_without_coefficient():
    result = classify_ren1(RenSequence(lambda j: -1.0 / np.sqrt(j), Tail.power(0.5)), horizon=1000)
    assert result.kind is RenClass.DIVERGENT_MINUS


def test_unknown_tail_is_indeterminate():
    result = classify_ren1(RenSequence(lambda j: j ** -2.0))
    assert result.kind is RenClass.INDETERMINATE
    assert result.value is None


def test_finite_and_exact_sequences():
    finite = classify_ren1(RenSequence([1.0, 2.0, 3.5]))
    assert finite.is_summable and finite.value == 6.5

    exact = classify_ren1(RenSequence(lambda j: 0.5 ** j, Tail.exact(1.0)))
    assert exact.value == 1.0 and exact.bound == 0.0


def test_non_finite_terms_are_rejected():
    with pytest.raises(BadParameter):
        classify_ren1(RenSequence([1.0, np.inf]))


def test_estimated_coefficient_is_not_rigorous():
    result = classify_ren1(RenSequence(lambda j: 3.0 * j ** -3.0, Tail.power(3)), horizon=10000)
    assert result.is_summable
    assert not result.rigorous
    assert abs(result.value - 3 * zeta(3)) <= 2 * result.bound
    assert result.to_dict()["bound_estimated"] is True
    declared = classify_ren1(RenSequence(lambda j: 3.0 * j ** -3.0, Tail.power(3, 3.0)), horizon=10000)
    assert declared.to_dict()["bound_estimated"] is False


def test_ren1_equivalence():
    first = RenSequence(lambda j: 1.0 / j, Tail.power(1, 1.0), name="a")
    same = RenSequence(first.terms, Tail.power(1, 1.0), name="b")
    assert ren1_equivalent(first, same) is Verdict.YES

    shifted = RenSequence(lambda j: 1.0 / j + j ** -2.0, Tail.power(1, 1.0), name="c")
    assert ren1_equivalent(shifted, first, tail=Tail.power(2, 1.0)) is Verdict.NO
    assert ren1_equivalent(shifted, first) is Verdict.UNKNOWN

    assert ren1_equivalent(RenSequence([1.0, 2.0]), RenSequence([1.0, 2.0, 3.0])) is Verdict.NO


def test_tail_algebra():
    assert Tail.difference(Tail.power(2, 3.0), Tail.power(1, 1.0)) == Tail.power(1, -1.0)
    assert Tail.difference(Tail.exact(2.0), Tail.exact(0.5)).value == 1.5
    assert Tail.difference(Tail.power(2, 1.0), Tail.power(2, 1.0)).kind is TailKind.UNKNOWN
    assert Tail.from_dict({"type": "power", "exponent": 2, "coefficient": 1}) == Tail.power(2, 1.0)
    assert Tail.from_dict({"type": "exact", "value": {"re": 1.0, "im": 2.0}}).value == 1 + 2j
    assert Tail.from_dict(None).kind is TailKind.UNKNOWN
    with pytest.raises(BadParameter):
        Tail.from_dict({"type": "power"})


def test_unit_family_is_c0():
    report = classify_itp_family(lambda j: np.ones_like(j), Tail.exact(0.0))
    assert report.is_c0 is Verdict.YES
    assert report.product_norm.kind is ProductKind.VALUE
    assert report.product_norm.value == 1.0


def test_inverse_square_family_product():
    report = classify_itp_family(lambda j: 1 + j ** -2.0, Tail.power(2, 1.0))
    assert report.is_c is Verdict.YES and report.is_c0 is Verdict.YES
    expected = np.sinh(np.pi) / np.pi
    assert abs(report.product_norm.value - expected) <= report.product_norm.bound + 1e-9


def test_shrinking_family_has_zero_product():
    report = classify_itp_family(lambda j: 1 - 1 / (j + 1), Tail.power(1, 1.0), horizon=100000)
    assert report.is_c is Verdict.YES
    assert report.is_c0 is Verdict.NO
    assert report.product_norm.kind is ProductKind.ZERO


def test_growing_family_is_not_c():
    report = classify_itp_family(lambda j: 1 + 1 / j, Tail.power(1, 1.0), horizon=100000)
    assert report.is_c is Verdict.NO
    assert report.product_norm.kind is ProductKind.DIVERGENT


def test_vanishing_factor():
    report = classify_itp_family([1.0, 0.0, 1.0], Tail.exact(0.0))
    assert report.product_norm.kind is ProductKind.ZERO
    assert report.to_dict()["is_C"] == "yes"


def test_phase_family_is_only_weakly_equivalent():
    overlaps = lambda j: np.exp(1j / j)  # noqa: E731
    assert itp_equivalence(overlaps, "strong", Tail.power(1, 1.0), 100000) is Equivalence.INEQUIVALENT
    assert compare_itp(overlaps, Tail.power(1, 1.0), Tail.exact(0.0), 100000) \
        is Equivalence.WEAKLY_EQUIVALENT
    assert phase_variation(overlaps, Tail.power(1, 1.0), 100000).kind is RenClass.DIVERGENT_PLUS


def test_strong_equivalence():
    assert compare_itp(lambda j: 1 + j ** -2.0, Tail.power(2, 1.0)) is Equivalence.EQUIVALENT
    with pytest.raises(BadParameter):
        itp_equivalence([1.0], "medium")


def test_same_functional():
    first = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    rescaled = [np.array([2.0, 0.0]), np.array([0.0, 0.5])]
    assert same_functional(first, rescaled) is Verdict.YES
    assert same_functional(first, [np.array([2.0, 0.0]), np.array([0.0, 1.0])]) is Verdict.NO
    assert same_functional(first, [np.array([1.0, 1.0]), np.array([0.0, 1.0])]) is Verdict.NO
    with pytest.raises(DimensionMismatch):
        same_functional(first, first[:1])


@pytest.mark.parametrize("exponent, kind, p", [
    (2.0, FormFactorClass.L1, 1.0),
    (1.0, FormFactorClass.L2_ONLY, 2.0),
    (0.75, FormFactorClass.LP, 4.0 / 3.0),
    (0.5, FormFactorClass.NOT_L2, None),
])
def test_form_factor_classes(exponent, kind, p):
    report = classify_form_factor(lambda j: j ** -exponent, Tail.power(exponent))
    assert report.kind is kind
    assert report.p == pytest.approx(p) if p is not None else report.p is None


def test_form_factor_tables_and_unknowns():
    assert classify_form_factor([1.0, 2.0]).kind is FormFactorClass.FINITE_SUPPORT
    assert classify_form_factor(lambda j: j).kind is FormFactorClass.UNKNOWN
    assert "uniform_decay" in classify_form_factor([1.0]).domains
