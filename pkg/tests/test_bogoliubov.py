import numpy as np
import pytest

from core.bogoliubov import (
    BogoliubovMap,
    GeneralizedVector,
    RepresentationTag,
    Statistics,
    adjoint,
    apply_to_generator,
    compose,
    convert_representation,
    from_representation,
    random_map,
    symplectic_residual,
    validate_bogoliubov,
)
from core.errors import (
    BadParameter,
    DimensionMismatch,
    NonFiniteEntry,
    NotValidated,
    StatisticsMismatch,
    UnsupportedTarget,
)


@pytest.mark.parametrize("statistics", ["bosonic", "fermionic"])
def test_identity_passes(statistics):
    report = validate_bogoliubov(BogoliubovMap.identity(3, statistics))
    assert report.passed
    assert report.max_residual == 0.0


def test_u_equals_v_bosonic_fails_with_unit_residual():
    bmap = BogoliubovMap(np.eye(1), np.eye(1), "bosonic")
    report = validate_bogoliubov(bmap)
    assert not report.passed
    assert np.isclose(report.max_residual, 1.0)
    with pytest.raises(NotValidated):
        bmap.validate()


def test_squeeze_and_pair_rotation_are_valid():
    squeeze = BogoliubovMap.squeeze(0.5)
    assert np.isclose(squeeze.u[0, 0], np.cosh(0.5))
    assert validate_bogoliubov(squeeze).max_residual < 1e-14

    rotation = BogoliubovMap.pair_rotation(2, 0, 1, np.pi / 3)
    assert validate_bogoliubov(rotation).max_residual < 1e-14


def test_relation_suite_on_random_compositions(rng):
    for trial in range(100):
        statistics = Statistics.BOSONIC if trial % 2 else Statistics.FERMIONIC
        n = int(rng.integers(1, 65))
        bmap = random_map(n, statistics, rng=rng)
        report = validate_bogoliubov(bmap, tol=1e-9)
        assert report.passed, (n, statistics, report.residuals)
        if statistics is Statistics.FERMIONIC:
            full = bmap.matrix
            assert np.max(np.abs(full.conj().T @ full - np.eye(2 * n))) <= 1e-10


def test_compose_and_adjoint_invert(rng):
    bmap = random_map(4, "bosonic", rng=rng)
    product = compose(adjoint_inverse(bmap), bmap)
    assert np.allclose(product.u, np.eye(4), atol=1e-10)
    assert np.allclose(product.v, 0, atol=1e-10)


def adjoint_inverse(bmap):
    """Bosonic inverse S V* S written back in block form."""
    inverse = adjoint(bmap)
    return BogoliubovMap(inverse.u, -inverse.v, bmap.statistics)


def test_fermionic_adjoint_is_inverse(rng):
    bmap = random_map(5, "fermionic", rng=rng)
    product = compose(adjoint(bmap), bmap)
    assert np.allclose(product.u, np.eye(5), atol=1e-10)
    assert np.allclose(product.v, 0, atol=1e-10)


def test_symplectic_residual_matches_relations(rng):
    assert symplectic_residual(random_map(6, "bosonic", rng=rng)) < 1e-10
    assert symplectic_residual(BogoliubovMap(np.eye(1), np.eye(1), "bosonic")) > 0.5


def test_apply_to_generator_uses_block_matrix():
    bmap = BogoliubovMap.squeeze([0.3, 0.7])
    vector = GeneralizedVector.basis(2, 1)
    image = apply_to_generator(bmap, vector)
    assert np.allclose(image.as_array(), bmap.matrix @ vector.as_array())


def test_representation_round_trip(rng):
    bmap = random_map(3, "fermionic", rng=rng)
    for tag in (RepresentationTag.L2_DIRECT_SUM, RepresentationTag.H_PLUS_HSTAR):
        back = from_representation(convert_representation(bmap, tag), tag, "fermionic")
        assert np.allclose(back.u, bmap.u) and np.allclose(back.v, bmap.v)
    with pytest.raises(UnsupportedTarget):
        convert_representation(bmap, "w11")


def test_construction_errors():
    with pytest.raises(DimensionMismatch):
        BogoliubovMap(np.eye(2), np.eye(3), "bosonic")
    with pytest.raises(NonFiniteEntry):
        BogoliubovMap([[np.nan]], [[0.0]], "bosonic")
    with pytest.raises(BadParameter):
        BogoliubovMap(np.eye(1), np.zeros((1, 1)), "anyonic")
    with pytest.raises(StatisticsMismatch):
        compose(BogoliubovMap.identity(1, "bosonic"), BogoliubovMap.identity(1, "fermionic"))
    with pytest.raises(BadParameter):
        validate_bogoliubov(BogoliubovMap.identity(1, "bosonic"), tol=0.0)
