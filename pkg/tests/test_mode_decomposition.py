import numpy as np
import pytest

from core.bogoliubov import BogoliubovMap, compose, random_map
from core.errors import DegenerateBasis, NotBosonic, NotFermionic, NotValidated
from core.mode_decomposition import (
    FermionicKind,
    build_C,
    c_asymmetry,
    check_reconstruction,
    decompose,
    decompose_bosonic,
    decompose_fermionic,
    eigenvalue_clusters,
    reconstruct,
)


def test_single_squeeze_gives_one_mode():
    result = decompose_bosonic(BogoliubovMap.squeeze(0.5))
    assert len(result) == 1
    mode = result.modes[0]
    assert np.isclose(mode.mu, np.cosh(0.5))
    assert np.isclose(mode.nu, np.sinh(0.5))
    assert np.isclose(mode.mu ** 2 - mode.nu ** 2, 1.0)


def test_bosonic_modes_sorted_by_squeezing():
    result = decompose_bosonic(BogoliubovMap.squeeze([0.2, 0.9, 0.0]))
    nus = [mode.nu for mode in result.modes]
    assert np.allclose(nus, [np.sinh(0.9), np.sinh(0.2), 0.0], atol=1e-10)


@pytest.mark.parametrize("statistics", ["bosonic", "fermionic"])
def test_random_map_reconstructs(rng, statistics):
    bmap = random_map(6, statistics, rng=rng)
    result = decompose(bmap, tol=1e-9)
    rebuilt = reconstruct(result)
    assert np.allclose(rebuilt.u, bmap.u, atol=1e-8)
    assert np.allclose(rebuilt.v, bmap.v, atol=1e-8)
    assert result.residual < 1e-8


def test_C_symmetry_follows_statistics(rng):
    bosonic = build_C(random_map(4, "bosonic", rng=rng))
    fermionic = build_C(random_map(4, "fermionic", rng=rng))
    assert c_asymmetry(bosonic, "bosonic") < 1e-10
    assert c_asymmetry(fermionic, "fermionic") < 1e-10


def test_fermionic_kinds():
    pair = BogoliubovMap.pair_rotation(4, 0, 1, 0.4)
    flipped = BogoliubovMap.particle_hole(4, [3])
    bmap = compose(pair, flipped)
    result = decompose_fermionic(bmap)
    assert result.count(FermionicKind.PARTICLE_HOLE) == 1
    assert result.count(FermionicKind.COOPER_PAIR) == 1
    assert result.count(FermionicKind.INVARIANT) == 1
    # particle-hole first, then the pair, then invariant modes
    assert [m.kind for m in result.modes] == [FermionicKind.PARTICLE_HOLE, FermionicKind.COOPER_PAIR,
                                              FermionicKind.INVARIANT]
    cooper = result.modes[1]
    assert np.isclose(cooper.alpha, np.cos(0.4))
    assert np.isclose(cooper.beta, np.sin(0.4))
    assert np.isclose(cooper.alpha ** 2 + cooper.beta ** 2, 1.0)


def test_fermionic_identity_is_all_invariant():
    result = decompose_fermionic(BogoliubovMap.identity(3, "fermionic"))
    assert result.count(FermionicKind.INVARIANT) == 3


def test_statistics_guards():
    with pytest.raises(NotBosonic):
        decompose_bosonic(BogoliubovMap.identity(2, "fermionic"))
    with pytest.raises(NotFermionic):
        decompose_fermionic(BogoliubovMap.identity(2, "bosonic"))
    with pytest.raises(NotValidated):
        decompose(BogoliubovMap(np.eye(1), np.eye(1), "bosonic"))


def test_single_partially_paired_mode_is_not_a_map():
    # One mode with 0 < |u|^2 < 1 cannot satisfy the relations
    bmap = BogoliubovMap([[np.cos(0.3)]], [[np.sin(0.3)]], "fermionic")
    with pytest.raises(NotValidated):
        decompose_fermionic(bmap)


def test_eigenvalue_clusters_groups_neighbours():
    clusters = eigenvalue_clusters(np.array([0.1, 0.1 + 1e-12, 0.5, 0.9]))
    assert [list(c) for c in clusters] == [[0, 1], [2], [3]]


def test_reconstruction_mismatch_is_an_error():
    decomposition = decompose_bosonic(BogoliubovMap.squeeze(0.5))
    assert check_reconstruction(decomposition, BogoliubovMap.squeeze(0.5)).residual < 1e-10
    with pytest.raises(DegenerateBasis):
        check_reconstruction(decomposition, BogoliubovMap.squeeze(0.6))
