from multiprocessing.pool import ThreadPool

import numpy as np
import pytest

from core.bogoliubov import validate_bogoliubov
from core.diagonalizer import diagonalize, diagonalize_fermionic
from core.errors import BadParameter, BadSteps, ConstraintViolated, ZeroGap
from core.implementability import classify_implementability
from core.models import (
    BCSModelParams,
    QEDModelParams,
    ShellLattice,
    WickModelParams,
    bcs_family,
    bcs_from_gap,
    bcs_mode,
    bcs_normal_ordering,
    bcs_sweep,
    qed_closed_form,
    qed_dynamics,
    qed_mode_matrix,
    qed_subblocks,
    qed_sweep,
    wick_divergence_probe,
    wick_family,
    wick_lower_bound_radius,
    wick_mode,
    wick_normal_ordering,
    wick_sweep,
)
from core.ren_sequence import RenClass, Tail, Verdict


def test_lattice_enumeration():
    assert len(ShellLattice(0)) == 1
    assert len(ShellLattice(1)) == 7
    assert len(ShellLattice(2)) == 33
    assert np.array_equal(ShellLattice.point(1), [0, 0, 0])
    assert np.array_equal(ShellLattice.point(2), [-1, 0, 0])
    # band 2 opens with (-2, 0, 0)
    assert np.allclose(ShellLattice.norms_at([1, 2, 8]), [0.0, 1.0, 2.0])
    with pytest.raises(BadParameter):
        ShellLattice.point(0)
    with pytest.raises(BadParameter):
        ShellLattice(-1)


def test_lattice_extends_only_when_needed():
    ShellLattice.clear()
    assert ShellLattice.norms_at([33]) == pytest.approx([2.0])
    assert len(ShellLattice._bands) == 3
    norms = ShellLattice._norms
    assert np.array_equal(ShellLattice.point(5), ShellLattice(1).points[4])
    assert ShellLattice._norms is norms
    with pytest.raises(BadParameter):
        ShellLattice.norms_at([0, 1])


def test_lattice_is_consistent_across_threads():
    ShellLattice.clear()
    indices = list(range(1, 400))
    with ThreadPool(processes=4) as pool:
        points = pool.map(ShellLattice.point, indices)
    assert np.array_equal(np.array(points), ShellLattice(5).points[:399])


def test_wick_mode_at_rest():
    mode = wick_mode(WickModelParams(1.0, 3.0), [0, 0, 0])
    assert mode.h == 4.0 and mode.k == 3.0
    assert np.isclose(mode.E, np.sqrt(7))
    assert abs(mode.u - 1.120682) < 1e-6
    assert abs(mode.v + 0.505893) < 1e-6
    assert validate_bogoliubov(mode.bogoliubov_map()).passed


def test_wick_mode_matches_diagonalizer():
    mode = wick_mode(WickModelParams(1.0, 3.0), 2.0)
    result = diagonalize(mode.hamiltonian())
    assert np.isclose(result.energies[0], mode.E)
    assert np.isclose(abs(result.map.u[0, 0]), mode.u)
    assert np.isclose(abs(result.map.v[0, 0]), abs(mode.v))


def test_wick_parameter_constraints():
    with pytest.raises(ConstraintViolated):
        WickModelParams(0.0, 1.0)
    with pytest.raises(ConstraintViolated):
        WickModelParams(1.0, -0.5)
    with pytest.raises(ConstraintViolated):
        WickModelParams(1.0, 0.0)


def test_wick_divergence_probe_grows_linearly():
    rows = wick_divergence_probe(WickModelParams(1.0, 1.0), [10, 20, 40])
    sums = [total for _, total in rows]
    assert [radius for radius, _ in rows] == [10, 20, 40]
    assert sums[0] < sums[1] < sums[2]
    for low, high in zip(sums, sums[1:]):
        assert 1.5 <= high / low <= 2.5
    with pytest.raises(BadParameter):
        wick_divergence_probe(WickModelParams(1.0, 1.0), [20, 10])


def test_wick_family_is_not_fock_implementable():
    verdict = classify_implementability(wick_family(WickModelParams(1.0, 1.0)))
    assert verdict.fock is Verdict.NO
    assert verdict.trace_vv.kind is RenClass.DIVERGENT_PLUS
    assert verdict.itp is Verdict.YES


def test_wick_normal_ordering_diverges_downward():
    constant = wick_normal_ordering(WickModelParams(1.0, 1.0))
    assert constant.classification.kind is RenClass.DIVERGENT_MINUS
    assert constant.value is None


def test_wick_lower_bound():
    params = WickModelParams(1.0, 1.0)
    radius = wick_lower_bound_radius(params, d=0.9, limit=100)
    assert radius > 0
    for p in (radius, radius + 5.0):
        mode = wick_mode(params, p)
        assert 4 * p * p * mode.v ** 2 >= 0.81 * params.kappa ** 2
    with pytest.raises(BadParameter):
        wick_lower_bound_radius(params, d=1.5)


def test_bcs_from_gap():
    mode = bcs_from_gap(3.0, 4.0)
    assert mode.E == 5.0
    assert abs(abs(mode.u) - 0.894427) < 1e-6
    assert abs(mode.v - 0.447214) < 1e-6
    assert validate_bogoliubov(mode.bogoliubov_map()).passed

    result = diagonalize_fermionic(mode.blocks)
    assert np.allclose(result.energies, [5.0, 5.0])


def test_bcs_zero_gap():
    with pytest.raises(ZeroGap):
        bcs_mode(BCSModelParams(1.0, 1.0, 0.0), [1, 0, 0])
    with pytest.raises(ConstraintViolated):
        BCSModelParams(-1.0, 1.0)


def test_bcs_gap_rule():
    params = BCSModelParams(1.0, 0.5, lambda p: 2.0 + 0j)
    mode = bcs_mode(params, [1, 1, 0])
    assert np.isclose(mode.eps, 0.5)
    assert np.isclose(mode.E, np.sqrt(4.25))
    assert bcs_family(params).tail.kind.value == "unknown"


def test_bcs_family_is_fock_implementable():
    verdict = classify_implementability(bcs_family(BCSModelParams(1.0, 1.0, 1.0)))
    assert verdict.fock is Verdict.YES
    assert verdict.ess is Verdict.YES


def test_bcs_gap_proportional_to_band_energy():
    # Delta_p = eps_p keeps v_p**2 = sin(pi/8)**2 for every eps_p > 0
    params = BCSModelParams(1.0, 0.25, lambda p: 0.5 * float(np.dot(p, p)) - 0.25)
    mode = bcs_mode(params, [1, 0, 0])
    assert np.isclose(mode.v ** 2, np.sin(np.pi / 8) ** 2)
    weight = 2 * np.sin(np.pi / 8) ** 2
    verdict = classify_implementability(bcs_family(params, Tail.power(0, weight)), horizon=2000)
    assert verdict.fock is Verdict.NO
    assert verdict.trace_vv.kind is RenClass.DIVERGENT_PLUS
    assert verdict.itp is Verdict.YES
    assert verdict.ess is Verdict.YES


def test_bcs_normal_ordering_counts_both_spins():
    modes = [bcs_from_gap(3.0, 4.0), bcs_from_gap(-1.0, 1.0)]
    constant = bcs_normal_ordering(modes)
    expected = 0.5 * sum(2 * (mode.E - mode.eps) for mode in modes)
    assert constant.classification.is_summable
    assert np.isclose(constant.value, expected)


def test_qed_mode_matrix_spectrum():
    params = QEDModelParams.constant(3.0, 3.0, 4.0)
    a_h = qed_mode_matrix(params, 0.0, 0.0)
    assert np.allclose(np.sort(np.linalg.eigvalsh(a_h)), [-5, -5, 5, 5])
    first, second = qed_subblocks(a_h)
    assert np.allclose(first, [[3.0, -4.0], [-4.0, -3.0]])
    assert np.allclose(second, [[3.0, 4.0], [4.0, -3.0]])


def test_qed_full_pair_creation():
    u1, v1, u2, v2 = qed_closed_form(0.0, 0.0, 1.0, np.pi / 2)
    assert np.isclose(abs(v1), 1.0) and np.isclose(abs(v2), 1.0)
    assert np.isclose(abs(u1), 0.0, atol=1e-15)


@pytest.mark.parametrize("eps_plus, eps_minus, f, tau", [
    (1.0, 0.5, 0.3, 2.0),
    (0.0, 0.0, 1.0, np.pi / 2),
    (2.0, -1.0, 0.7, 0.4),
])
def test_qed_dynamics_matches_closed_form(eps_plus, eps_minus, f, tau):
    params = QEDModelParams.constant(eps_plus, eps_minus, f)
    result = qed_dynamics(params, 0.0, 0.0, tau, steps=1024, constant=True)
    assert result.residuals["closed_form"] <= 1e-10
    assert result.residuals["ordering"] <= 1e-10
    assert result.residuals["unitarity"] <= 1e-12


def test_qed_time_dependent_unitarity():
    params = QEDModelParams(lambda p, t: 1.0 + t, lambda p, t: 0.5 * p,
                            lambda p, t: np.cos(t) * np.exp(-p * p))
    for p in (0.0, 0.5, 1.0):
        for t in (0.5, 1.0, 2.0):
            result = qed_dynamics(params, p, 0.0, t, steps=64)
            assert result.residuals["unitarity"] <= 1e-12
            assert result.shale_term >= 0


def test_qed_steps_guard():
    with pytest.raises(BadSteps):
        qed_dynamics(QEDModelParams.constant(1.0, 1.0, 1.0), 0.0, 0.0, 1.0, steps=0)


def test_qed_sweep_rows_keep_grid_order():
    params = QEDModelParams.constant(1.0, 0.5, 0.3)
    serial = qed_sweep(params, [0.0, 1.0], [0.5, 1.0], steps=16)
    threaded = qed_sweep(params, [0.0, 1.0], [0.5, 1.0], steps=16, threads=2)
    assert [(row["p"], row["t"]) for row in serial] == [(0.0, 0.5), (0.0, 1.0), (1.0, 0.5), (1.0, 1.0)]
    assert serial == threaded
    for row in serial:
        assert abs(row["unitarity"] - 1.0) <= 1e-12


def test_model_sweeps():
    wick_rows = wick_sweep(WickModelParams(1.0, 3.0), 1)
    assert len(wick_rows) == 7
    assert wick_rows[0]["h"] == 4.0
    bcs_rows = bcs_sweep(BCSModelParams(1.0, 1.0, 1.0), 1)
    assert len(bcs_rows) == 7
    assert set(bcs_rows[0]) == {"px", "py", "pz", "eps", "delta", "u", "v", "E"}
