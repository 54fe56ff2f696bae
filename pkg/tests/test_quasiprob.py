import math

import numpy as np
import pytest

from qmeter import SIGMA_Z, Ket, estimate_from_quasiprob, joint_quasiprob, negativity, optimal_assignment
from qmeter.generators import random_hermitian, random_ket, random_scenario, rng, scenario_suite
from qmeter.hilbert import Observable, identity
from qmeter.measurement import basis_to_povm, validate_povm

import oracles

P0 = oracles.outer([1, 0], [1, 0])
P1 = oracles.outer([0, 1], [0, 1])
PM = oracles.outer(oracles.KET_MINUS, oracles.KET_MINUS)


def test_eigenbasis_table_is_classical(psi_pi8, z_povm):
    t = joint_quasiprob(psi_pi8, z_povm, SIGMA_Z)
    c2, s2 = math.cos(math.pi / 8) ** 2, math.sin(math.pi / 8) ** 2
    # rows ascend: -1 (|1>) then +1 (|0>); columns are outcomes "0", "1"
    np.testing.assert_allclose(t.entries, [[0, s2], [c2, 0]], atol=1e-15)
    neg = negativity(t)
    assert neg.min_entry >= 0 and neg.negative_mass == 0 and neg.classical


def test_pi8_table_against_oracle(psi_pi8, x_povm):
    t = joint_quasiprob(psi_pi8, x_povm, SIGMA_Z)
    assert oracles.kd_entry(oracles.PSI_PI8, PM, P0) == pytest.approx(0.25, abs=1e-14)
    assert t.q(1, "-") == pytest.approx(0.25, abs=1e-12)
    assert t.q(-1, "-") == pytest.approx(oracles.kd_entry(oracles.PSI_PI8, PM, P1), abs=1e-12)
    assert t.q(-1, "-") == pytest.approx(-0.10355, abs=1e-5)
    neg = negativity(t)
    assert neg.min_entry == pytest.approx(-0.10355, abs=1e-5)
    assert neg.negative_mass == pytest.approx(0.10355, abs=1e-5)
    assert not neg.classical


def test_plus_state_table(x_povm):
    # the column for "+" must sum to P(+) = 1, so each entry is 1/2
    plus = Ket(np.array([1, 1]) / math.sqrt(2))
    t = joint_quasiprob(plus, x_povm, SIGMA_Z)
    expected = [[oracles.kd_entry(oracles.KET_PLUS, E, P) for E in (oracles.outer(oracles.KET_PLUS, oracles.KET_PLUS), PM)]
                for P in (P1, P0)]
    np.testing.assert_allclose(t.entries, expected, atol=1e-12)
    np.testing.assert_allclose(t.entries, [[0.5, 0], [0.5, 0]], atol=1e-12)
    neg = negativity(t)
    assert neg.min_entry == pytest.approx(0, abs=1e-12)
    assert neg.negative_mass == pytest.approx(0, abs=1e-12)
    assert neg.classical


def test_estimates(psi_pi8, psi_complex, x_povm, z_povm):
    est = estimate_from_quasiprob(joint_quasiprob(psi_pi8, x_povm, SIGMA_Z))
    by_hand = (1 * 0.25 - 1 * oracles.kd_entry(oracles.PSI_PI8, PM, P1)) / \
        oracles.sandwich(oracles.PSI_PI8, PM).real
    assert est["-"] == pytest.approx(by_hand, abs=1e-12)
    assert est["-"] == pytest.approx(2.41421, abs=1e-5)
    assert estimate_from_quasiprob(joint_quasiprob(psi_pi8, z_povm, SIGMA_Z)).values() == pytest.approx([1, -1])
    assert estimate_from_quasiprob(joint_quasiprob(psi_complex, x_povm, SIGMA_Z)).values() == \
        pytest.approx([0, 0], abs=1e-12)


def test_zero_probability_column_undefined(z_povm):
    est = estimate_from_quasiprob(joint_quasiprob(Ket.basis(2, 0), z_povm, SIGMA_Z))
    assert est["1"] is None


def test_degenerate_cluster_is_gauge_invariant():
    r = rng(11)
    psi = random_ket(r, 3)
    povm = basis_to_povm(random_scenario(5, dim=3).basis)
    obs = Observable(np.diag([1.0, 1.0, -2.0]))
    t = joint_quasiprob(psi, povm, obs)
    assert t.ranks == (1, 2)
    # rotate inside the degenerate subspace: same operator, same table
    c, s = math.cos(0.7), math.sin(0.7)
    U = np.array([[c, -s * 1j, 0], [-s * 1j, c, 0], [0, 0, 1]])
    t2 = joint_quasiprob(psi, povm, Observable(U @ obs.matrix @ U.conj().T))
    np.testing.assert_allclose(t.entries, t2.entries, atol=1e-12)
    t3 = joint_quasiprob(psi, povm, identity(3))
    np.testing.assert_allclose(t3.entries[0], [p for p in t3.column_marginals()], atol=1e-12)


def _suite():
    return scenario_suite(100)


def test_marginals_and_cross_module_identity():
    for sc in _suite():
        t = joint_quasiprob(sc.psi, sc.povm, sc.obs)
        probs = [np.vdot(sc.psi.amps, e.matrix @ sc.psi.amps).real for e in sc.povm]
        np.testing.assert_allclose(t.column_marginals(), probs, atol=1e-10)
        es = sc.obs.eigensystem
        rows = [np.vdot(sc.psi.amps, es.projector(k) @ sc.psi.amps).real for k in range(len(es.clusters))]
        np.testing.assert_allclose(t.row_marginals(), rows, atol=1e-10)
        assert abs(t.entries.sum() - 1) < 1e-10
        est = estimate_from_quasiprob(t)
        opt, _ = optimal_assignment(sc.psi, sc.povm, sc.obs)
        for lab in opt:
            assert abs(est[lab] - opt[lab]) < 1e-10


def test_anomaly_implies_negativity():
    anomalous = 0
    for sc in _suite():
        opt, _ = optimal_assignment(sc.psi, sc.povm, sc.obs)
        w = sc.obs.eigensystem.eigenvalues
        if any(v is not None and not (w[0] - 1e-9 <= v <= w[-1] + 1e-9) for v in opt.values()):
            anomalous += 1
            assert negativity(joint_quasiprob(sc.psi, sc.povm, sc.obs)).min_entry < -1e-10
    assert anomalous > 0


def test_commuting_measurement_is_classical():
    for seed in range(30):
        r = rng(seed)
        dim = 2 + seed % 4
        obs = random_hermitian(r, dim)
        V = np.column_stack([v.amps for v in obs.eigensystem.eigenvectors])
        # effects diagonal in the eigenbasis of A commute with A
        weights = r.dirichlet(np.ones(3), size=dim)
        povm = validate_povm([V @ np.diag(weights[:, k]) @ V.conj().T for k in range(3)])
        for e in povm:
            assert np.linalg.norm(e.matrix @ obs.matrix - obs.matrix @ e.matrix) < 1e-10
        assert negativity(joint_quasiprob(random_ket(r, dim), povm, obs)).min_entry >= -1e-10
