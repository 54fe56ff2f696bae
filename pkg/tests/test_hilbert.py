import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmeter import SIGMA_X, SIGMA_Y, SIGMA_Z, Ket, ValidationError, eigensystem, expectation, validate_hermitian
from qmeter.errors import DimensionMismatch
from qmeter.generators import random_hermitian, random_ket, rng
from qmeter.hilbert import identity

import oracles


def test_expectation_examples(psi_pi8):
    assert expectation(SIGMA_Z, Ket.basis(2, 0)) == 1
    assert expectation(SIGMA_X, Ket.basis(2, 0)) == 0
    expected = math.cos(math.pi / 8) ** 2 - math.sin(math.pi / 8) ** 2
    assert expected == pytest.approx(oracles.sandwich(oracles.PSI_PI8, oracles.SZ).real, abs=1e-15)
    assert expectation(SIGMA_Z, psi_pi8) == pytest.approx(0.70711, abs=1e-5)
    assert expectation(SIGMA_Z, psi_pi8) == pytest.approx(expected, abs=1e-12)


def test_expectation_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        expectation(SIGMA_Z, Ket([1, 0, 0]))


def test_eigensystem_pauli_z():
    es = eigensystem(SIGMA_Z)
    np.testing.assert_array_equal(es.eigenvalues, [-1, 1])
    assert es.eigenvectors[0] == Ket.basis(2, 1)
    assert es.eigenvectors[1] == Ket.basis(2, 0)
    assert es.clusters == ((0,), (1,))


def test_eigensystem_identity_is_one_cluster():
    es = eigensystem(identity(2))
    np.testing.assert_allclose(es.eigenvalues, [1, 1])
    assert es.clusters == ((0, 1),)


def test_eigensystem_pauli_x():
    es = eigensystem(SIGMA_X)
    np.testing.assert_allclose(es.eigenvalues, [-1, 1], atol=1e-12)
    r = 1 / math.sqrt(2)
    np.testing.assert_allclose(es.eigenvectors[0].amps, [r, -r], atol=1e-12)
    np.testing.assert_allclose(es.eigenvectors[1].amps, [r, r], atol=1e-12)
    np.testing.assert_allclose(es.reconstruct(), SIGMA_X.matrix, atol=1e-12)


def test_phase_convention_largest_component_real_positive():
    for seed in range(10):
        es = eigensystem(random_hermitian(rng(seed), 4))
        for v in es.eigenvectors:
            j = int(np.argmax(np.abs(v.amps)))
            assert v.amps[j].imag == pytest.approx(0, abs=1e-14)
            assert v.amps[j].real > 0


@pytest.mark.parametrize("raw", [[[0, 1], [1, 0]], [[0, 1j], [-1j, 0]]])
def test_validate_hermitian_accepts(raw):
    obs = validate_hermitian(raw)
    np.testing.assert_array_equal(obs.matrix, np.array(raw, dtype=complex))


def test_validate_hermitian_rejects_with_asymmetry():
    with pytest.raises(ValidationError, match=r"max asymmetry 1\b"):
        validate_hermitian([[0, 1], [0, 0]])


def test_validate_hermitian_rejects_non_square():
    with pytest.raises(ValidationError, match="square"):
        validate_hermitian([[0, 1, 2], [1, 0, 3]])


def test_ket_rejects_bad_norm_and_nan():
    with pytest.raises(ValidationError, match="norm 0.500000 outside tolerance"):
        Ket([0.5, 0])
    with pytest.raises(ValidationError):
        Ket([np.nan, 1])
    assert np.linalg.norm(Ket.normalized([3, 4j]).amps) == pytest.approx(1, abs=1e-15)


def test_values_are_immutable():
    k = Ket([1, 0])
    with pytest.raises(ValueError):
        k.amps[0] = 2
    with pytest.raises(AttributeError):
        k.amps = None
    with pytest.raises(ValueError):
        SIGMA_Y.matrix[0, 0] = 1


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(2, 6))
def test_random_eigensystem_invariants(seed, dim):
    r = rng(seed)
    obs = random_hermitian(r, dim)
    es = eigensystem(obs)
    assert np.max(np.abs(es.reconstruct() - obs.matrix)) < 1e-9
    V = np.column_stack([v.amps for v in es.eigenvectors])
    assert np.max(np.abs(V.conj().T @ V - np.eye(dim))) < 1e-9
    assert np.all(np.diff(es.eigenvalues) >= 0)
    for lam, v in zip(es.eigenvalues, es.eigenvectors):
        assert abs(expectation(obs, v) - lam) < 1e-9
    psi = random_ket(r, dim)
    z = np.vdot(psi.amps, obs.matrix @ psi.amps)
    assert abs(z.imag) < 1e-10
