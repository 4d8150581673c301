import numpy as np
import pytest

from relspin.constants import SPEED_OF_LIGHT
from relspin.dirac import (
    ALPHA,
    BETA,
    I4,
    SIGMA,
    SPIN,
    PlaneWaveLabel,
    anticommutator,
    commutator,
    component_index,
    dagger,
    dirac_matrices,
    fw_basis_state,
    fw_transform,
    h0_kernel,
    hermiticity_defect,
    p0_value,
    standard_rep_eigenstate,
)

C = SPEED_OF_LIGHT


def test_clifford_algebra():
    for i in range(3):
        assert np.allclose(anticommutator(ALPHA[i], BETA), 0)
        for j in range(3):
            expected = 2 * I4 if i == j else 0 * I4
            assert np.allclose(anticommutator(ALPHA[i], ALPHA[j]), expected)
    assert np.allclose(BETA @ BETA, I4)


def test_pauli_and_spin_algebra():
    # [S_i, S_j] = 2i eps_ijk S_k for both sigma and Sigma
    for mats in (SIGMA, SPIN):
        assert np.allclose(commutator(mats[0], mats[1]), 2j * mats[2])
        assert np.allclose(commutator(mats[1], mats[2]), 2j * mats[0])
    for m in (*ALPHA, BETA, *SPIN):
        assert hermiticity_defect(m) == 0.0


def test_constants_read_only_and_copies():
    with pytest.raises(ValueError):
        ALPHA[0, 0, 0] = 1
    mats = dirac_matrices()
    mats.alpha1[0, 0] = 7
    assert ALPHA[0, 0, 0] == 0


def test_component_index():
    assert component_index("y") == 1
    assert component_index(2) == 2
    with pytest.raises(ValueError):
        component_index("w")
    with pytest.raises(ValueError):
        component_index(3)


def test_fw_transform_unitary_and_diagonalizing(rng):
    p = rng.normal(size=(20, 3)) * C * np.logspace(-3, 3, 20)[:, None]
    t = fw_transform(p)
    assert np.abs(dagger(t) @ t - I4).max() < 1e-12
    d = dagger(t) @ h0_kernel(p) @ t
    energy = C * p0_value(p)
    expected = energy[:, None, None] * BETA
    assert np.abs(d - expected).max() / energy.max() < 1e-13
    assert np.allclose(fw_transform(np.zeros(3)), I4)


def test_standard_rep_eigenstates(rng):
    p = rng.normal(size=3) * 50
    h = h0_kernel(p)
    e = C * p0_value(p)
    for label in PlaneWaveLabel.all_at(p):
        psi = standard_rep_eigenstate(label)
        assert np.allclose(h @ psi, label.energy_sign * e * psi, rtol=0, atol=1e-9 * e)
        assert np.isclose(np.linalg.norm(psi), 1.0)


def test_plane_wave_phase():
    label = PlaneWaveLabel(1, (1.0, 0.0, 0.0), "down")
    r = np.array([[0.0, 0, 0], [np.pi, 0, 0]])
    psi = fw_basis_state(label, r)
    assert psi.shape == (2, 4)
    assert np.allclose(psi[:, 1], [1, -1])


def test_plane_wave_label_validation():
    with pytest.raises(ValueError):
        PlaneWaveLabel(0, (0, 0, 0), "up")
    with pytest.raises(ValueError):
        PlaneWaveLabel(1, (0, 0, 0), "sideways")
    with pytest.raises(ValueError):
        PlaneWaveLabel(1, (0, 0), "up")
