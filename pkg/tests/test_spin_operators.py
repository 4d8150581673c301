import json

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from relspin.constants import SPEED_OF_LIGHT
from relspin.dirac import I4, SPIN, dagger, fw_transform, h0_kernel
from relspin.errors import DegenerateMomentum
from relspin.spin_operators import (
    EXPECTED_PROPERTIES,
    POSITIVE_ENERGY_EQUIVALENT,
    PROPERTIES,
    SpinOperatorKind,
    check_properties,
    fw_mean_position_correction,
    fw_representation,
    newton_wigner_form,
    positive_energy_equivalence,
    property_table,
    pryce_position_correction,
    pryce_transform,
    sample_momenta,
    spin_kernel,
    spin_vector,
)

C = SPEED_OF_LIGHT
KINDS = list(SpinOperatorKind)


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.value)
def test_rest_frame_limit_is_half_sigma(kind):
    # at small momentum every kind approaches Sigma/2 in the positive-energy block
    p = np.array([0.0, 0.0, 1e-6 * C])
    for j in range(3):
        s = spin_kernel(kind, j, p)
        assert np.abs(s[:2, :2] - SPIN[j][:2, :2] / 2).max() < 1e-6


@pytest.mark.parametrize("kind", [SpinOperatorKind.PRYCE, SpinOperatorKind.FRADKIN_GOOD])
def test_directional_kinds_reject_zero_momentum(kind):
    with pytest.raises(DegenerateMomentum):
        spin_kernel(kind, "z", np.zeros(3))
    s = spin_kernel(kind, "z", np.zeros(3), zero_mode="limit")
    assert np.all(np.isfinite(s))


def test_parse_aliases():
    assert SpinOperatorKind.parse("fw") is SpinOperatorKind.FOLDY_WOUTHUYSEN
    assert SpinOperatorKind.parse("FG") is SpinOperatorKind.FRADKIN_GOOD
    assert SpinOperatorKind.parse("Pryce") is SpinOperatorKind.PRYCE
    with pytest.raises(ValueError):
        SpinOperatorKind.parse("Thomas")


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.value)
def test_property_rows_match_reference(kind):
    rep = check_properties(kind, samples=100, seed=2024)
    assert rep.matches_reference(), rep.mismatches()


def test_verdicts_are_sample_and_seed_stable():
    base = property_table(samples=100, seed=2024)
    for samples, seed in ((10, 2024), (100, 7), (30, 99)):
        other = property_table(samples=samples, seed=seed)
        assert [r.verdicts for r in other.reports] == [r.verdicts for r in base.reports]


def test_table_json_schema():
    doc = json.loads(property_table(samples=5).to_json())
    assert doc["schema"] == 1
    assert doc["columns"] == list(PROPERTIES)
    assert len(doc["rows"]) == 7 and doc["all_match"]


def test_expected_table_shape():
    assert set(EXPECTED_PROPERTIES) == set(KINDS)
    assert all(len(v) == 5 for v in EXPECTED_PROPERTIES.values())


def test_fw_spin_is_sigma_half_in_fw_representation(rng):
    p = sample_momenta(20, 3)
    for j in range(3):
        block = fw_representation(SpinOperatorKind.FOLDY_WOUTHUYSEN, j, p)
        assert np.abs(block - SPIN[j] / 2).max() < 1e-12


def test_newton_wigner_equals_fw():
    p = sample_momenta(100, 11)
    for j in range(3):
        nw = newton_wigner_form(j, p)
        fw = spin_kernel(SpinOperatorKind.FOLDY_WOUTHUYSEN, j, p)
        assert np.abs(nw - fw).max() < 1e-12


def test_transform_unitarity():
    p = sample_momenta(100, 5)
    for t in (fw_transform(p), pryce_transform(p)):
        assert np.abs(dagger(t) @ t - I4).max() < 1e-12


def test_positive_energy_equivalence():
    p = sample_momenta(50, 8)
    for comp in "xyz":
        assert positive_energy_equivalence(POSITIVE_ENERGY_EQUIVALENT, p, comp) < 1e-12
    # Czachor and Pauli blocks differ once momenta are relativistic
    at_mc = np.array([[0.6, 0.0, 0.8]]) * C
    for other in (SpinOperatorKind.CZACHOR, SpinOperatorKind.PAULI):
        assert positive_energy_equivalence([SpinOperatorKind.FOLDY_WOUTHUYSEN, other], at_mc) > 1e-3


def test_positive_energy_superposition_expectations(rng):
    p = np.array([0.3, -0.5, 0.8]) * C
    u = fw_transform(p)[:, :2]
    coef = rng.normal(size=2) + 1j * rng.normal(size=2)
    psi = u @ (coef / np.linalg.norm(coef))
    vals = [np.vdot(psi, spin_kernel(k, "z", p) @ psi) for k in POSITIVE_ENERGY_EQUIVALENT]
    assert np.ptp(np.real(vals)) < 1e-12 and np.abs(np.imag(vals)).max() < 1e-12


def _finite_difference_correction(transform, p, j, h):
    # i T d_j T^-1 by central differences in momentum
    e = np.zeros(3)
    e[j] = h
    t = transform(p)
    deriv = (dagger(transform(p + e)) - dagger(transform(p - e))) / (2 * h)
    return 1j * t @ deriv


def test_fw_position_correction_against_finite_differences(rng):
    for _ in range(5):
        p = rng.normal(size=3) * C * rng.uniform(0.1, 3)
        for j in range(3):
            ref = _finite_difference_correction(fw_transform, p, j, 1e-4 * C)
            assert np.abs(fw_mean_position_correction(j, p) - ref).max() < 1e-8 / C


def test_pryce_position_correction_against_finite_differences(rng):
    for _ in range(5):
        p = rng.normal(size=3) * C
        for j in range(3):
            ref = _finite_difference_correction(pryce_transform, p, j, 1e-4 * C)
            assert np.abs(pryce_position_correction(j, p) - ref).max() < 1e-8 / C


def test_rotation_covariance_of_fw_spin(rng):
    p = rng.normal(size=3) * C
    rot = Rotation.from_rotvec([0.3, -0.2, 0.9])
    r = rot.as_matrix()
    angle = np.linalg.norm(rot.as_rotvec())
    n = rot.as_rotvec() / angle
    d = np.cos(angle / 2) * I4 - 1j * np.sin(angle / 2) * np.tensordot(n, SPIN, axes=1)
    s_rot = spin_vector(SpinOperatorKind.FOLDY_WOUTHUYSEN, r @ p)
    s = spin_vector(SpinOperatorKind.FOLDY_WOUTHUYSEN, p)
    lhs = np.array([dagger(d) @ s_rot[i] @ d for i in range(3)])
    rhs = np.tensordot(r, s, axes=1)
    assert np.abs(lhs - rhs).max() < 1e-12


def test_fw_spin_commutes_with_free_hamiltonian():
    p = sample_momenta(10, 1)
    h = h0_kernel(p)
    for j in range(3):
        s = spin_kernel(SpinOperatorKind.FOLDY_WOUTHUYSEN, j, p)
        scale = np.linalg.norm(h, ord=2, axis=(-2, -1)).max()
        assert np.abs(s @ h - h @ s).max() / scale < 1e-12
