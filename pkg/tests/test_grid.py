import math

import numpy as np
import pytest

from relspin.dirac import BETA, SPIN
from relspin.errors import BoxTooSmall, KernelSingularAtZeroMode, NotNormalized
from relspin.grid import (
    GridSpec,
    LocalMatrix,
    SpinorField,
    apply_momentum_kernel,
    dump_field,
    expectation,
    hydrogenic_grid,
    load_field,
    momentum_quadratic_form,
    sample_state,
    variance_of_position,
)
from relspin.hydrogenic import analytic_pauli_spin_z, ground_state
from relspin.spin_operators import SpinOperatorKind, spin_expectation, spin_kernel


def _random_field(rng, grid, ncomp=4):
    data = rng.normal(size=(ncomp,) + grid.shape) + 1j * rng.normal(size=(ncomp,) + grid.shape)
    return SpinorField(grid, data).normalized()


@pytest.mark.parametrize("n", [10, 17, 14, 7])
def test_grid_rejects_awkward_sizes(n):
    with pytest.raises(ValueError):
        GridSpec.cube(n, 1.0)


def test_grid_accepts_fft_friendly_sizes():
    for n in (16, 48, 96, 128):
        assert GridSpec.line(n, 2.0).points == (n,)
    with pytest.raises(ValueError):
        GridSpec.line(32, -1.0)


def test_cell_centred_points_skip_origin():
    g = GridSpec.line(16, 4.0)
    x = g.axis(0)
    assert math.isclose(x[0], -2 + 0.125) and not np.any(x == 0)
    assert math.isclose(x.mean(), 0.0, abs_tol=1e-15)


def test_parseval(rng):
    f = _random_field(rng, GridSpec.cube(16, 3.0))
    assert math.isclose(f.momentum_norm(), f.norm(), rel_tol=1e-12)


def test_kernel_application_is_linear(rng):
    g = GridSpec.cube(16, 5.0)
    a, b = _random_field(rng, g), _random_field(rng, g)
    kern = lambda p: spin_kernel(SpinOperatorKind.FOLDY_WOUTHUYSEN, "z", p)  # noqa: E731
    lhs = apply_momentum_kernel(a * 2.0 + b * 3j, kern)
    rhs = apply_momentum_kernel(a, kern) * 2.0 + apply_momentum_kernel(b, kern) * 3j
    assert np.abs(lhs.data - rhs.data).max() < 1e-12


def test_identity_and_scalar_kernels(rng):
    g = GridSpec.cube(16, 2.0)
    f = _random_field(rng, g)
    same = apply_momentum_kernel(f, lambda p: np.ones(p.shape[:-1]))
    assert np.abs(same.data - f.data).max() < 1e-13
    # the p^2 kernel matches the spectral second derivative of a plane wave
    phase = np.broadcast_to(np.exp(1j * 2 * np.pi * g.coordinate(0) / 2.0), g.shape)
    wave = SpinorField(g, np.stack([phase] * 4))
    lap = apply_momentum_kernel(wave, lambda p: np.sum(p * p, axis=-1))
    assert np.abs(lap.data - (np.pi**2) * wave.data).max() < 1e-10


def test_quadratic_form_matches_inner_product(rng):
    g = GridSpec.cube(16, 4.0)
    f = _random_field(rng, g)
    kern = lambda p: spin_kernel(SpinOperatorKind.CZACHOR, "x", p)  # noqa: E731
    direct = momentum_quadratic_form(f, kern)
    via_apply = f.inner(apply_momentum_kernel(f, kern))
    assert abs(direct - via_apply) < 1e-12


def test_local_matrix_expectation(rng):
    f = SpinorField.uniform(GridSpec.cube(16, 1.0), [1, 0, 0, 0])
    assert math.isclose(expectation(f, SPIN[2] / 2).real, 0.5)
    assert math.isclose(LocalMatrix(BETA).expectation(f).real, 1.0)


def test_expectation_requires_normalized_field():
    f = SpinorField.uniform(GridSpec.cube(16, 1.0), [1, 0, 0, 0]) * 1.1
    with pytest.raises(NotNormalized):
        expectation(f, SPIN[2])


def test_singular_kernel_surfaces_at_zero_mode():
    f = SpinorField.uniform(GridSpec.cube(16, 1.0), [1, 0, 0, 0])
    with pytest.raises(KernelSingularAtZeroMode):
        apply_momentum_kernel(f, lambda p: spin_kernel(SpinOperatorKind.PRYCE, "z", p))


def test_dump_load_round_trip(tmp_path, rng):
    f = _random_field(rng, GridSpec((16, 18, 20), (1.0, 2.0, 3.0)))
    path = tmp_path / "field.bin"
    dump_field(path, f)
    g = load_field(path)
    assert g.grid == f.grid
    assert np.array_equal(g.data, f.data)
    path.write_bytes(b"garbage!" + path.read_bytes()[8:])
    with pytest.raises(ValueError):
        load_field(path)


def test_box_too_small():
    with pytest.raises(BoxTooSmall):
        sample_state(ground_state(1), GridSpec.cube(32, 8.0))


def test_small_grid_hydrogen():
    f = sample_state(ground_state(1), hydrogenic_grid(1, 64))
    assert f.diagnostics["captured"] > 0.999999
    assert abs(f.norm() - 1) < 1e-12
    assert abs(f.diagnostics["norm_defect"]) < 1e-2
    s = spin_expectation(f, "Pauli").real
    assert math.isclose(s, analytic_pauli_spin_z(1), abs_tol=1e-4)
    assert math.isclose(variance_of_position(f, "Pauli"), 1.0, rel_tol=0.02)


def test_sign_flip_for_opposite_m():
    g = hydrogenic_grid(60, 48)
    up = sample_state(ground_state(60, 0.5), g)
    down = sample_state(ground_state(60, -0.5), g)
    for kind in ("FoldyWouthuysen", "Frenkel", "Pryce"):
        a, b = spin_expectation(up, kind).real, spin_expectation(down, kind).real
        assert math.isclose(a, -b, rel_tol=1e-10, abs_tol=1e-12)
