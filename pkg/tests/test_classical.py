import math
import warnings

import numpy as np
import pytest

from relspin.classical import (
    ClassicalSpin,
    TorqueModel,
    default_classical_config,
    exact_secular_rates,
    integrate_ensemble,
    plateau_trajectories,
    predicted_rates,
    secular_rates,
    torque,
    uniform_ensemble,
    wavelength_averaged_rotation,
)
from relspin.errors import RegimeViolation
from relspin.laser.fields import LaserConfig, omega_prediction, ponderomotive_spin_frequency


@pytest.fixture(scope="module")
def cfg():
    return default_classical_config(0.02, flat_periods=50, ramp_periods=2)


def test_spin_density_torque_examples(cfg):
    t = cfg.duration / 2
    assert np.allclose(torque(ClassicalSpin(0.3, [0.5, 0, 0]), t, cfg, "SpinDensityOnly"), 0)
    assert np.allclose(torque(ClassicalSpin(cfg.wavelength / 4, [0, 0, 0.5]), t, cfg, "SpinDensityOnly"), 0,
                       atol=1e-12 * ponderomotive_spin_frequency(cfg))
    # at an antinode of cos^2 the spin turns about +e_x at 2 Omega_P
    ds = torque(ClassicalSpin(0.0, [0, 0, 0.5]), t, cfg, "SpinDensityOnly")
    assert np.allclose(ds, [0, -2 * ponderomotive_spin_frequency(cfg) * 0.5, 0])


def test_torques_are_perpendicular_to_spin(cfg, rng):
    for model in TorqueModel:
        s = rng.normal(size=3)
        ds = torque(ClassicalSpin(rng.uniform(0, cfg.wavelength), s), 0.37 * cfg.duration, cfg, model)
        assert abs(np.dot(ds, s)) < 1e-12 * np.linalg.norm(ds) * np.linalg.norm(s)


def test_both_is_sum_of_parts(cfg):
    sp = ClassicalSpin(0.7, [0.1, 0.2, 0.4])
    t = 0.6 * cfg.duration
    total = torque(sp, t, cfg, "Both")
    assert np.allclose(total, torque(sp, t, cfg, "MagneticOnly") + torque(sp, t, cfg, "SpinDensityOnly"))


def test_requires_circular_standing_wave(cfg, wavelength):
    lin = LaserConfig.from_periods(10.0, wavelength, 2, 1, ellipticity=0.0)
    with pytest.raises(ValueError):
        torque(ClassicalSpin(0, [0, 0, 0.5]), 0.0, lin, "Both")
    with pytest.raises(ValueError):
        TorqueModel.parse("Thomas")


def test_zero_field_keeps_spins_static(wavelength):
    cfg = LaserConfig.from_periods(0.0, wavelength, 3, 1)
    traj = integrate_ensemble(uniform_ensemble(cfg, 8), cfg, "Both")
    assert np.allclose(traj.spins, traj.spins[:, :1])


def test_regime_warning(wavelength):
    cfg = default_classical_config(0.2, flat_periods=1, ramp_periods=1)
    with pytest.warns(RegimeViolation):
        integrate_ensemble(uniform_ensemble(cfg, 2), cfg, "MagneticOnly")
    with warnings.catch_warnings():
        warnings.simplefilter("error", RegimeViolation)
        ok = default_classical_config(0.05, flat_periods=1, ramp_periods=1)
        integrate_ensemble(uniform_ensemble(ok, 2), ok, "MagneticOnly")


@pytest.fixture(scope="module")
def runs(cfg):
    return {m: plateau_trajectories(cfg, m, count=32) for m in TorqueModel}


def test_length_conserved(runs):
    for traj in runs.values():
        size = np.linalg.norm(traj.spins, axis=-1)
        assert np.abs(size / 0.5 - 1).max() < 1e-10


def test_rotation_patterns(cfg, runs):
    omega_p = ponderomotive_spin_frequency(cfg)
    for model, traj in runs.items():
        rates = secular_rates(traj)
        assert np.abs(rates - predicted_rates(traj.x, cfg, model)).max() < 0.05 * 2 * omega_p
    mag = secular_rates(runs[TorqueModel.MAGNETIC_ONLY])
    dens = secular_rates(runs[TorqueModel.SPIN_DENSITY_ONLY])
    kx = cfg.wavenumber * runs[TorqueModel.BOTH].x
    # sin^2 pattern with positive sense, cos^2 pattern with negative sense
    assert np.corrcoef(mag, np.sin(kx) ** 2)[0, 1] > 0.999
    assert np.corrcoef(-dens, np.cos(kx) ** 2)[0, 1] > 0.999


def test_exact_secular_rate_oracle(cfg, runs):
    # the rotating-frame closed form is an independent route to the fitted rates
    omega_p = ponderomotive_spin_frequency(cfg)
    for model, traj in runs.items():
        diff = secular_rates(traj) - exact_secular_rates(traj.x, cfg, model)
        assert np.abs(diff).max() < 5e-3 * omega_p


def test_wavelength_averages(cfg, runs):
    omega_p = ponderomotive_spin_frequency(cfg)
    assert math.isclose(wavelength_averaged_rotation(runs[TorqueModel.MAGNETIC_ONLY]) / omega_p, 1.0, abs_tol=0.05)
    assert math.isclose(wavelength_averaged_rotation(runs[TorqueModel.SPIN_DENSITY_ONLY]) / omega_p, -1.0,
                        abs_tol=0.05)
    assert abs(wavelength_averaged_rotation(runs[TorqueModel.BOTH])) < 0.02 * omega_p


def test_classical_residual_cannot_supply_quartic_rate(cfg, runs):
    # the cancellation leaves a remainder far below the quantum quartic rate at the same field
    residual = abs(wavelength_averaged_rotation(runs[TorqueModel.BOTH]))
    assert residual < 0.01 * omega_prediction(cfg)


def test_csv_rows(runs, tmp_path):
    from relspin.classical import write_trajectories_csv

    path = tmp_path / "traj.csv"
    write_trajectories_csv(path, [runs[TorqueModel.BOTH]], ["x=1"])
    lines = path.read_text().splitlines()
    assert lines[0] == "# x=1"
    assert lines[1] == "model,particle,x,t,s_x,s_y,s_z"
    traj = runs[TorqueModel.BOTH]
    assert len(lines) == 2 + traj.spins.shape[0] * traj.spins.shape[1]
