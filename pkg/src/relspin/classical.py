"""Classical spin ensemble in a circularly polarized standing wave.

Spins sit at fixed positions along the beam axis and precess under either the
rotating magnetic field, the photonic spin density term, or both.  The
magnetic torque alone gives a secular rotation 2 Omega_P sin^2(kx) about e_x,
the spin density term 2 Omega_P cos^2(kx) in the opposite sense, so their
wavelength average cancels at order E^2.

Rotation angles use the same convention as the quantum backends,
phi = atan2(s_y, s_z); a positive rate means s turns from e_z towards e_y.
"""

from __future__ import annotations

import csv
import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .constants import ELECTRON_CHARGE, ELECTRON_MASS, SPEED_OF_LIGHT
from .errors import RegimeViolation
from .laser.fields import (
    LaserConfig,
    field_sample,
    larmor_frequency,
    ponderomotive_spin_frequency,
    window,
)

REGIME_LIMIT = 0.1  # largest Omega_L / omega accepted without a warning


class TorqueModel(str, enum.Enum):
    MAGNETIC_ONLY = "MagneticOnly"
    SPIN_DENSITY_ONLY = "SpinDensityOnly"
    BOTH = "Both"

    @classmethod
    def parse(cls, value) -> "TorqueModel":
        if isinstance(value, cls):
            return value
        for m in cls:
            if str(value).lower() in (m.value.lower(), m.name.lower()):
                return m
        raise ValueError(f"unknown torque model {value!r}")


@dataclass
class ClassicalSpin:
    """One ensemble member: fixed position x (a.u.) and spin vector s."""

    x: float
    s: np.ndarray

    def __post_init__(self):
        self.s = np.asarray(self.s, dtype=float)
        if self.s.shape != (3,):
            raise ValueError("spin vector must have three components")

    @classmethod
    def along_z(cls, x: float, magnitude: float = 0.5) -> "ClassicalSpin":
        return cls(float(x), np.array([0.0, 0.0, magnitude]))


def _check_circular(cfg: LaserConfig):
    if not math.isclose(cfg.ellipticity, math.pi / 2, abs_tol=1e-12):
        raise ValueError("the classical spin model is defined for circular polarization (ellipticity pi/2)")
    if cfg.waves != "standing":
        raise ValueError("the classical spin model needs the standing wave")


def spin_density_strength(x, cfg: LaserConfig):
    """Coefficient a(x) in ds/dt = -a s x e_x, i.e. (qE)^2 lambda cos^2(kx) / (pi m^2 c^3)."""
    q, m, c = ELECTRON_CHARGE, ELECTRON_MASS, SPEED_OF_LIGHT
    return ((q * cfg.amplitude) ** 2 * cfg.wavelength * np.cos(cfg.wavenumber * np.asarray(x)) ** 2
            / (math.pi * m * m * c**3))


def _torque_batch(x, s, t, cfg: LaserConfig, model: TorqueModel) -> np.ndarray:
    """ds/dt for positions x (n,) and spins s (n, 3)."""
    out = np.zeros_like(s)
    if model in (TorqueModel.MAGNETIC_ONLY, TorqueModel.BOTH):
        b = field_sample(x, t, cfg).B
        out += ELECTRON_CHARGE / ELECTRON_MASS * np.cross(s, b)
    if model in (TorqueModel.SPIN_DENSITY_ONLY, TorqueModel.BOTH):
        # E x A carries the window squared; the closed form is the plateau value
        a = spin_density_strength(x, cfg) * float(window(t, cfg)) ** 2
        out -= a[:, None] * np.cross(s, [1.0, 0.0, 0.0])
    return out


def torque(spin: ClassicalSpin, t: float, cfg: LaserConfig, model) -> np.ndarray:
    """Time derivative of one spin vector under the selected torque(s)."""
    _check_circular(cfg)
    model = TorqueModel.parse(model)
    return _torque_batch(np.array([spin.x]), spin.s[None, :], t, cfg, model)[0]


@dataclass
class Trajectories:
    """Sampled spin vectors: ``spins`` has shape (particles, samples, 3)."""

    x: np.ndarray
    times: np.ndarray
    spins: np.ndarray
    model: TorqueModel
    config: LaserConfig
    dt: float

    def angles(self) -> np.ndarray:
        """Unwrapped rotation angle about e_x per particle, shape (particles, samples)."""
        phi = np.arctan2(self.spins[..., 1], self.spins[..., 2])
        return np.unwrap(phi, axis=1)

    def rows(self):
        for i, x in enumerate(self.x):
            for j, t in enumerate(self.times):
                yield (i, x, t, *self.spins[i, j])


def integrate_ensemble(spins, cfg: LaserConfig, model, t_end: float | None = None,
                       dt: float | None = None, *, t_start: float = 0.0,
                       sample_every: int | None = None) -> Trajectories:
    """Classic fourth-order Runge-Kutta, renormalizing each |s| after every step.

    ``dt`` defaults to 1/128 of an optical period; samples are taken once per
    optical period unless ``sample_every`` (in steps) says otherwise.
    """
    _check_circular(cfg)
    model = TorqueModel.parse(model)
    ratio = larmor_frequency(cfg) / cfg.angular_frequency
    if ratio > REGIME_LIMIT:
        warnings.warn(f"Omega_L/omega = {ratio:.3g} exceeds {REGIME_LIMIT}; the secular picture "
                      "assumes Omega_L << omega", RegimeViolation, stacklevel=2)
    t_end = cfg.duration if t_end is None else t_end
    steps_per_period = 128
    if dt is None:
        dt = cfg.period / steps_per_period
    nsteps = max(1, round((t_end - t_start) / dt))
    dt = (t_end - t_start) / nsteps
    if sample_every is None:
        sample_every = max(1, round(cfg.period / dt))

    x = np.array([sp.x for sp in spins], dtype=float)
    s = np.array([sp.s for sp in spins], dtype=float)
    size = np.linalg.norm(s, axis=1, keepdims=True)
    f = lambda tt, ss: _torque_batch(x, ss, tt, cfg, model)  # noqa: E731

    times, samples = [t_start], [s.copy()]
    for n in range(nsteps):
        t = t_start + n * dt
        k1 = f(t, s)
        k2 = f(t + dt / 2, s + dt / 2 * k1)
        k3 = f(t + dt / 2, s + dt / 2 * k2)
        k4 = f(t + dt, s + dt * k3)
        s = s + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        s *= size / np.linalg.norm(s, axis=1, keepdims=True)
        if (n + 1) % sample_every == 0 or n + 1 == nsteps:
            times.append(t + dt)
            samples.append(s.copy())
    return Trajectories(x, np.array(times), np.stack(samples, axis=1), model, cfg, dt)


def uniform_ensemble(cfg: LaserConfig, count: int = 64, magnitude: float = 0.5) -> list[ClassicalSpin]:
    """Spins along e_z at cell-centred positions covering one wavelength."""
    xs = (np.arange(count) + 0.5) * cfg.wavelength / count
    return [ClassicalSpin.along_z(x, magnitude) for x in xs]


def plateau_trajectories(cfg: LaserConfig, model, count: int = 64, dt: float | None = None) -> Trajectories:
    """Integrate a uniform ensemble through the full pulse, sampled once per optical period."""
    return integrate_ensemble(uniform_ensemble(cfg, count), cfg, model, cfg.duration, dt)


def secular_rates(traj: Trajectories, t_from: float | None = None, t_to: float | None = None) -> np.ndarray:
    """Per-particle secular rate d(phi)/dt from a linear fit over [t_from, t_to].

    The default window is the pulse plateau; with stroboscopic samples the
    fast wiggle at the optical frequency drops out.
    """
    cfg = traj.config
    t_from = cfg.ramp if t_from is None else t_from
    t_to = cfg.duration - cfg.ramp if t_to is None else t_to
    tol = 1e-9 * cfg.period
    sel = (traj.times >= t_from - tol) & (traj.times <= t_to + tol)
    if sel.sum() < 2:
        raise ValueError("fewer than two samples in the fit window")
    ang = traj.angles()[:, sel]
    slopes = np.polyfit(traj.times[sel], ang.T, 1)[0]
    return np.asarray(slopes)


def wavelength_averaged_rotation(traj: Trajectories) -> float:
    """Ensemble mean of the secular rates; positions must cover a wavelength uniformly."""
    return float(np.mean(secular_rates(traj)))


def predicted_rates(x, cfg: LaserConfig, model) -> np.ndarray:
    """Leading-order secular rates: 2 Omega_P sin^2 kx (magnetic), -2 Omega_P cos^2 kx (spin density)."""
    model = TorqueModel.parse(model)
    kx = cfg.wavenumber * np.asarray(x)
    omega_p = ponderomotive_spin_frequency(cfg)
    rate = np.zeros_like(kx)
    if model in (TorqueModel.MAGNETIC_ONLY, TorqueModel.BOTH):
        rate += 2 * omega_p * np.sin(kx) ** 2
    if model in (TorqueModel.SPIN_DENSITY_ONLY, TorqueModel.BOTH):
        rate -= 2 * omega_p * np.cos(kx) ** 2
    return rate


def exact_secular_rates(x, cfg: LaserConfig, model) -> np.ndarray:
    """Rotating-frame rate sqrt((omega - a)^2 + b^2) - omega for a spin starting normal to e_x.

    b = 2 Omega_L |sin kx| is the rotating magnetic precession speed and
    a = 2 Omega_P cos^2 kx the spin density precession speed about e_x.
    """
    model = TorqueModel.parse(model)
    kx = cfg.wavenumber * np.asarray(x)
    om = cfg.angular_frequency
    b = np.zeros_like(kx)
    a = np.zeros_like(kx)
    if model in (TorqueModel.MAGNETIC_ONLY, TorqueModel.BOTH):
        b = 2 * larmor_frequency(cfg) * np.abs(np.sin(kx))
    if model in (TorqueModel.SPIN_DENSITY_ONLY, TorqueModel.BOTH):
        a = 2 * ponderomotive_spin_frequency(cfg) * np.cos(kx) ** 2
    return np.hypot(om - a, b) - om


def default_classical_config(larmor_ratio: float = 0.02, wavelength: float | None = None,
                             flat_periods: int = 60, ramp_periods: int = 5) -> LaserConfig:
    """Circular standing wave with Omega_L / omega = ``larmor_ratio`` at 0.159 nm."""
    from .constants import length_to_au

    lam = length_to_au(0.159e-9) if wavelength is None else wavelength
    omega = 2 * math.pi * SPEED_OF_LIGHT / lam
    amp = larmor_ratio * omega * ELECTRON_MASS * SPEED_OF_LIGHT / abs(ELECTRON_CHARGE)
    return LaserConfig.from_periods(amp, lam, flat_periods, ramp_periods)


def write_trajectories_csv(path, trajectories: list[Trajectories], header: list[str] = ()):
    """CSV with columns model, particle, x, t, s_x, s_y, s_z."""
    with open(path, "w", newline="") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        w = csv.writer(fh)
        w.writerow(["model", "particle", "x", "t", "s_x", "s_y", "s_z"])
        for traj in trajectories:
            for row in traj.rows():
                w.writerow([traj.model.value, row[0], *(f"{v:.12g}" for v in row[1:])])
