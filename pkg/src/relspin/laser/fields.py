"""Elliptically polarized traveling and standing light waves along x.

The vector potential of one traveling wave is

    A_+ = (E/omega) (sin(kx - wt) e_y + sin(kx - wt + eta) e_z)

and the counterpropagating partner A_- has opposite helicity; their sum is
the standing wave -(2E/omega) cos(kx) (sin(wt) e_y + sin(wt - eta) e_z).
All fields carry the sin^2 turn-on/turn-off window w(t).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ..constants import (
    ELECTRON_CHARGE,
    ELECTRON_MASS,
    EPSILON0,
    FINE_STRUCTURE,
    SPEED_OF_LIGHT,
)

WAVE_MODES = ("standing", "forward", "backward")


@dataclass(frozen=True)
class LaserConfig:
    """Standing-wave experiment: amplitude (a.u.), wavelength (a.u.),
    ellipticity, total time T and ramp time (a.u.)."""

    amplitude: float
    wavelength: float
    duration: float
    ramp: float
    ellipticity: float = math.pi / 2
    waves: str = "standing"

    def __post_init__(self):
        if not self.amplitude >= 0:
            raise ValueError(f"field amplitude must be >= 0, got {self.amplitude}")
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be > 0, got {self.wavelength}")
        if not (0 < self.ramp <= self.duration / 2):
            raise ValueError(f"need 0 < ramp <= duration/2, got ramp={self.ramp}, duration={self.duration}")
        if not (-math.pi < self.ellipticity <= math.pi):
            raise ValueError("ellipticity must lie in (-pi, pi]")
        if self.waves not in WAVE_MODES:
            raise ValueError(f"waves must be one of {WAVE_MODES}")

    @classmethod
    def from_periods(cls, amplitude: float, wavelength: float, flat_periods: float,
                     ramp_periods: float, **kwargs) -> "LaserConfig":
        period = wavelength / SPEED_OF_LIGHT
        ramp = ramp_periods * period
        return cls(amplitude, wavelength, 2 * ramp + flat_periods * period, ramp, **kwargs)

    @property
    def wavenumber(self) -> float:
        return 2 * math.pi / self.wavelength

    @property
    def angular_frequency(self) -> float:
        return self.wavenumber * SPEED_OF_LIGHT

    @property
    def period(self) -> float:
        return 2 * math.pi / self.angular_frequency

    @property
    def intensity(self) -> float:
        """eps0 c E^2, in atomic units."""
        return EPSILON0 * SPEED_OF_LIGHT * self.amplitude**2

    def to_dict(self) -> dict:
        return asdict(self)


def window(t, cfg: LaserConfig):
    """sin^2 ramp up over [0, ramp], plateau, sin^2 ramp down over [T - ramp, T]; zero outside."""
    t = np.asarray(t, dtype=float)
    T, dT = cfg.duration, cfg.ramp
    up = np.sin(np.pi * t / (2 * dT)) ** 2
    down = np.sin(np.pi * (T - t) / (2 * dT)) ** 2
    w = np.where(t < dT, up, np.where(t > T - dT, down, 1.0))
    return np.where((t < 0) | (t > T), 0.0, w)


def window_value(t: float, cfg: LaserConfig) -> float:
    """Scalar fast path of :func:`window` for time steppers."""
    T, dT = cfg.duration, cfg.ramp
    if t < 0 or t > T:
        return 0.0
    if t < dT:
        return math.sin(math.pi * t / (2 * dT)) ** 2
    if t > T - dT:
        return math.sin(math.pi * (T - t) / (2 * dT)) ** 2
    return 1.0


def window_rate(t, cfg: LaserConfig):
    """dw/dt."""
    t = np.asarray(t, dtype=float)
    T, dT = cfg.duration, cfg.ramp
    k = np.pi / (2 * dT)
    up = k * np.sin(2 * k * t)
    down = -k * np.sin(2 * k * (T - t))
    r = np.where(t < dT, up, np.where(t > T - dT, down, 0.0))
    return np.where((t < 0) | (t > T), 0.0, r)


@dataclass(frozen=True)
class FieldSample:
    E: np.ndarray
    B: np.ndarray
    A: np.ndarray


def _profiles(x, t, cfg: LaserConfig):
    """Unwindowed A (y, z), its time derivative and its x derivative."""
    k, om, eta = cfg.wavenumber, cfg.angular_frequency, cfg.ellipticity
    amp = cfg.amplitude / om
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if cfg.waves == "standing":
        ckx, skx = np.cos(k * x), np.sin(k * x)
        sy, sz = np.sin(om * t), np.sin(om * t - eta)
        cy, cz = np.cos(om * t), np.cos(om * t - eta)
        a = (-2 * amp * ckx * sy, -2 * amp * ckx * sz)
        a_t = (-2 * amp * om * ckx * cy, -2 * amp * om * ckx * cz)
        a_x = (2 * amp * k * skx * sy, 2 * amp * k * skx * sz)
        return a, a_t, a_x
    sign = 1.0 if cfg.waves == "forward" else -1.0
    # forward: +amp sin(kx - wt [+ eta]); backward: -amp sin(kx + wt [- eta])
    ph_y = k * x - sign * om * t
    ph_z = ph_y + sign * eta
    a = (sign * amp * np.sin(ph_y), sign * amp * np.sin(ph_z))
    a_t = (-om * amp * np.cos(ph_y), -om * amp * np.cos(ph_z))
    a_x = (sign * amp * k * np.cos(ph_y), sign * amp * k * np.cos(ph_z))
    return a, a_t, a_x


def _stack(y, z):
    y, z = np.broadcast_arrays(y, z)
    return np.stack([np.zeros_like(y), y, z], axis=-1)


def vector_potential(x, t, cfg: LaserConfig) -> np.ndarray:
    """A(x, t) including the window, shape broadcast(x, t) + (3,)."""
    (ay, az), _, _ = _profiles(x, t, cfg)
    w = window(t, cfg)
    return _stack(w * ay, w * az)


def standing_wave_A(x, t, cfg: LaserConfig) -> np.ndarray:
    """Vector potential of the counterpropagating pair (forces ``waves='standing'``)."""
    if cfg.waves != "standing":
        cfg = LaserConfig(cfg.amplitude, cfg.wavelength, cfg.duration, cfg.ramp, cfg.ellipticity)
    return vector_potential(x, t, cfg)


def field_sample(x, t, cfg: LaserConfig) -> FieldSample:
    """E = -dA/dt (window derivative included) and B = curl A, in closed form."""
    (ay, az), (ay_t, az_t), (ay_x, az_x) = _profiles(x, t, cfg)
    w, wr = window(t, cfg), window_rate(t, cfg)
    A = _stack(w * ay, w * az)
    E = _stack(-(wr * ay + w * ay_t), -(wr * az + w * az_t))
    B = _stack(-w * az_x, w * ay_x)
    return FieldSample(E, B, A)


def divergence_E(x, t, cfg: LaserConfig, h: float = 1e-6) -> np.ndarray:
    """Central-difference d(E_x)/dx; the fields have no other x dependence in E_x."""
    ex_plus = field_sample(np.asarray(x) + h, t, cfg).E[..., 0]
    ex_minus = field_sample(np.asarray(x) - h, t, cfg).E[..., 0]
    return (ex_plus - ex_minus) / (2 * h)


def photonic_spin_density(cfg: LaserConfig) -> np.ndarray:
    """eps0 E x A of one traveling wave (cycle-independent), along e_x."""
    return np.array([EPSILON0 * cfg.amplitude**2 * cfg.wavelength * math.sin(cfg.ellipticity)
                     / (2 * math.pi * SPEED_OF_LIGHT), 0.0, 0.0])


def standing_spin_density(cfg: LaserConfig) -> float:
    """Spin density of the counterpropagating pair, twice the single-wave value."""
    return 2 * photonic_spin_density(cfg)[0]


def omega_prediction(cfg: LaserConfig) -> float:
    """Closed-form quartic precession rate rho I lambda^4 alpha^2 / (2 pi^2 m^2 c^3) for circular light."""
    if not math.isclose(cfg.ellipticity, math.pi / 2, abs_tol=1e-12):
        raise ValueError("the closed-form precession rate holds for circular polarization only")
    rho = standing_spin_density(cfg)
    return (rho * cfg.intensity * cfg.wavelength**4 * FINE_STRUCTURE**2
            / (2 * math.pi**2 * ELECTRON_MASS**2 * SPEED_OF_LIGHT**3))


def larmor_frequency(cfg: LaserConfig) -> float:
    """|q| E / (m c)."""
    return abs(ELECTRON_CHARGE) * cfg.amplitude / (ELECTRON_MASS * SPEED_OF_LIGHT)


def ponderomotive_spin_frequency(cfg: LaserConfig) -> float:
    """(q E)^2 lambda / (2 pi m^2 c^3), the quadratic nonrelativistic rate scale."""
    return (ELECTRON_CHARGE * cfg.amplitude) ** 2 * cfg.wavelength / (
        2 * math.pi * ELECTRON_MASS**2 * SPEED_OF_LIGHT**3)
