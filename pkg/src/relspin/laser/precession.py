"""Extraction of the spin-precession frequency.

A run consists of a sin^2 ramp-up, M optical periods at full amplitude and
a sin^2 ramp-down, with ramps lasting an integer number of periods.  The
Hamiltonian is then periodic on the plateau, so the plateau evolution is the
M-th power of a one-period propagator, and the ramp-down propagator does not
depend on M.  One period map (computed by stepping all basis states) gives
the field-free final states for a whole train of plateau lengths; the spin
angle measured after each is fitted against the effective interaction time.

For circular polarization the field rotates rigidly about x, so in a frame
co-rotating with it the Hamiltonian is time independent; the precession rate
then follows from a single diagonalization.  That gives an independent check
of the time-domain result.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np
import scipy.linalg

from ..constants import ELECTRON_CHARGE, ELECTRON_MASS, SPEED_OF_LIGHT
from ..dirac import ALPHA, BETA, SIGMA, SPIN
from ..errors import FitDegenerate
from ..grid import GridSpec
from .fields import LaserConfig, _profiles, omega_prediction, ponderomotive_spin_frequency
from .propagate import (
    Backend,
    default_time_step,
    evolve,
    initial_state,
    make_stepper,
    spin_components,
    spin_kernels_1d,
)


@dataclass
class PrecessionResult:
    omega: float
    residual: float
    samples: int
    times: np.ndarray
    angles: np.ndarray
    backend: str | None = None
    config: dict | None = None
    sx_drift: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["times"] = list(map(float, self.times))
        d["angles"] = list(map(float, self.angles))
        return d


def extract_precession_frequency(times, sy, sz, *, min_rotation: float = 1e-4, backend=None,
                                 config=None) -> PrecessionResult:
    """Least-squares slope of the unwrapped angle atan2(<S_y>, <S_z>) against time."""
    times = np.asarray(times, dtype=float)
    if times.size < 2:
        raise FitDegenerate("need at least two checkpoints")
    angles = np.unwrap(np.arctan2(np.asarray(sy, dtype=float), np.asarray(sz, dtype=float)))
    if np.ptp(angles) < min_rotation:
        raise FitDegenerate(f"total rotation {np.ptp(angles):.2e} rad is below {min_rotation:.0e} rad")
    slope, intercept = np.polyfit(times, angles, 1)
    resid = angles - (slope * times + intercept)
    return PrecessionResult(float(slope), float(np.sqrt(np.mean(resid**2))), int(times.size),
                            times, angles, backend, config)


def ramp_weight(power: int) -> float:
    """Integral of sin^(2 power)(pi s / 2) over s in [0, 1]."""
    return math.gamma(power + 0.5) / (math.sqrt(math.pi) * math.gamma(power + 1))


def effective_time(flat_periods, cfg: LaserConfig, power: int) -> np.ndarray:
    """Plateau time plus both ramps weighted by w(t)^power."""
    return np.asarray(flat_periods) * cfg.period + 2 * cfg.ramp * ramp_weight(power)


def expected_rate(backend, cfg: LaserConfig) -> float:
    """Order-of-magnitude rate used only to size the plateau train."""
    backend = Backend.parse(backend)
    if backend is Backend.NONRELATIVISTIC_PAULI:
        return ponderomotive_spin_frequency(cfg)
    return omega_prediction(cfg)


class FloquetRun:
    """Stroboscopic pulse-train machinery for one backend and laser configuration."""

    def __init__(self, backend, cfg: LaserConfig, *, points: int = 16, dt: float | None = None,
                 order: int = 4, terms=None):
        self.backend = Backend.parse(backend)
        ramp_periods = cfg.ramp / cfg.period
        if abs(ramp_periods - round(ramp_periods)) > 1e-9 or round(ramp_periods) < 1:
            raise ValueError("ramps must last a whole number of periods")
        self.cfg = cfg
        self.ramp_steps_periods = int(round(ramp_periods))
        self.grid = GridSpec.line(points, cfg.wavelength)
        dt_max = default_time_step(self.backend, cfg) if dt is None else dt
        self.steps_per_period = math.ceil(cfg.period / dt_max - 1e-9)
        self.dt = cfg.period / self.steps_per_period
        self.order = order
        self.terms = terms
        self.kernels = spin_kernels_1d(self.grid, self.backend.ncomp)

    def _stepper(self, cfg):
        return make_stepper(self.backend, self.grid, cfg, self.terms)

    def _run(self, cfg, data, t0, periods):
        return evolve(self._stepper(cfg), data, t0, self.dt, periods * self.steps_per_period, self.order)

    def ramp_up(self, data):
        # any configuration with the same ramp has the same field on [0, ramp]
        return self._run(self._reference(), data, 0.0, self.ramp_steps_periods)

    def ramp_down(self, data):
        ref = self._reference()
        return self._run(ref, data, ref.duration - ref.ramp, self.ramp_steps_periods)

    def _reference(self) -> LaserConfig:
        """Same pulse with a single plateau period."""
        return replace(self.cfg, duration=2 * self.cfg.ramp + self.cfg.period)

    def period_map(self) -> np.ndarray:
        """Unitary one-period plateau propagator, projected onto the unitary group."""
        n = self.backend.ncomp * self.grid.points[0]
        basis = np.eye(n, dtype=complex).reshape(self.backend.ncomp, self.grid.points[0], n)
        u = self._run(self._reference(), basis, self.cfg.ramp, 1).reshape(n, n)
        w, _, vh = np.linalg.svd(u)
        return w @ vh

    def scan(self, flat_periods, initial=None) -> dict:
        """Field-free spin after pulses with the given plateau lengths."""
        flat_periods = np.asarray(flat_periods, dtype=np.int64)
        if initial is None:
            initial = initial_state(self.grid, self.backend).data
        start = self.ramp_up(initial).reshape(-1)
        u = self.period_map()
        schur, vecs = scipy.linalg.schur(u, output="complex")
        phases = np.diag(schur) / np.abs(np.diag(schur))
        coef = vecs.conj().T @ start
        plateau = vecs @ (coef[:, None] * phases[:, None] ** flat_periods[None, :])
        shape = (self.backend.ncomp, self.grid.points[0], len(flat_periods))
        final = self.ramp_down(plateau.reshape(shape))
        spins = spin_components(final, self.kernels, self.grid.cell_volume)
        norms = np.sqrt(np.sum(np.abs(final) ** 2, axis=(0, 1)) * self.grid.cell_volume)
        return {"flat_periods": flat_periods, "spin": spins, "norm": norms,
                "unitarity": float(np.max(np.abs(u.conj().T @ u - np.eye(len(u)))))}


def precession_frequency(backend, cfg: LaserConfig, *, points: int = 16, dt: float | None = None,
                         order: int = 4, checkpoints: int = 12, target_rotation: float = 0.2,
                         rate_hint: float | None = None, terms=None) -> PrecessionResult:
    """Fit the precession rate from a train of pulses with growing plateaus.

    The longest plateau is sized so the spin turns by about
    ``target_rotation`` radians at the rate ``rate_hint`` (default: the
    closed-form estimate for the backend).
    """
    backend = Backend.parse(backend)
    run = FloquetRun(backend, cfg, points=points, dt=dt, order=order, terms=terms)
    rate = rate_hint if rate_hint is not None else expected_rate(backend, cfg)
    longest = max(checkpoints, int(round(target_rotation / (abs(rate) * cfg.period))))
    flat = np.unique(np.linspace(0, longest, checkpoints).round().astype(np.int64))
    data = run.scan(flat)
    t_eff = effective_time(flat, cfg, backend.field_power)
    sx, sy, sz = data["spin"]
    res = extract_precession_frequency(t_eff, sy, sz, backend=backend.value, config=cfg.to_dict())
    res.sx_drift = float(np.max(np.abs(sx - sx[0])))
    res.diagnostics = {"unitarity": data["unitarity"], "norm_error": float(np.max(np.abs(data["norm"] - 1))),
                       "steps_per_period": run.steps_per_period, "dt": run.dt, "points": points,
                       "order": order, "max_plateau_periods": int(flat[-1])}
    return res


# -------------------------------------------------------------- rotating frame


def rotating_frame_omega(backend, cfg: LaserConfig, *, points: int = 16) -> float:
    """Precession rate from the time-independent co-rotating Hamiltonian (circular light only).

    The spin rate is read off from the quasi-energy splitting of the two
    states connected to the zero-momentum spin-up/down states along x, minus
    the same splitting without field.
    """
    if not math.isclose(cfg.ellipticity, math.pi / 2, abs_tol=1e-12) or cfg.waves != "standing":
        raise ValueError("the co-rotating frame needs a circularly polarized standing wave")
    backend = Backend.parse(backend)
    dressed = _rotating_splitting(backend, cfg, points, cfg.amplitude)
    bare = _rotating_splitting(backend, cfg, points, 0.0)
    return -(dressed - bare)


def _rotating_splitting(backend: Backend, cfg: LaserConfig, points: int, amplitude: float) -> float:
    q, m, c = ELECTRON_CHARGE, ELECTRON_MASS, SPEED_OF_LIGHT
    cfg = replace(cfg, amplitude=amplitude)
    grid = GridSpec.line(points, cfg.wavelength)
    n = points
    x = grid.axis(0) + grid.lengths[0] / 2
    p = grid.momentum_axis(0)
    # plateau fields at t = 0
    (ay, az), (ay_t, az_t), (ay_x, az_x) = _profiles(x, 0.0, cfg)
    a = np.stack([np.zeros(n), ay, az], axis=-1)
    e = np.stack([np.zeros(n), -ay_t, -az_t], axis=-1)
    b = np.stack([np.zeros(n), -az_x, ay_x], axis=-1)
    f = np.fft.fft(np.eye(n), axis=0) / math.sqrt(n)   # position -> momentum, unitary
    to_pos = f.conj().T
    omega = cfg.angular_frequency

    if backend is Backend.DIRAC:
        h = np.zeros((4, n, 4, n), dtype=complex)
        for i, pi in enumerate(p):
            h[:, i, :, i] = c * pi * ALPHA[0] + m * c * c * BETA - omega * SPIN[0] / 2
        h = h.reshape(4 * n, 4 * n)
        vy = to_pos.conj().T @ np.diag(-q * c * a[:, 1]) @ to_pos
        vz = to_pos.conj().T @ np.diag(-q * c * a[:, 2]) @ to_pos
        h += np.kron(ALPHA[1], vy) + np.kron(ALPHA[2], vz)
        ncomp, sx = 4, SPIN[0]
    else:
        v = q * q * np.sum(a**2, axis=-1) / (2 * m)
        bvec = -q / (2 * m) * b
        if backend is Backend.RELATIVISTIC_PAULI:
            bvec = bvec + q * q / (4 * m * m * c * c) * np.cross(e, a)
        elif backend is not Backend.NONRELATIVISTIC_PAULI:
            raise ValueError(f"no co-rotating frame model for {backend.value}")
        kin = np.diag(p**2 / (2 * m))
        h = np.kron(np.eye(2), kin + f @ np.diag(v) @ to_pos)
        for j in range(3):
            h = h + np.kron(SIGMA[j], f @ np.diag(bvec[:, j]) @ to_pos)
        h = h - omega * np.kron(SIGMA[0], np.eye(n)) / 2
        ncomp, sx = 2, SIGMA[0]

    energies, vecs = np.linalg.eigh(h)
    levels = []
    vals, spinors = np.linalg.eigh(sx)
    for target in (1.0, -1.0):
        chi = spinors[:, np.argmin(np.abs(vals - target))]
        if ncomp == 4:
            # positive-energy spin state along x sits in the upper components at p = 0
            chi = np.zeros(4, dtype=complex)
            chi[:2] = np.array([1.0, target]) / math.sqrt(2)
        probe = np.zeros((ncomp, n), dtype=complex)
        probe[:, 0] = chi
        overlap = np.abs(vecs.conj().T @ probe.reshape(-1)) ** 2
        levels.append(energies[np.argmax(overlap)])
    return levels[0] - levels[1]


# ------------------------------------------------------------------ sweeps


def loglog_slope(amplitudes, omegas) -> float:
    amplitudes, omegas = np.asarray(amplitudes, float), np.asarray(omegas, float)
    return float(np.polyfit(np.log(amplitudes), np.log(np.abs(omegas)), 1)[0])


def sweep_amplitudes(low: float, high: float, count: int) -> np.ndarray:
    """Log-uniform field amplitudes."""
    return np.geomspace(low, high, count)
