"""Dirac-Coulomb bound states of hydrogen-like ions (point nucleus).

The ground-state spinors are evaluated in closed form.  Radial integrals use
Gauss-Legendre quadrature in log r, which handles the integrable r^(gamma-1)
singularity at the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import gammainc

from .constants import ELECTRON_MASS, FINE_STRUCTURE, SPEED_OF_LIGHT
from .dirac import ALPHA, BETA, SPIN
from .errors import SupercriticalZ


def _check_z(Z: float) -> float:
    Z = float(Z)
    if Z <= 0:
        raise ValueError(f"Z must be positive, got {Z}")
    if Z * FINE_STRUCTURE >= 1.0:
        raise SupercriticalZ(f"Z*alpha = {Z * FINE_STRUCTURE:.6f} >= 1 for Z = {Z:g}")
    return Z


def gamma_factor(Z: float) -> float:
    """sqrt(1 - (Z alpha)^2)."""
    Z = _check_z(Z)
    return math.sqrt(1.0 - (Z * FINE_STRUCTURE) ** 2)


def lower_weight(Z: float) -> float:
    """Norm ratio of lower to upper spinor components, ((1 - gamma)/(Z alpha))^2."""
    g = gamma_factor(Z)
    return ((1.0 - g) / (Z * FINE_STRUCTURE)) ** 2


@dataclass(frozen=True)
class EnergyLevel:
    n: int
    j: float
    Z: float
    energy: float

    @property
    def binding(self) -> float:
        return ELECTRON_MASS * SPEED_OF_LIGHT**2 - self.energy


def eigen_energy(n: int, j: float, Z: float) -> EnergyLevel:
    """Sommerfeld fine-structure energy including the rest mass."""
    Z = _check_z(Z)
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (0.5 <= j <= n - 0.5) or (2 * j) % 2 != 1:
        raise ValueError(f"j must be half-integer in [1/2, n - 1/2], got {j}")
    za = Z * FINE_STRUCTURE
    k = j + 0.5
    denom = n - k + math.sqrt(k * k - za * za)
    energy = ELECTRON_MASS * SPEED_OF_LIGHT**2 / math.sqrt(1.0 + (za / denom) ** 2)
    return EnergyLevel(n, j, Z, energy)


def ground_state_normalization(Z: float) -> float:
    g = gamma_factor(Z)
    return (2 * ELECTRON_MASS * Z) ** 1.5 * math.sqrt((1 + g) / (2 * gamma_fn(1 + 2 * g)))


@dataclass(frozen=True)
class HydrogenicState:
    """A ground state (n = 1, j = 1/2) of the Dirac-Coulomb problem."""

    Z: float
    m: float = 0.5
    n: int = 1
    kappa: int = 1
    j: float = 0.5

    def __post_init__(self):
        _check_z(self.Z)
        if self.n != 1 or self.j != 0.5:
            raise ValueError("only the n = 1, j = 1/2 ground states are evaluable")
        if self.m not in (0.5, -0.5):
            raise ValueError("m must be +1/2 or -1/2")

    @property
    def gamma(self) -> float:
        return gamma_factor(self.Z)

    @property
    def energy(self) -> float:
        return eigen_energy(1, 0.5, self.Z).energy

    def radial(self, r):
        """N * exp(-Z r) / (2 Z r)^(1 - gamma)."""
        r = np.asarray(r, dtype=float)
        g, Z = self.gamma, self.Z
        return ground_state_normalization(Z) * np.exp(-ELECTRON_MASS * Z * r) / (2 * ELECTRON_MASS * Z * r) ** (1 - g)

    def evaluate_cartesian(self, x, y, z) -> np.ndarray:
        """Spinor at Cartesian points; returns shape (4,) + broadcast shape."""
        x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z)))
        rho2 = x * x + y * y
        r = np.sqrt(rho2 + z * z)
        # r*Y_lm without dividing by r avoids 0/0 on the z axis
        y00 = 1.0 / math.sqrt(4 * math.pi)
        c10 = math.sqrt(3 / (4 * math.pi))
        c11 = math.sqrt(3 / (8 * math.pi))
        y10 = c10 * z / r
        y11 = -c11 * (x + 1j * y) / r
        y1m1 = c11 * (x - 1j * y) / r
        f = (1 - self.gamma) / (self.Z * FINE_STRUCTURE)
        rad = self.radial(r)
        out = np.zeros((4,) + r.shape, dtype=complex)
        if self.m > 0:
            out[0] = y00
            out[2] = 1j * f * math.sqrt(1 / 3) * y10
            out[3] = -1j * f * math.sqrt(2 / 3) * y11
        else:
            out[1] = y00
            out[2] = 1j * f * math.sqrt(2 / 3) * y1m1
            out[3] = -1j * f * math.sqrt(1 / 3) * y10
        return out * rad

    def evaluate(self, r, theta, phi) -> np.ndarray:
        r, theta, phi = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (r, theta, phi)))
        st = np.sin(theta)
        return self.evaluate_cartesian(r * st * np.cos(phi), r * st * np.sin(phi), r * np.cos(theta))

    def __call__(self, points) -> np.ndarray:
        """Spinor at points of shape (..., 3), returned as (..., 4)."""
        pts = np.asarray(points, dtype=float)
        return np.moveaxis(self.evaluate_cartesian(pts[..., 0], pts[..., 1], pts[..., 2]), 0, -1)


def ground_state(Z: float, m: float = 0.5) -> HydrogenicState:
    return HydrogenicState(Z, m)


def analytic_pauli_spin_z(Z: float) -> float:
    """<Sigma_3/2> on the m = +1/2 ground state."""
    w = lower_weight(Z)
    return (0.5 - w / 6) / (1 + w)


def analytic_position_variance_pauli(Z: float) -> float:
    """Var(z) of the ground-state density, <r^2>/3."""
    g = gamma_factor(Z)
    return (2 * g + 1) * (2 * g + 2) / (12 * Z * Z)


def captured_norm_fraction(Z: float, radius: float) -> float:
    """Probability of finding the ground-state electron within ``radius``."""
    g = gamma_factor(Z)
    return float(gammainc(2 * g + 1, 2 * ELECTRON_MASS * Z * radius))


# ---------------------------------------------------------------- quadrature


def radial_nodes(Z: float, order: int = 200, r_min: float = 1e-12, r_max: float = 80.0):
    """Gauss-Legendre nodes/weights for integrals of f(r) dr, mapped through log r.

    The bounds are in units of 1/Z.
    """
    u, w = np.polynomial.legendre.leggauss(order)
    lo, hi = math.log(r_min / Z), math.log(r_max / Z)
    s = lo + (u + 1) * (hi - lo) / 2
    r = np.exp(s)
    return r, w * (hi - lo) / 2 * r


def radial_moment(Z: float, power: int, order: int = 200) -> float:
    """<r^power> from quadrature of the radial density (both spinor halves)."""
    state = ground_state(Z)
    r, w = radial_nodes(Z, order)
    dens = state.radial(r) ** 2 * (1 + lower_weight(Z)) / (4 * math.pi) * 4 * math.pi * r * r
    return float(np.sum(w * dens * r**power))


def sphere_quadrature(Z: float, n_radial: int = 120, n_theta: int = 12, n_phi: int = 12):
    """Product rule (points (n, 3), weights) exact for the low-order angular content here."""
    r, wr = radial_nodes(Z, n_radial, r_min=1e-9, r_max=60.0)
    ct, wt = np.polynomial.legendre.leggauss(n_theta)
    phi = (np.arange(n_phi) + 0.5) * 2 * math.pi / n_phi
    wphi = np.full(n_phi, 2 * math.pi / n_phi)
    R, CT, PHI = np.meshgrid(r, ct, phi, indexing="ij")
    ST = np.sqrt(1 - CT**2)
    pts = np.stack([R * ST * np.cos(PHI), R * ST * np.sin(PHI), R * CT], axis=-1).reshape(-1, 3)
    weights = (wr[:, None, None] * R[:, :1, :1] ** 2 * wt[None, :, None] * wphi[None, None, :]).reshape(-1)
    return pts, weights


def _gradient(state: HydrogenicState, points: np.ndarray, rel_step: float = 1e-5):
    """Central differences of the spinor; returns (3, n, 4)."""
    r = np.linalg.norm(points, axis=-1)
    h = rel_step * r
    grads = []
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1.0
        d = h[:, None] * e
        grads.append((state(points + d) - state(points - d)) / (2 * h[:, None]))
    return np.array(grads)


def apply_coulomb_hamiltonian(state: HydrogenicState, points) -> np.ndarray:
    """(c alpha.p + m c^2 beta - Z/r) psi at the given points, by finite differences."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    c = SPEED_OF_LIGHT
    psi = state(pts)
    grad = _gradient(state, pts)
    kinetic = -1j * c * np.einsum("iab,inb->na", ALPHA, grad)
    r = np.linalg.norm(pts, axis=-1)
    return kinetic + ELECTRON_MASS * c * c * psi @ BETA.T - (state.Z / r)[:, None] * psi


def _orbital(points, grad):
    """L = r x (-i grad) acting on the spinor; returns (3, n, 4)."""
    x, y, z = (points[:, i, None] for i in range(3))
    gx, gy, gz = grad
    return -1j * np.array([y * gz - z * gy, z * gx - x * gz, x * gy - y * gx])


def apply_spin_orbit(state: HydrogenicState, points) -> np.ndarray:
    """beta (Sigma.L + 1) psi at the given points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    psi = state(pts)
    lpsi = _orbital(pts, _gradient(state, pts))
    sl = np.einsum("iab,inb->na", SPIN, lpsi)
    return (sl + psi) @ BETA.T


def apply_j3(state: HydrogenicState, points) -> np.ndarray:
    """(L_3 + Sigma_3/2) psi at the given points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    psi = state(pts)
    lpsi = _orbital(pts, _gradient(state, pts))
    return lpsi[2] + psi @ (SPIN[2] / 2).T


def eigenvalue_estimate(psi: np.ndarray, applied: np.ndarray) -> tuple[float, float]:
    """Rayleigh quotient of ``applied`` against ``psi`` and the relative residual."""
    num = np.vdot(psi, applied)
    den = np.vdot(psi, psi).real
    value = num / den
    resid = np.linalg.norm(applied - value * psi) / np.linalg.norm(psi)
    return float(value.real), float(resid / max(abs(value), 1.0))


def energy_expectation(state: HydrogenicState, **quad) -> float:
    """<H_C> by quadrature of psi^dagger (H_C psi) over space."""
    pts, w = sphere_quadrature(state.Z, **quad)
    psi = state(pts)
    hpsi = apply_coulomb_hamiltonian(state, pts)
    num = np.sum(w * np.einsum("na,na->n", psi.conj(), hpsi))
    den = np.sum(w * np.einsum("na,na->n", psi.conj(), psi))
    return float((num / den).real)


def norm_by_quadrature(state: HydrogenicState, **quad) -> float:
    pts, w = sphere_quadrature(state.Z, **quad)
    psi = state(pts)
    return float(np.sum(w * np.sum(np.abs(psi) ** 2, axis=-1)))
