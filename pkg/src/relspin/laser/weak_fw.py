"""Weakly relativistic two-component Hamiltonian, term by term.

Each term of the leading-order FW expansion in external fields is available
separately, both as a 2x2 symbol at a phase-space point (x, p) and as a
dense operator on a 1D grid, so individual couplings can be toggled to see
which one drives the spin precession.
"""

from __future__ import annotations

import numpy as np
import scipy.fft
import scipy.linalg

from ..constants import ELECTRON_CHARGE, ELECTRON_MASS, SPEED_OF_LIGHT
from ..dirac import SIGMA
from ..grid import GridSpec
from .fields import LaserConfig, divergence_E, field_sample

TERMS = (
    "kinetic",
    "zeeman",
    "scalar_potential",
    "mass_correction",
    "field_energy",
    "spin_orbit_momentum",
    "spin_orbit_vector_potential",
    "darwin",
    "zeeman_correction",
)

#: the couplings that survive in the relativistic Pauli equation
RELATIVISTIC_PAULI_TERMS = frozenset({"kinetic", "zeeman", "spin_orbit_vector_potential"})

_I2 = np.eye(2, dtype=complex)


def _sigma_dot(vec):
    return np.tensordot(vec, SIGMA, axes=([-1], [0]))


def _check_terms(terms):
    terms = set(TERMS) if terms is None else set(terms)
    unknown = terms - set(TERMS)
    if unknown:
        raise ValueError(f"unknown terms {sorted(unknown)}")
    return terms


def weak_fw_hamiltonian_terms(x, t, cfg: LaserConfig, p=(0.0, 0.0, 0.0), terms=None) -> dict:
    """2x2 symbols of each term at position x, canonical momentum p and time t.

    Operator products are replaced by products of c-numbers, so the
    anticommutator becomes twice the product.  Returns {name: (..., 2, 2)}.
    """
    terms = _check_terms(terms)
    q, m, c = ELECTRON_CHARGE, ELECTRON_MASS, SPEED_OF_LIGHT
    fs = field_sample(x, t, cfg)
    p = np.broadcast_to(np.asarray(p, dtype=float), fs.A.shape)
    kin_mom = p - q * fs.A
    kin2 = np.sum(kin_mom**2, axis=-1)[..., None, None]
    scalar = lambda v: np.asarray(v)[..., None, None] * _I2  # noqa: E731

    out = {}
    if "kinetic" in terms:
        out["kinetic"] = kin2 / (2 * m) * _I2
    if "zeeman" in terms:
        out["zeeman"] = -q / (2 * m) * _sigma_dot(fs.B)
    if "scalar_potential" in terms:
        out["scalar_potential"] = scalar(np.zeros(fs.A.shape[:-1]))
    if "mass_correction" in terms:
        out["mass_correction"] = -(kin2**2) / (8 * m**3 * c * c) * _I2
    if "field_energy" in terms:
        e2 = np.sum(fs.E**2, axis=-1)
        b2 = np.sum(fs.B**2, axis=-1)
        out["field_energy"] = scalar(-q * q / (8 * m**3 * c**4) * (c * c * b2 - e2))
    if "spin_orbit_momentum" in terms:
        out["spin_orbit_momentum"] = -q / (4 * m * m * c * c) * _sigma_dot(np.cross(fs.E, p))
    if "spin_orbit_vector_potential" in terms:
        out["spin_orbit_vector_potential"] = -q / (4 * m * m * c * c) * _sigma_dot(np.cross(fs.E, -q * fs.A))
    if "darwin" in terms:
        out["darwin"] = scalar(-q / (8 * m * m * c * c) * divergence_E(x, t, cfg))
    if "zeeman_correction" in terms:
        out["zeeman_correction"] = q / (8 * m**3 * c * c) * 2 * _sigma_dot(fs.B) * kin2
    return out


def momentum_matrix(grid: GridSpec) -> np.ndarray:
    """Dense spectral -i d/dx on a periodic 1D grid."""
    n = grid.points[0]
    f = scipy.fft.fft(np.eye(n), axis=0)
    return (f.conj().T @ (grid.momentum_axis(0)[:, None] * f)) / n


def weak_fw_operator(grid: GridSpec, t: float, cfg: LaserConfig, terms=None) -> np.ndarray:
    """Dense (2N x 2N) Hermitian operator, basis index = spin * N + point.

    The canonical momentum is (P, 0, 0) with P the spectral x momentum;
    position-momentum products in the spin-orbit term are symmetrized.
    """
    terms = _check_terms(terms)
    q, m, c = ELECTRON_CHARGE, ELECTRON_MASS, SPEED_OF_LIGHT
    n = grid.points[0]
    x = grid.axis(0) + grid.lengths[0] / 2
    fs = field_sample(x, t, cfg)
    eye = np.eye(n)
    pmat = momentum_matrix(grid)
    # (p - qA)^2 with p along x and A transverse has no cross terms
    kin2 = pmat @ pmat + np.diag(q * q * np.sum(fs.A**2, axis=-1))
    diag = np.diag
    spin = lambda j, mat: np.kron(SIGMA[j], mat)  # noqa: E731
    scalar = lambda mat: np.kron(_I2, mat)  # noqa: E731
    sym = lambda d, mat: 0.5 * (diag(d) @ mat + mat @ diag(d))  # noqa: E731

    h = np.zeros((2 * n, 2 * n), dtype=complex)
    if "kinetic" in terms:
        h += scalar(kin2 / (2 * m))
    if "zeeman" in terms:
        h += sum(spin(j, diag(-q / (2 * m) * fs.B[:, j])) for j in range(3))
    if "mass_correction" in terms:
        h += scalar(-(kin2 @ kin2) / (8 * m**3 * c * c))
    if "field_energy" in terms:
        e2, b2 = np.sum(fs.E**2, axis=-1), np.sum(fs.B**2, axis=-1)
        h += scalar(diag(-q * q / (8 * m**3 * c**4) * (c * c * b2 - e2)))
    if "spin_orbit_momentum" in terms:
        # E x (P, 0, 0) = (0, E_z P, -E_y P)
        pref = -q / (4 * m * m * c * c)
        h += pref * (spin(1, sym(fs.E[:, 2], pmat)) - spin(2, sym(fs.E[:, 1], pmat)))
    if "spin_orbit_vector_potential" in terms:
        exa = np.cross(fs.E, -q * fs.A)
        h += sum(spin(j, diag(-q / (4 * m * m * c * c) * exa[:, j])) for j in range(3))
    if "darwin" in terms:
        h += scalar(diag(-q / (8 * m * m * c * c) * divergence_E(x, t, cfg)))
    if "zeeman_correction" in terms:
        pref = q / (8 * m**3 * c * c)
        h += sum(spin(j, pref * (diag(fs.B[:, j]) @ kin2 + kin2 @ diag(fs.B[:, j]))) for j in range(3))
    # "scalar_potential" is identically zero for these fields
    return h


class WeakFWStepper:
    """Exponential-midpoint stepping with the dense operator (small grids only)."""

    ncomp = 2

    def __init__(self, grid: GridSpec, cfg: LaserConfig, terms=None):
        if grid.points[0] > 256:
            raise ValueError("the dense weak-FW propagator is limited to 256 grid points")
        self.grid, self.cfg = grid, cfg
        self.terms = _check_terms(terms)

    def kinetic(self, data, tau):
        return data

    def interaction(self, data, t, h):
        u = scipy.linalg.expm(-1j * h * weak_fw_operator(self.grid, t, self.cfg, self.terms))
        shape = data.shape
        return (u @ data.reshape(2 * self.grid.points[0], -1)).reshape(shape)
