"""Dirac algebra in the Dirac representation and free-particle structure.

All momentum-dependent kernels are vectorized: a momentum array of shape
``(..., 3)`` produces matrices of shape ``(..., 4, 4)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .constants import ELECTRON_MASS, SPEED_OF_LIGHT

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)

SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
ALPHA = np.array([np.block([[_Z2, s], [s, _Z2]]) for s in SIGMA])
BETA = np.block([[I2, _Z2], [_Z2, -I2]])
SPIN = np.array([np.block([[s, _Z2], [_Z2, s]]) for s in SIGMA])  # capital Sigma

for _m in (SIGMA, ALPHA, BETA, SPIN):
    _m.setflags(write=False)

COMPONENTS = {"x": 0, "y": 1, "z": 2}


class DiracMatrices(NamedTuple):
    alpha1: np.ndarray
    alpha2: np.ndarray
    alpha3: np.ndarray
    beta: np.ndarray
    spin1: np.ndarray
    spin2: np.ndarray
    spin3: np.ndarray


def dirac_matrices() -> DiracMatrices:
    """Return copies of alpha_1..3, beta and Sigma_1..3."""
    return DiracMatrices(*(m.copy() for m in (*ALPHA, BETA, *SPIN)))


def component_index(component) -> int:
    if isinstance(component, str):
        try:
            return COMPONENTS[component]
        except KeyError:
            raise ValueError(f"unknown component {component!r}") from None
    idx = int(component)
    if idx not in (0, 1, 2):
        raise ValueError(f"component index must be 0, 1 or 2, got {component!r}")
    return idx


def commutator(a, b):
    return a @ b - b @ a


def anticommutator(a, b):
    return a @ b + b @ a


def dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def hermiticity_defect(m) -> float:
    return float(np.max(np.abs(m - dagger(m))))


def as_momentum(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape[-1:] != (3,):
        raise ValueError(f"momentum must have trailing dimension 3, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("momentum components must be finite")
    return p


def contract(vec, mats) -> np.ndarray:
    """sum_i vec[..., i] * mats[i] for a stack of three 4x4 (or 2x2) matrices."""
    return np.tensordot(vec, mats, axes=([-1], [0]))


def p0_value(p, mass: float = ELECTRON_MASS, c: float = SPEED_OF_LIGHT):
    """Relativistic energy over c: sqrt(m^2 c^2 + p^2)."""
    p = as_momentum(p)
    return np.sqrt((mass * c) ** 2 + np.sum(p * p, axis=-1))


def h0_kernel(p, c: float = SPEED_OF_LIGHT, mass: float = ELECTRON_MASS) -> np.ndarray:
    """Free Dirac Hamiltonian c alpha.p + m c^2 beta at momentum p."""
    p = as_momentum(p)
    return c * contract(p, ALPHA) + mass * c * c * BETA


def fw_transform(p, c: float = SPEED_OF_LIGHT, mass: float = ELECTRON_MASS) -> np.ndarray:
    """Unitary that maps FW-representation spinors to the standard representation.

    T(p) = (p0 + mc - beta alpha.p) / sqrt(2 p0 (p0 + mc)); T(0) is the identity.
    """
    p = as_momentum(p)
    mc = mass * c
    e = p0_value(p, mass, c)[..., None, None]
    num = (e + mc) * I4 - BETA @ contract(p, ALPHA)
    return num / np.sqrt(2.0 * e * (e + mc))


@dataclass(frozen=True)
class PlaneWaveLabel:
    """Quantum numbers of a free plane wave: energy sign, momentum, spin."""

    energy_sign: int
    p: tuple
    spin: str

    def __post_init__(self):
        if self.energy_sign not in (1, -1):
            raise ValueError("energy_sign must be +1 or -1")
        if self.spin not in ("up", "down"):
            raise ValueError("spin must be 'up' or 'down'")
        object.__setattr__(self, "p", tuple(float(v) for v in as_momentum(self.p)))

    @property
    def slot(self) -> int:
        return (0 if self.energy_sign > 0 else 2) + (0 if self.spin == "up" else 1)

    @classmethod
    def all_at(cls, p) -> list["PlaneWaveLabel"]:
        return [cls(s, tuple(p), sp) for s in (1, -1) for sp in ("up", "down")]


def _with_phase(amplitude, p, r):
    if r is None:
        return amplitude
    r = np.asarray(r, dtype=float)
    phase = np.exp(1j * (r @ np.asarray(p, dtype=float)))
    return phase[..., None] * amplitude


def fw_basis_state(label: PlaneWaveLabel, r=None) -> np.ndarray:
    """Unit FW-representation spinor for ``label``.

    Without ``r`` the constant amplitude is returned; with positions of shape
    (..., 3) the plane-wave factor exp(i p.r) is included.
    """
    amp = np.zeros(4, dtype=complex)
    amp[label.slot] = 1.0
    return _with_phase(amp, label.p, r)


def standard_rep_eigenstate(label: PlaneWaveLabel, r=None, c: float = SPEED_OF_LIGHT) -> np.ndarray:
    """Free Dirac eigenspinor in the standard representation, T_FW(p) applied to the FW basis state."""
    amp = fw_transform(np.asarray(label.p), c=c)[:, label.slot]
    return _with_phase(amp, label.p, r)
