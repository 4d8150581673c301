"""Candidate relativistic spin operators as momentum-space kernels.

Every operator here commutes with the momentum operator, so on a plane wave
of momentum p it acts as a 4x4 matrix.  The property checker tests the
algebraic criteria a spin operator should satisfy (hermiticity, vector
character under rotations, conservation for a free particle, su(2) algebra,
eigenvalues +-1/2) on randomly sampled momenta.
"""

from __future__ import annotations

import enum
import json
from dataclasses import asdict, dataclass, field
from functools import partial

import numpy as np
from scipy.spatial.transform import Rotation

from .constants import ELECTRON_MASS, SPEED_OF_LIGHT
from .dirac import (
    ALPHA,
    BETA,
    I4,
    SIGMA,
    SPIN,
    as_momentum,
    component_index,
    contract,
    dagger,
    fw_transform,
    h0_kernel,
    p0_value,
)
from .errors import DegenerateMomentum
from .grid import SpinorField, apply_momentum_kernel, expectation


class SpinOperatorKind(str, enum.Enum):
    PAULI = "Pauli"
    FOLDY_WOUTHUYSEN = "FoldyWouthuysen"
    CZACHOR = "Czachor"
    FRENKEL = "Frenkel"
    CHAKRABARTI = "Chakrabarti"
    PRYCE = "Pryce"
    FRADKIN_GOOD = "FradkinGood"

    @classmethod
    def parse(cls, value) -> "SpinOperatorKind":
        if isinstance(value, cls):
            return value
        lookup = {k.value.lower(): k for k in cls}
        lookup.update({"fw": cls.FOLDY_WOUTHUYSEN, "fg": cls.FRADKIN_GOOD})
        try:
            return lookup[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown spin operator kind {value!r}") from None


#: kinds whose definition contains the direction p/|p|
DIRECTIONAL_KINDS = frozenset({SpinOperatorKind.PRYCE, SpinOperatorKind.FRADKIN_GOOD})

#: the five property columns, in report order
PROPERTIES = ("hermitian", "vector", "commutes_h0", "su2", "eigenvalues_half")

#: reference verdicts for each kind, in PROPERTIES order
EXPECTED_PROPERTIES = {
    SpinOperatorKind.PAULI: (True, True, False, True, True),
    SpinOperatorKind.FOLDY_WOUTHUYSEN: (True, True, True, True, True),
    SpinOperatorKind.CZACHOR: (True, True, True, False, False),
    SpinOperatorKind.FRENKEL: (True, True, True, False, False),
    SpinOperatorKind.CHAKRABARTI: (False, True, False, True, True),
    SpinOperatorKind.PRYCE: (True, True, True, True, True),
    SpinOperatorKind.FRADKIN_GOOD: (True, True, True, False, True),
}

_CYCLIC = ((1, 2), (2, 0), (0, 1))


def _cross_vec_mats(p, mats, j: int):
    """(p x M)_j for a stack of three matrices M."""
    k, l = _CYCLIC[j]
    return p[..., k, None, None] * mats[l] - p[..., l, None, None] * mats[k]


def _cross_mats_vec(mats, p, j: int):
    """(M x p)_j."""
    return -_cross_vec_mats(p, mats, j)


def _unit_direction(p, zero_mode: str):
    """p/|p|, with p = 0 replaced by +z under the 'limit' policy."""
    norm = np.linalg.norm(p, axis=-1)
    zero = norm == 0.0
    if np.any(zero):
        if zero_mode != "limit":
            raise DegenerateMomentum("direction-dependent kernel evaluated at p = 0")
        p = np.where(zero[..., None], np.array([0.0, 0.0, 1.0]), p)
        norm = np.where(zero, 1.0, norm)
    return p / norm[..., None]


def spin_kernel(kind, component, p, *, zero_mode: str = "error", c: float = SPEED_OF_LIGHT,
                mass: float = ELECTRON_MASS) -> np.ndarray:
    """One Cartesian component of a spin operator at momentum p, shape (..., 4, 4).

    ``zero_mode`` controls p = 0 for kinds containing p/|p|: "error" raises
    DegenerateMomentum, "limit" substitutes the direction +z.
    """
    kind = SpinOperatorKind.parse(kind)
    j = component_index(component)
    p = as_momentum(p)
    batch = p.shape[:-1]
    mc = mass * c

    if kind is SpinOperatorKind.PAULI:
        return np.broadcast_to(SPIN[j] / 2, batch + (4, 4)).copy()

    if kind in DIRECTIONAL_KINDS:
        n = _unit_direction(p, zero_mode)
        # (n.Sigma) n_j, shared by both directional kinds
        along = contract(n, SPIN) * n[..., j, None, None]
        if kind is SpinOperatorKind.PRYCE:
            return BETA @ SPIN[j] / 2 + 0.5 * along @ (I4 - BETA)
        sign_h0 = h0_kernel(p, c, mass) / (c * p0_value(p, mass, c))[..., None, None]
        return BETA @ SPIN[j] / 2 + 0.5 * along @ (sign_h0 - BETA)

    e = p0_value(p, mass, c)[..., None, None]
    p_j = p[..., j, None, None]
    p_dot_spin = contract(p, SPIN)
    beta_p_cross_alpha = BETA @ _cross_vec_mats(p, ALPHA, j)
    # Sigma p^2 - p (p.Sigma): the part of Sigma transverse to p, scaled by p^2
    transverse = SPIN[j] * np.sum(p * p, axis=-1)[..., None, None] - p_j * p_dot_spin

    if kind is SpinOperatorKind.FOLDY_WOUTHUYSEN:
        return SPIN[j] / 2 + 1j * beta_p_cross_alpha / (2 * e) - transverse / (2 * e * (e + mc))
    if kind is SpinOperatorKind.CZACHOR:
        e2 = 2 * e * e
        return (mc * mc * SPIN[j] + 1j * mc * beta_p_cross_alpha + p_dot_spin * p_j) / e2
    if kind is SpinOperatorKind.FRENKEL:
        return SPIN[j] / 2 + 1j * beta_p_cross_alpha / (2 * mc)
    # Chakrabarti
    return (SPIN[j] / 2 + 1j * _cross_mats_vec(ALPHA, p, j) / (2 * mc)
            + transverse / (2 * mc * (mc + e)))


def spin_vector(kind, p, **kwargs) -> np.ndarray:
    """All three components of a spin operator, shape (..., 3, 4, 4)."""
    return np.stack([spin_kernel(kind, j, p, **kwargs) for j in range(3)], axis=-3)


def pryce_transform(p, *, zero_mode: str = "error") -> np.ndarray:
    """Block-diag(1, i sigma.p/|p|): the unitary linking the Pauli and Pryce pictures."""
    p = as_momentum(p)
    n = _unit_direction(p, zero_mode)
    out = np.zeros(p.shape[:-1] + (4, 4), dtype=complex)
    out[..., 0, 0] = out[..., 1, 1] = 1.0
    out[..., 2:, 2:] = 1j * contract(n, SIGMA)
    return out


def fw_representation(kind, component, p, *, zero_mode: str = "error", c: float = SPEED_OF_LIGHT) -> np.ndarray:
    """T_FW(p)^-1 S(p) T_FW(p)."""
    t = fw_transform(p, c=c)
    return dagger(t) @ spin_kernel(kind, component, p, zero_mode=zero_mode, c=c) @ t


def newton_wigner_form(component, p, *, c: float = SPEED_OF_LIGHT, mass: float = ELECTRON_MASS) -> np.ndarray:
    """Alternative closed form of the FW spin operator built from H0 and Sigma."""
    j = component_index(component)
    p = as_momentum(p)
    mc = mass * c
    e = p0_value(p, mass, c)[..., None, None]
    h0 = h0_kernel(p, c, mass)
    p_dot_spin = contract(p, SPIN)
    p_cross_alpha = _cross_vec_mats(p, ALPHA, j)
    return (e / (2 * mc) * SPIN[j]
            - p_dot_spin * p[..., j, None, None] / (2 * mc * (mc + e))
            - 1j * (p_cross_alpha @ h0) / (2 * mc * c * e))


def fw_mean_position_correction(component, p, *, c: float = SPEED_OF_LIGHT, mass: float = ELECTRON_MASS) -> np.ndarray:
    """Momentum-space kernel C with T_FW r T_FW^-1 = r + C (component-wise)."""
    j = component_index(component)
    p = as_momentum(p)
    mc = mass * c
    e = p0_value(p, mass, c)[..., None, None]
    spin_cross_p = _cross_mats_vec(SPIN, p, j)
    alpha_dot_p = contract(p, ALPHA)
    bracket = (1j * spin_cross_p / (2 * e * (e + mc))
               - (BETA @ alpha_dot_p) * p[..., j, None, None] / (2 * e * e * (e + mc))
               + BETA @ ALPHA[j] / (2 * e))
    return 1j * bracket


def pryce_position_correction(component, p, *, zero_mode: str = "error") -> np.ndarray:
    """Kernel C with T_Pr r T_Pr^-1 = r + C; -(sigma x p)/p^2 in the lower block."""
    j = component_index(component)
    p = as_momentum(p)
    n = _unit_direction(p, zero_mode)
    norm = np.linalg.norm(p, axis=-1)
    inv = np.where(norm > 0, 1.0 / np.where(norm > 0, norm, 1.0), 0.0)
    out = np.zeros(p.shape[:-1] + (4, 4), dtype=complex)
    out[..., 2:, 2:] = -_cross_mats_vec(SIGMA, n, j) * inv[..., None, None]
    return out


#: kinds whose positive-energy blocks coincide with the FW spin
POSITIVE_ENERGY_EQUIVALENT = (
    SpinOperatorKind.FOLDY_WOUTHUYSEN,
    SpinOperatorKind.CHAKRABARTI,
    SpinOperatorKind.PRYCE,
    SpinOperatorKind.FRADKIN_GOOD,
)


def positive_energy_equivalence(kinds=None, p=None, component="z", *, c: float = SPEED_OF_LIGHT) -> float:
    """Largest difference between the 2x2 positive-energy blocks of the given kinds.

    ``kinds`` defaults to POSITIVE_ENERGY_EQUIVALENT.
    """
    kinds = POSITIVE_ENERGY_EQUIVALENT if kinds is None else kinds
    if p is None:
        raise ValueError("momentum p is required")
    p = as_momentum(p)
    if np.any(np.all(p == 0, axis=-1)):
        raise DegenerateMomentum("positive-energy equivalence needs p != 0")
    u = fw_transform(p, c=c)[..., :2]
    blocks = [dagger(u) @ spin_kernel(k, component, p, c=c) @ u for k in kinds]
    worst = 0.0
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            worst = max(worst, float(np.max(np.abs(blocks[i] - blocks[j]))))
    return worst


# ---------------------------------------------------------------- properties


def sample_momenta(samples: int, seed: int, *, mc: float = SPEED_OF_LIGHT,
                   decades: tuple = (-3.0, 3.0)) -> np.ndarray:
    """Deterministic momenta, log-uniform in |p|/mc and isotropic in direction.

    Sample i depends only on (seed, i) so any subset can be regenerated.
    """
    out = np.empty((samples, 3))
    for i in range(samples):
        rng = np.random.default_rng([seed, i])
        magnitude = mc * 10.0 ** rng.uniform(*decades)
        direction = rng.normal(size=3)
        out[i] = magnitude * direction / np.linalg.norm(direction)
    return out


def _sample_rotation(seed: int, index: int) -> Rotation:
    rng = np.random.default_rng([seed, index, 1])
    return Rotation.from_rotvec(rng.normal(size=3))


def _spin_unitary(rotation: Rotation) -> np.ndarray:
    """exp(-i theta n.Sigma/2) for the rotation theta*n."""
    vec = rotation.as_rotvec()
    theta = np.linalg.norm(vec)
    if theta == 0:
        return I4.copy()
    n = vec / theta
    return np.cos(theta / 2) * I4 - 1j * np.sin(theta / 2) * contract(n, SPIN)


def _rel(num: np.ndarray, scale) -> np.ndarray:
    return np.max(np.abs(num), axis=(-2, -1)) / np.maximum(scale, 1.0)


def _opnorm(m) -> np.ndarray:
    return np.linalg.norm(m, ord=2, axis=(-2, -1))


def property_violations(kind, momenta: np.ndarray, seed: int = 0, *, c: float = SPEED_OF_LIGHT) -> dict:
    """Per-sample violation magnitudes for the five properties.

    Violations are scale-relative: a commutator residual is divided by the
    product of the operator norms involved (floored at 1) so that large
    momenta do not inflate rounding noise.  Returns a dict of arrays.
    """
    kind = SpinOperatorKind.parse(kind)
    momenta = as_momentum(momenta)
    s = spin_vector(kind, momenta, c=c)                      # (n, 3, 4, 4)
    s_norm = _opnorm(s)                                      # (n, 3)

    hermitian = np.max(_rel(s - dagger(s), s_norm), axis=-1)

    h0 = h0_kernel(momenta, c)[:, None]
    h0_norm = _opnorm(h0)
    comm_h0 = np.max(_rel(h0 @ s - s @ h0, h0_norm * s_norm), axis=-1)

    su2 = np.zeros(len(momenta))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        resid = s[:, i] @ s[:, j] - s[:, j] @ s[:, i] - 1j * s[:, k]
        su2 = np.maximum(su2, _rel(resid, s_norm[:, i] * s_norm[:, j]))

    eig = np.zeros(len(momenta))
    for j in range(3):
        vals = np.linalg.eigvals(s[:, j])
        eig = np.maximum(eig, np.max(np.abs(np.abs(vals) - 0.5) + np.abs(vals.imag), axis=-1))

    vector = np.zeros(len(momenta))
    for n, p in enumerate(momenta):
        rot = _sample_rotation(seed, n)
        r = rot.as_matrix()
        d = _spin_unitary(rot)
        rotated = spin_vector(kind, r @ p, c=c)
        lhs = dagger(d) @ rotated @ d
        rhs = np.einsum("jk,kab->jab", r, s[n])
        vector[n] = np.max(_rel(lhs - rhs, s_norm[n]))

    return {"hermitian": hermitian, "vector": vector, "commutes_h0": comm_h0,
            "su2": su2, "eigenvalues_half": eig}


@dataclass
class PropertyReport:
    kind: str
    verdicts: dict
    max_violation: dict
    samples: int
    tolerance: float
    eigen_tolerance: float

    def matches_reference(self) -> bool:
        return self.mismatches() == []

    def mismatches(self) -> list:
        expected = EXPECTED_PROPERTIES[SpinOperatorKind.parse(self.kind)]
        return [name for name, want in zip(PROPERTIES, expected) if self.verdicts[name] != want]

    def to_dict(self) -> dict:
        return asdict(self)


def check_properties(kind, samples: int = 100, seed: int = 2024, *, tolerance: float = 1e-10,
                     eigen_tolerance: float = 1e-8) -> PropertyReport:
    """Test the five spin-operator properties on ``samples`` random momenta."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    kind = SpinOperatorKind.parse(kind)
    momenta = sample_momenta(samples, seed)
    viol = property_violations(kind, momenta, seed)
    worst = {name: float(np.max(viol[name])) for name in PROPERTIES}
    verdicts = {}
    for name in PROPERTIES:
        tol = eigen_tolerance if name == "eigenvalues_half" else tolerance
        verdicts[name] = bool(worst[name] < tol)
    return PropertyReport(kind.value, verdicts, worst, samples, tolerance, eigen_tolerance)


@dataclass
class PropertyTable:
    reports: list = field(default_factory=list)
    seed: int = 0

    def all_match(self) -> bool:
        return all(r.matches_reference() for r in self.reports)

    def to_json(self) -> str:
        doc = {
            "schema": 1,
            "seed": self.seed,
            "columns": list(PROPERTIES),
            "rows": [r.to_dict() for r in self.reports],
            "all_match": self.all_match(),
        }
        return json.dumps(doc, indent=2, sort_keys=True)


def property_table(samples: int = 100, seed: int = 2024) -> PropertyTable:
    return PropertyTable([check_properties(k, samples, seed) for k in SpinOperatorKind], seed)


# ---------------------------------------------------------------- grid fields

#: kinds that come with an induced position operator
POSITION_KINDS = (SpinOperatorKind.PAULI, SpinOperatorKind.FOLDY_WOUTHUYSEN, SpinOperatorKind.PRYCE)


def _frame_transform(kind: SpinOperatorKind):
    """Kernel of T_X for the position operator attached to ``kind``."""
    if kind is SpinOperatorKind.FOLDY_WOUTHUYSEN:
        return fw_transform
    if kind is SpinOperatorKind.PRYCE:
        return partial(pryce_transform, zero_mode="limit")
    raise ValueError(f"no position operator attached to {kind.value}")


def position_frame(field: SpinorField, kind) -> SpinorField:
    """T_X^-1 field; the ordinary coordinate acts on this as the X position operator."""
    kind = SpinOperatorKind.parse(kind)
    if kind is SpinOperatorKind.PAULI:
        return field
    transform = _frame_transform(kind)
    return apply_momentum_kernel(field, lambda p: dagger(transform(p)))


def position_kernel(kind, component, field: SpinorField) -> SpinorField:
    """Apply T_X r_c T_X^-1 to ``field`` (plain coordinate multiplication for Pauli)."""
    kind = SpinOperatorKind.parse(kind)
    coord = field.grid.coordinate(component_index(component))
    if kind is SpinOperatorKind.PAULI:
        return SpinorField(field.grid, coord * field.data)
    frame = position_frame(field, kind)
    moved = SpinorField(field.grid, coord * frame.data)
    return apply_momentum_kernel(moved, _frame_transform(kind))


def spin_expectation(field: SpinorField, kind, component="z") -> complex:
    """<field|S_c|field> on a grid, computed mode by mode in momentum space.

    The p = 0 mode of direction-dependent kinds uses the +z limit.  For the
    non-Hermitian Chakrabarti operator the result is complex in general.
    """
    kind = SpinOperatorKind.parse(kind)
    return expectation(field, partial(spin_kernel, kind, component, zero_mode="limit"))
