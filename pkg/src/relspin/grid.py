"""Spinor fields on periodic Cartesian grids with spectral operator application.

Layout: a field stores amplitudes as ``data[component, i0, i1, ...]``.  Grid
points sit at cell centres, ``x_i = -L/2 + (i + 1/2) h``, so an even number
of points never samples the origin.  Momentum-space kernels are applied slab
by slab along the first axis to bound memory on 128^3 grids.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import scipy.fft

from .errors import BoxTooSmall, DegenerateMomentum, KernelSingularAtZeroMode, NotNormalized

#: worker threads handed to scipy.fft; -1 means all cores
FFT_WORKERS = -1
#: target number of momentum modes per kernel slab
_CHUNK_MODES = 1 << 15


def _fft_friendly(n: int) -> bool:
    for f in (2, 3, 5):
        while n % f == 0:
            n //= f
    return n == 1


@dataclass(frozen=True)
class GridSpec:
    """Periodic box of ``points`` cells per axis and side ``lengths`` (a.u.)."""

    points: tuple
    lengths: tuple

    def __post_init__(self):
        pts = tuple(int(n) for n in np.atleast_1d(self.points))
        lens = tuple(float(v) for v in np.atleast_1d(self.lengths))
        if len(pts) not in (1, 3) or len(lens) != len(pts):
            raise ValueError("grids are 1D or 3D with one length per axis")
        for n in pts:
            if n < 16 or not _fft_friendly(n):
                raise ValueError(f"points per axis must be >= 16 with factors 2, 3, 5 only; got {n}")
        for v in lens:
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"box length must be positive, got {v}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "lengths", lens)

    @classmethod
    def cube(cls, points: int, length: float) -> "GridSpec":
        return cls((points,) * 3, (length,) * 3)

    @classmethod
    def line(cls, points: int, length: float) -> "GridSpec":
        return cls((points,), (length,))

    @property
    def dim(self) -> int:
        return len(self.points)

    @property
    def shape(self) -> tuple:
        return self.points

    @property
    def size(self) -> int:
        return int(np.prod(self.points))

    @property
    def spacing(self) -> tuple:
        return tuple(L / n for L, n in zip(self.lengths, self.points))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axis(self, i: int) -> np.ndarray:
        n, L = self.points[i], self.lengths[i]
        return -L / 2 + (np.arange(n) + 0.5) * (L / n)

    def momentum_axis(self, i: int) -> np.ndarray:
        return 2 * np.pi * scipy.fft.fftfreq(self.points[i], self.spacing[i])

    def coordinate(self, i: int) -> np.ndarray:
        """Coordinate along axis ``i`` shaped to broadcast against the grid."""
        shape = [1] * self.dim
        shape[i] = self.points[i]
        return self.axis(i).reshape(shape)

    def momenta(self, first_axis: slice = slice(None)) -> np.ndarray:
        """Grid momenta as 3-vectors, shape (*grid_shape, 3), optionally a slab."""
        axes = [self.momentum_axis(i) for i in range(self.dim)]
        axes[0] = axes[0][first_axis]
        mesh = np.meshgrid(*axes, indexing="ij")
        out = np.zeros(mesh[0].shape + (3,))
        for i, m in enumerate(mesh):
            out[..., i] = m
        return out


@dataclass
class SpinorField:
    """Complex multi-component amplitudes on a grid (4 for Dirac, 2 for Pauli)."""

    grid: GridSpec
    data: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.shape[1:] != self.grid.shape or self.data.ndim != self.grid.dim + 1:
            raise ValueError(f"data shape {self.data.shape} does not match grid {self.grid.shape}")

    @property
    def ncomp(self) -> int:
        return self.data.shape[0]

    @classmethod
    def zeros(cls, grid: GridSpec, ncomp: int = 4) -> "SpinorField":
        return cls(grid, np.zeros((ncomp,) + grid.shape, dtype=complex))

    @classmethod
    def uniform(cls, grid: GridSpec, spinor) -> "SpinorField":
        """Constant spinor, normalized over the box."""
        spinor = np.asarray(spinor, dtype=complex)
        spinor = spinor / np.linalg.norm(spinor)
        vol = grid.cell_volume * grid.size
        data = np.broadcast_to(spinor.reshape((-1,) + (1,) * grid.dim), (len(spinor),) + grid.shape)
        return cls(grid, data / math.sqrt(vol))

    def norm(self) -> float:
        return math.sqrt(float(np.vdot(self.data, self.data).real) * self.grid.cell_volume)

    def normalized(self) -> "SpinorField":
        return SpinorField(self.grid, self.data / self.norm(), dict(self.diagnostics))

    def inner(self, other: "SpinorField") -> complex:
        return complex(np.vdot(self.data, other.data)) * self.grid.cell_volume

    def copy(self) -> "SpinorField":
        return SpinorField(self.grid, self.data.copy(), dict(self.diagnostics))

    def __add__(self, other):
        return SpinorField(self.grid, self.data + other.data)

    def __sub__(self, other):
        return SpinorField(self.grid, self.data - other.data)

    def __mul__(self, scalar):
        return SpinorField(self.grid, self.data * scalar)

    __rmul__ = __mul__

    def to_momentum(self) -> np.ndarray:
        return scipy.fft.fftn(self.data, axes=range(1, self.grid.dim + 1), workers=FFT_WORKERS)

    @classmethod
    def from_momentum(cls, grid: GridSpec, coeffs: np.ndarray) -> "SpinorField":
        return cls(grid, scipy.fft.ifftn(coeffs, axes=range(1, grid.dim + 1), workers=FFT_WORKERS))

    def momentum_norm(self) -> float:
        coeffs = self.to_momentum()
        return math.sqrt(float(np.vdot(coeffs, coeffs).real) * self.grid.cell_volume / self.grid.size)


Kernel = Callable[[np.ndarray], np.ndarray]


def _slabs(grid: GridSpec):
    n0 = grid.points[0]
    per_slab = grid.size // n0
    step = max(1, _CHUNK_MODES // per_slab)
    for start in range(0, n0, step):
        yield slice(start, min(n0, start + step))


def _eval_kernel(kernel: Kernel, momenta: np.ndarray) -> np.ndarray:
    try:
        return np.asarray(kernel(momenta))
    except DegenerateMomentum as exc:
        raise KernelSingularAtZeroMode(str(exc)) from exc


def _contract(k: np.ndarray, coeffs: np.ndarray, ncomp: int, dim: int) -> np.ndarray:
    """Apply per-mode matrices (..., n, n) or scalars (...) to coeffs (n, ...)."""
    if k.ndim == dim:
        return k[None] * coeffs
    if k.shape[-2:] != (ncomp, ncomp):
        raise ValueError(f"kernel returned shape {k.shape}, expected (..., {ncomp}, {ncomp})")
    k = np.moveaxis(k, (-2, -1), (0, 1))
    out = np.zeros_like(coeffs)
    for a in range(ncomp):
        for b in range(ncomp):
            out[a] += k[a, b] * coeffs[b]
    return out


def apply_in_momentum_space(grid: GridSpec, coeffs: np.ndarray, kernel: Kernel) -> np.ndarray:
    out = np.empty_like(coeffs)
    for sl in _slabs(grid):
        k = _eval_kernel(kernel, grid.momenta(sl))
        out[:, sl] = _contract(k, coeffs[:, sl], coeffs.shape[0], grid.dim)
    return out


def apply_momentum_kernel(field: SpinorField, kernel: Kernel) -> SpinorField:
    """FFT, multiply each mode by kernel(p), inverse FFT.

    ``kernel`` maps momenta (..., 3) to matrices (..., n, n) or scalars (...).
    A kernel raising DegenerateMomentum at p = 0 surfaces as
    KernelSingularAtZeroMode.
    """
    coeffs = apply_in_momentum_space(field.grid, field.to_momentum(), kernel)
    return SpinorField.from_momentum(field.grid, coeffs)


def momentum_quadratic_form(field: SpinorField, kernel: Kernel) -> complex:
    """<field| K |field> evaluated directly from Fourier coefficients."""
    grid = field.grid
    coeffs = field.to_momentum()
    total = 0j
    for sl in _slabs(grid):
        k = _eval_kernel(kernel, grid.momenta(sl))
        total += np.vdot(coeffs[:, sl], _contract(k, coeffs[:, sl], field.ncomp, grid.dim))
    return complex(total) * grid.cell_volume / grid.size


# ------------------------------------------------------------------ operators


@dataclass(frozen=True)
class LocalMatrix:
    """A constant matrix acting on the spinor index at every grid point."""

    matrix: np.ndarray

    def apply(self, field: SpinorField) -> SpinorField:
        return SpinorField(field.grid, np.einsum("ab,b...->a...", self.matrix, field.data))

    def expectation(self, field: SpinorField) -> complex:
        return field.inner(self.apply(field))


@dataclass(frozen=True)
class MomentumOperator:
    """Operator diagonal in momentum, described by a kernel p -> matrix."""

    kernel: Kernel

    def apply(self, field: SpinorField) -> SpinorField:
        return apply_momentum_kernel(field, self.kernel)

    def expectation(self, field: SpinorField) -> complex:
        return momentum_quadratic_form(field, self.kernel)


def as_operator(operator):
    if hasattr(operator, "apply"):
        return operator
    if callable(operator):
        return MomentumOperator(operator)
    return LocalMatrix(np.asarray(operator, dtype=complex))


def expectation(field: SpinorField, operator, *, norm_tolerance: float = 1e-6) -> complex:
    """<field|O|field> for a local matrix, a momentum kernel or any object with ``apply``."""
    norm = field.norm()
    if abs(norm - 1.0) > norm_tolerance:
        raise NotNormalized(f"field norm {norm:.9f} differs from 1")
    op = as_operator(operator)
    if hasattr(op, "expectation"):
        return complex(op.expectation(field))
    return field.inner(op.apply(field))


# ------------------------------------------------------------------ sampling


def sample_state(state, grid: GridSpec, *, min_captured: float = 0.999) -> SpinorField:
    """Evaluate a hydrogenic state at cell centres and renormalize.

    ``diagnostics`` records the pre-renormalization ``norm_defect`` (1 - sampled
    norm squared) and the analytic probability ``captured`` inside the
    largest sphere that fits the box.
    """
    from .hydrogenic import captured_norm_fraction

    if grid.dim != 3:
        raise ValueError("hydrogenic states need a 3D grid")
    captured = captured_norm_fraction(state.Z, min(grid.lengths) / 2)
    if captured < min_captured:
        raise BoxTooSmall(
            f"box of side {min(grid.lengths):.4g} a.u. holds only {captured:.6f} of the Z={state.Z:g} density"
        )
    x, y, z = (grid.coordinate(i) for i in range(3))
    data = np.empty((4,) + grid.shape, dtype=complex)
    for sl in _slabs(grid):
        data[:, sl] = state.evaluate_cartesian(x[sl], y, z)
    field = SpinorField(grid, data)
    sampled = field.norm() ** 2
    out = SpinorField(grid, data / math.sqrt(sampled))
    out.diagnostics.update(norm_defect=1.0 - sampled, captured=captured, Z=state.Z, m=state.m)
    return out


def hydrogenic_grid(Z: float, points: int = 128, box_factor: float = 40.0) -> GridSpec:
    """Cubic grid of side ``box_factor / Z``."""
    return GridSpec.cube(points, box_factor / Z)


def position_moments(field: SpinorField, kind: str = "Pauli", component="z") -> tuple[float, float]:
    """(<r_c>, <r_c^2>) under the position operator attached to ``kind``."""
    from .spin_operators import position_frame

    frame = position_frame(field, kind)
    axis = _axis_index(component)
    coord = field.grid.coordinate(axis)
    dens = np.sum(np.abs(frame.data) ** 2, axis=0)
    dv = field.grid.cell_volume
    return float(np.sum(coord * dens) * dv), float(np.sum(coord**2 * dens) * dv)


def variance_of_position(field: SpinorField, kind: str = "Pauli", component="z") -> float:
    """Var(r_c) under the Pauli, FW or Pryce position operator."""
    norm = field.norm()
    if abs(norm - 1.0) > 1e-6:
        raise NotNormalized(f"field norm {norm:.9f} differs from 1")
    mean, second = position_moments(field, kind, component)
    return second - mean * mean


def _axis_index(component) -> int:
    from .dirac import component_index

    return component_index(component)


# ------------------------------------------------------------------ binary dump

_MAGIC = b"SPNRFLD1"


def dump_field(path, field: SpinorField) -> None:
    """Header (magic, ncomp, dim, points, lengths, half-cell offsets) + little-endian complex128 payload."""
    g = field.grid
    offsets = [-L / 2 + h / 2 for L, h in zip(g.lengths, g.spacing)]
    header = _MAGIC + struct.pack("<II", field.ncomp, g.dim)
    header += struct.pack(f"<{g.dim}Q", *g.points)
    header += struct.pack(f"<{2 * g.dim}d", *g.lengths, *offsets)
    with open(Path(path), "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(field.data, dtype="<c16").tobytes())


def load_field(path) -> SpinorField:
    raw = Path(path).read_bytes()
    if raw[:8] != _MAGIC:
        raise ValueError("not a spinor field dump")
    ncomp, dim = struct.unpack_from("<II", raw, 8)
    pos = 16
    points = struct.unpack_from(f"<{dim}Q", raw, pos)
    pos += 8 * dim
    values = struct.unpack_from(f"<{2 * dim}d", raw, pos)
    pos += 16 * dim
    grid = GridSpec(tuple(points), tuple(values[:dim]))
    data = np.frombuffer(raw, dtype="<c16", offset=pos).reshape((ncomp,) + grid.shape)
    return SpinorField(grid, data.astype(complex))
