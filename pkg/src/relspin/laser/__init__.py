"""Electron spin dynamics in standing and traveling light waves."""

from .fields import (
    FieldSample,
    LaserConfig,
    field_sample,
    larmor_frequency,
    omega_prediction,
    photonic_spin_density,
    ponderomotive_spin_frequency,
    standing_spin_density,
    standing_wave_A,
    vector_potential,
    window,
)
from .precession import (
    FloquetRun,
    PrecessionResult,
    extract_precession_frequency,
    loglog_slope,
    precession_frequency,
    rotating_frame_omega,
    sweep_amplitudes,
)
from .propagate import (
    Backend,
    PropagationResult,
    default_time_step,
    fw_spin_expectation,
    initial_state,
    line_grid,
    make_stepper,
    propagate,
)
from .weak_fw import TERMS, weak_fw_hamiltonian_terms, weak_fw_operator

__all__ = [
    "Backend",
    "FieldSample",
    "FloquetRun",
    "LaserConfig",
    "PrecessionResult",
    "PropagationResult",
    "TERMS",
    "default_time_step",
    "extract_precession_frequency",
    "field_sample",
    "fw_spin_expectation",
    "initial_state",
    "larmor_frequency",
    "line_grid",
    "loglog_slope",
    "make_stepper",
    "omega_prediction",
    "photonic_spin_density",
    "ponderomotive_spin_frequency",
    "precession_frequency",
    "propagate",
    "rotating_frame_omega",
    "standing_spin_density",
    "standing_wave_A",
    "sweep_amplitudes",
    "vector_potential",
    "weak_fw_hamiltonian_terms",
    "weak_fw_operator",
    "window",
]
