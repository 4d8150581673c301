"""Physical constants and unit conversions (Hartree atomic units).

hbar = m = |q| = 1 and the electron charge is q = -1.
"""

import math

#: CODATA 2018 inverse fine-structure constant
SPEED_OF_LIGHT = 137.035999084
FINE_STRUCTURE = 1.0 / SPEED_OF_LIGHT
ELECTRON_MASS = 1.0
ELECTRON_CHARGE = -1.0
#: vacuum permittivity, chosen so that Coulomb's law reads q1*q2/r
EPSILON0 = 1.0 / (4.0 * math.pi)

BOHR_RADIUS_M = 5.29177210903e-11
FIELD_AU_V_PER_M = 5.14220674763e11
#: E_h / (t_a a_0^2) expressed in W/cm^2
INTENSITY_AU_W_PER_CM2 = 6.4364099007e15
TIME_AU_S = 2.4188843265857e-17


def length_to_au(meters: float) -> float:
    return meters / BOHR_RADIUS_M


def length_to_si(au: float) -> float:
    return au * BOHR_RADIUS_M


def field_to_au(volts_per_meter: float) -> float:
    return volts_per_meter / FIELD_AU_V_PER_M


def field_to_si(au: float) -> float:
    return au * FIELD_AU_V_PER_M


def intensity_to_w_cm2(au: float) -> float:
    return au * INTENSITY_AU_W_PER_CM2
