"""Relativistic electron spin operators, hydrogenic expectation values and
laser-driven spin precession in atomic units."""

__version__ = "0.1.0"
