"""Exception and warning types shared across the package."""


class RelspinError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateMomentum(RelspinError, ValueError):
    """A kernel with a direction-dependent factor was evaluated at p = 0."""


class SupercriticalZ(RelspinError, ValueError):
    """Z * alpha >= 1, the point-nucleus Dirac-Coulomb ground state does not exist."""


class BoxTooSmall(RelspinError, ValueError):
    """The simulation box truncates a noticeable part of the bound-state density."""


class KernelSingularAtZeroMode(RelspinError, ValueError):
    """A momentum kernel with an 'error' zero-mode policy was applied to a grid containing p = 0."""


class NotNormalized(RelspinError, ValueError):
    """Expectation value requested on a field whose norm differs from one."""


class UnstableStep(RelspinError, RuntimeError):
    """Norm drift during propagation exceeded the allowed budget."""


class FieldOn(RelspinError, RuntimeError):
    """A field-free observable was requested while the laser window is nonzero."""


class FitDegenerate(RelspinError, ValueError):
    """The accumulated rotation angle is too small to fit a precession rate."""


class RegimeViolation(UserWarning):
    """Parameters leave the regime in which a model is meant to be used."""
