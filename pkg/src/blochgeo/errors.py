"""Exception hierarchy shared by every blochgeo module."""

from __future__ import annotations


class BlochGeoError(Exception):
    """Base class for all errors raised by blochgeo."""


class DomainError(BlochGeoError, ValueError):
    """An argument lies outside the domain of the operation (e.g. t > t_final)."""


class EvaluationError(BlochGeoError, ArithmeticError):
    """A callable produced a non-finite value."""


class ConvergenceError(BlochGeoError):
    """Adaptive quadrature ran out of subdivisions before meeting its tolerance.

    The best available estimate and its error bound are kept so callers can
    decide whether the result is still usable.
    """

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(f"{message} (estimate={estimate!r}, error bound={error!r})")
        self.estimate = estimate
        self.error = error


class DegenerateFieldError(BlochGeoError, ValueError):
    """The magnetic field vector vanishes, so a ratio involving |h| is undefined."""


class StationaryPointError(BlochGeoError, ValueError):
    """The evolution speed vanishes (h is parallel to the Bloch vector)."""


class UnsupportedScenarioError(BlochGeoError, ValueError):
    """The requested closed form does not exist for this phase profile."""


class DegenerateTrajectoryError(BlochGeoError, ValueError):
    """The accessible volume of the trajectory is zero."""
