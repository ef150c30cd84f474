"""Bloch-sphere geometry of an exactly solvable family of driven qubits."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BlochGeoError,
    ConvergenceError,
    DegenerateFieldError,
    DegenerateTrajectoryError,
    DomainError,
    EvaluationError,
    StationaryPointError,
    UnsupportedScenarioError,
)
from .model import PhaseKind, ScenarioParams  # noqa: E402

__all__ = [
    "__version__",
    "BlochGeoError",
    "ConvergenceError",
    "DegenerateFieldError",
    "DegenerateTrajectoryError",
    "DomainError",
    "EvaluationError",
    "StationaryPointError",
    "UnsupportedScenarioError",
    "PhaseKind",
    "ScenarioParams",
]
