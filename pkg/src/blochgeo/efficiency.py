"""Geodesic and speed efficiency of the model trajectories."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import numerics
from .errors import DegenerateFieldError
from .model import ScenarioParams, bloch_at, field_at, profile_at, state_at

__all__ = [
    "EfficiencyReport",
    "geodesic_distance",
    "energy_uncertainty",
    "path_length",
    "geodesic_efficiency",
    "spectral_norm",
    "speed_efficiency",
    "fubini_study_rate_check",
    "efficiency_report",
]


@dataclass
class EfficiencyReport:
    s0: float
    s: float
    eta_ge: float
    delta_e_samples: List[Tuple[float, float]] = field(default_factory=list)
    eta_se_samples: List[Tuple[float, float]] = field(default_factory=list)
    spectral_norm_samples: List[Tuple[float, float]] = field(default_factory=list)


def geodesic_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """Fubini-Study distance 2 arccos sqrt((1 + a.b)/2) between two Bloch vectors.

    This is the angle between the vectors on the Bloch sphere, so orthogonal
    states are ``pi`` apart.
    """
    cos_ab = min(1.0, max(-1.0, float(np.dot(a, b))))
    return 2.0 * math.acos(math.sqrt(0.5 * (1.0 + cos_ab)))


def energy_uncertainty(params: ScenarioParams, t: float) -> float:
    p = profile_at(params, t)
    return math.sqrt(p.alpha_dot**2 + 0.25 * p.beta_dot**2 * math.sin(2.0 * p.alpha) ** 2)


def path_length(params: ScenarioParams, spec: Optional[numerics.QuadratureSpec] = None) -> float:
    """Length 2 * int Delta E dt of the trajectory over [0, t_final]."""
    return 2.0 * numerics.integrate(lambda t: energy_uncertainty(params, t), 0.0, params.t_final, spec)


def geodesic_efficiency(params: ScenarioParams, spec: Optional[numerics.QuadratureSpec] = None) -> float:
    s0 = geodesic_distance(bloch_at(params, 0.0), bloch_at(params, params.t_final))
    return s0 / path_length(params, spec)


def spectral_norm(h0: float, h: Sequence[float]) -> float:
    """Largest singular value |h0| + |h| of h0*1 + h.sigma."""
    return abs(h0) + math.sqrt(float(np.dot(h, h)))


def speed_efficiency(a: Sequence[float], h0: float, h: Sequence[float]) -> float:
    h2 = float(np.dot(h, h))
    if h2 == 0.0:
        raise DegenerateFieldError("speed efficiency undefined for a vanishing field")
    ah = float(np.dot(a, h))
    transverse = math.sqrt(max(h2 - ah * ah, 0.0))
    return transverse / (abs(h0) + math.sqrt(h2))


def fubini_study_rate_check(params: ScenarioParams, t: float, dt: float) -> float:
    """Relative gap between the finite Fubini-Study step and 2 Delta E dt.

    ``1 - |<psi|phi>|^2`` is evaluated as the squared norm of the part of
    ``phi`` orthogonal to ``psi``, which keeps full relative precision for
    tiny ``dt``. Returns 0 when ``dt`` is 0.
    """
    if dt == 0.0:
        return 0.0
    psi = state_at(params, t).as_array()
    phi = state_at(params, t + dt).as_array()
    orth = phi - np.vdot(psi, phi) * psi
    finite = 2.0 * math.sqrt(float(np.vdot(orth, orth).real))
    linear = 2.0 * energy_uncertainty(params, t) * dt
    return abs(finite - linear) / linear


def efficiency_report(
    params: ScenarioParams,
    samples: int = 1001,
    spec: Optional[numerics.QuadratureSpec] = None,
) -> EfficiencyReport:
    s0 = geodesic_distance(bloch_at(params, 0.0), bloch_at(params, params.t_final))
    s = path_length(params, spec)
    report = EfficiencyReport(s0=s0, s=s, eta_ge=s0 / s)
    for t in params.times(samples):
        t = float(t)
        h = field_at(params, t)
        report.delta_e_samples.append((t, energy_uncertainty(params, t)))
        report.eta_se_samples.append((t, speed_efficiency(bloch_at(params, t), 0.0, h)))
        report.spectral_norm_samples.append((t, spectral_norm(0.0, h)))
    return report
