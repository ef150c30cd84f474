"""Curvature coefficient of the Bloch-sphere trajectories.

Four independent routes are provided: the Bloch-vector formula (general and
reduced to a.h = 0), an operator expectation-value formula driven by matrix
finite differences, and per-scenario closed-form kernels.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from . import numerics
from .errors import (
    DegenerateFieldError,
    DomainError,
    EvaluationError,
    StationaryPointError,
    UnsupportedScenarioError,
)
from .model import (
    PhaseKind,
    ScenarioParams,
    bloch_at,
    field_at,
    field_derivative_at,
    hamiltonian_at,
    state_at,
)

__all__ = [
    "CurvatureRoute",
    "CurvatureSample",
    "KernelTerms",
    "OperatorTerms",
    "curvature_vector_general",
    "curvature_vector_orthogonal",
    "operator_terms",
    "curvature_operator_form",
    "kernel_terms",
    "curvature_scenario",
    "short_time_expansion",
    "curvature_at",
    "curvature_samples",
]

# relative size of h^2 - (a.h)^2 below which the speed counts as zero
STATIONARY_TOL = 1e-12
IMAG_TOL = 1e-9
OPERATOR_DIFF = numerics.FiniteDiffSpec(step_scale=1e-3, order="fourth")


class CurvatureRoute(enum.Enum):
    VECTOR_GENERAL = "vector-general"
    VECTOR_ORTHOGONAL = "vector-orthogonal"
    OPERATOR_FORM = "operator-form"
    SCENARIO_KERNEL = "scenario-kernel"


@dataclass(frozen=True)
class CurvatureSample:
    t: float
    kappa2: float
    route: CurvatureRoute


class KernelTerms(NamedTuple):
    h2: float
    hdot2: float
    h_dot_hdot: float


class OperatorTerms(NamedTuple):
    """Pieces of the operator-form curvature, kept apart for inspection.

    ``stationary`` is the fourth-moment term that survives for a constant
    Hamiltonian, ``variation`` the variance of the rescaled derivative, and
    ``commutator`` the (complex) commutator term.
    """

    stationary: float
    variation: float
    commutator: complex

    @property
    def total(self) -> complex:
        return self.stationary + self.variation + self.commutator


def _as_vec(v) -> np.ndarray:
    return np.asarray(v, dtype=float)


def curvature_vector_general(a, h, hdot) -> float:
    """Curvature from the Bloch vector, the field and its time derivative.

    Valid for any unit ``a``; raises :class:`StationaryPointError` when the
    field is (nearly) parallel to ``a`` so that the state does not move.
    """
    a, h, hdot = _as_vec(a), _as_vec(h), _as_vec(hdot)
    h2 = float(h @ h)
    if h2 == 0.0:
        raise DegenerateFieldError("curvature undefined for a vanishing field")
    ah = float(a @ h)
    speed2 = h2 - ah * ah
    if speed2 <= STATIONARY_TOL * h2:
        raise StationaryPointError(f"evolution speed vanishes (h^2 - (a.h)^2 = {speed2:.3e})")
    w = float(a @ hdot) * h - ah * hdot
    bending = h2 * float(hdot @ hdot) - float(h @ hdot) ** 2 - float(w @ w)
    twist = float(a @ np.cross(h, hdot))
    return 4.0 * ah * ah / speed2 + bending / speed2**3 + 4.0 * ah * twist / speed2**2


def curvature_vector_orthogonal(h, hdot) -> float:
    """[h^2 hdot^2 - (h.hdot)^2] / h^6, the a.h = 0 special case."""
    h, hdot = _as_vec(h), _as_vec(hdot)
    h2 = float(h @ h)
    if h2 == 0.0:
        raise DegenerateFieldError("curvature undefined for a vanishing field")
    return (h2 * float(hdot @ hdot) - float(h @ hdot) ** 2) / h2**3


def _expect(op: np.ndarray, psi: np.ndarray) -> complex:
    return complex(np.vdot(psi, op @ psi))


def _rescaled_deviation(hamiltonian: np.ndarray, psi: np.ndarray) -> Tuple[np.ndarray, float]:
    dev = hamiltonian - _expect(hamiltonian, psi).real * np.eye(2)
    variance = _expect(dev @ dev, psi).real
    if variance <= 0.0:
        raise StationaryPointError("energy variance vanishes")
    v = math.sqrt(variance)
    return dev / v, v


def operator_terms(
    hamiltonian: Callable[[float], np.ndarray],
    state: Callable[[float], np.ndarray],
    t: float,
    spec: Optional[numerics.FiniteDiffSpec] = None,
    *,
    scale: float = 1.0,
    bounds: Optional[Tuple[float, float]] = None,
) -> OperatorTerms:
    """Operator-form curvature for an arbitrary Hamiltonian and solution.

    ``state(t)`` must solve the Schrodinger equation for ``hamiltonian(t)``
    up to a global phase. The rescaled deviation ``(H - <H>)/Delta E`` is
    differentiated by finite differences of the whole matrix, then divided
    by the speed ``Delta E`` to turn the time derivative into an arc-length
    derivative.
    """
    spec = spec or OPERATOR_DIFF
    psi = np.asarray(state(t), dtype=complex)
    dh, v = _rescaled_deviation(np.asarray(hamiltonian(t), dtype=complex), psi)
    if v <= STATIONARY_TOL * max(1.0, float(np.abs(dh).max())):
        raise StationaryPointError(f"speed {v:.3e} too small at t={t}")

    def deviation(s: float) -> np.ndarray:
        return _rescaled_deviation(
            np.asarray(hamiltonian(s), dtype=complex), np.asarray(state(s), dtype=complex)
        )[0]

    dh_prime = numerics.derivative(deviation, t, spec, scale=scale, bounds=bounds) / v
    dh2 = dh @ dh
    stationary = _expect(dh2 @ dh2, psi).real - _expect(dh2, psi).real ** 2
    variation = _expect(dh_prime @ dh_prime, psi).real - _expect(dh_prime, psi).real ** 2
    commutator = 1j * _expect(dh2 @ dh_prime - dh_prime @ dh2, psi)
    return OperatorTerms(stationary, variation, commutator)


def curvature_operator_form(
    params: ScenarioParams,
    t: float,
    spec: Optional[numerics.FiniteDiffSpec] = None,
) -> float:
    """Operator-form curvature for the model family at time ``t``.

    Near the ends of the window the stencil turns one-sided. Raises
    :class:`EvaluationError` if the imaginary residue exceeds ``IMAG_TOL``.
    """
    terms = operator_terms(
        lambda s: hamiltonian_at(params, s),
        lambda s: state_at(params, s).as_array(),
        t,
        spec,
        scale=params.time_scale,
        bounds=(0.0, params.t_final),
    )
    total = terms.total
    if abs(total.imag) > IMAG_TOL * max(1.0, abs(total.real)):
        raise EvaluationError(f"operator-form curvature has imaginary part {total.imag:.3e} at t={t}")
    return total.real


def kernel_terms(params: ScenarioParams, t: float) -> KernelTerms:
    """Closed-form h^2, hdot^2 and h.hdot for the time-dependent scenarios."""
    kind = params.phase
    if kind is PhaseKind.NO_GROWTH:
        raise UnsupportedScenarioError("no kernel for a constant phase; its curvature is zero")
    if not 0.0 <= t <= params.t_final:
        raise DomainError(f"t={t!r} outside [0, {params.t_final!r}]")
    w, nu = params.omega0, params.nu0
    s2, s4 = math.sin(2 * w * t), math.sin(4 * w * t)
    c4, c8 = math.cos(4 * w * t), math.cos(8 * w * t)
    if kind is PhaseKind.LINEAR:
        n2, n4 = nu**2, nu**4
        return KernelTerms(
            n2 / 8 + w * w - n2 / 8 * c4,
            n4 / 32 - n4 / 32 * c8 + 2 * n2 * w * w + 2 * n2 * w * w * c4,
            0.25 * n2 * w * s4,
        )
    if kind is PhaseKind.QUADRATIC:
        n4 = nu**4
        return KernelTerms(
            w * w + n4 * t * t * s2 * s2 / 4,
            nu**8 * t**4 * s4 * s4 / 16
            + n4 * s2 * s2 / 4
            + 2 * n4 * w * w * t * t * (1 + c4)
            + n4 * w * t * s4,
            n4 * t / 4 * (w * t * s4 + s2 * s2),
        )
    # both exponential profiles share one kernel up to the sign of the rate
    sign = 1.0 if kind is PhaseKind.EXP_GROWTH else -1.0
    e2 = math.exp(2 * sign * nu * t)
    n2 = nu * nu
    return KernelTerms(
        w * w + n2 * e2 * s2 * s2 / 4,
        n2 * e2 / 16
        * (4 * n2 * s2 * s2 + 32 * w * w * (1 + c4) + n2 * e2 * s4 * s4 + sign * 16 * nu * w * s4),
        n2 * e2 / 4 * (sign * nu * s2 * s2 + w * s4),
    )


def curvature_scenario(params: ScenarioParams, t: float) -> float:
    if params.phase is PhaseKind.NO_GROWTH:
        if not 0.0 <= t <= params.t_final:
            raise DomainError(f"t={t!r} outside [0, {params.t_final!r}]")
        return 0.0
    k = kernel_terms(params, t)
    return (k.h2 * k.hdot2 - k.h_dot_hdot**2) / k.h2**3


def short_time_expansion(params: ScenarioParams, t: float) -> float:
    """Truncated small-t series of the curvature for each time-dependent scenario."""
    w, nu = params.omega0, params.nu0
    xi2 = (nu / w) ** 2
    kind = params.phase
    if kind is PhaseKind.LINEAR:
        return 4 * xi2 - 8 * xi2 * (nu * nu + 2 * w * w) * t * t
    if kind is PhaseKind.QUADRATIC:
        return 9 * nu * nu * xi2 * t * t - 28 * nu**4 * t**4
    if kind is PhaseKind.EXP_GROWTH:
        return 4 * xi2 + 12 * nu * xi2 * t + xi2 * (9 * nu * nu - 16 * w * w) * t * t
    if kind is PhaseKind.EXP_DECAY:
        return 4 * xi2 - 12 * nu * xi2 * t + xi2 * (9 * nu * nu - 16 * w * w) * t * t
    raise UnsupportedScenarioError("no short-time series for a constant phase")


def curvature_at(params: ScenarioParams, t: float, route: CurvatureRoute) -> float:
    if route is CurvatureRoute.SCENARIO_KERNEL:
        return curvature_scenario(params, t)
    if route is CurvatureRoute.OPERATOR_FORM:
        return curvature_operator_form(params, t)
    h, hdot = field_at(params, t), field_derivative_at(params, t)
    if route is CurvatureRoute.VECTOR_ORTHOGONAL:
        return curvature_vector_orthogonal(h, hdot)
    return curvature_vector_general(bloch_at(params, t), h, hdot)


def curvature_samples(
    params: ScenarioParams,
    times: Optional[Sequence[float]] = None,
    routes: Iterable[CurvatureRoute] = tuple(CurvatureRoute),
) -> List[CurvatureSample]:
    """Curvature on a time grid (default: 1001 uniform points), route-major order."""
    if times is None:
        times = params.times()
    out = []
    for route in routes:
        for t in times:
            out.append(CurvatureSample(float(t), curvature_at(params, float(t), route), route))
    return out
