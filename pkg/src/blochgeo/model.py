"""Two-parameter family of traceless qubit Hamiltonians.

The evolving state is ``cos(alpha)|0> + exp(i beta) sin(alpha)|1>`` with
``alpha = omega0 * t`` and one of five phase profiles ``beta(t)``. Everything
here is a closed-form function of ``(params, t)``; the only numerical step is
the quadrature behind :func:`transport_phase`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import numerics
from .errors import DomainError

__all__ = [
    "PhaseKind",
    "ScenarioParams",
    "ProfileValues",
    "QubitState",
    "BlochVector",
    "FieldVector",
    "PAULI",
    "profile_at",
    "state_at",
    "transported_state_at",
    "transport_phase",
    "transport_phases",
    "bloch_at",
    "bloch_from_state",
    "field_at",
    "field_derivative_at",
    "hamiltonian_at",
    "hamiltonian_from_field",
    "rotation_decomposition_check",
]

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)


class PhaseKind(enum.Enum):
    """Time dependence of the relative phase beta(t)."""

    NO_GROWTH = "no-growth"
    LINEAR = "linear"
    QUADRATIC = "quadratic"
    EXP_GROWTH = "exp-growth"
    EXP_DECAY = "exp-decay"

    @classmethod
    def parse(cls, name: str) -> "PhaseKind":
        key = name.strip().lower().replace("_", "-")
        for kind in cls:
            if kind.value == key:
                return kind
        choices = ", ".join(k.value for k in cls)
        raise DomainError(f"unknown scenario {name!r}; expected one of {choices}")


@dataclass(frozen=True)
class ScenarioParams:
    """One member of the Hamiltonian family and its evolution window.

    ``beta0`` is only read for :attr:`PhaseKind.NO_GROWTH`. ``t_final``
    defaults to ``pi / (2 omega0)``, the time at which the state reaches |1>.
    """

    omega0: float
    nu0: float
    phase: PhaseKind
    beta0: float = 0.0
    t_final: Optional[float] = None

    def __post_init__(self):
        bad = []
        if not (math.isfinite(self.omega0) and self.omega0 > 0):
            bad.append(f"omega0={self.omega0!r} (must be > 0)")
        if not (math.isfinite(self.nu0) and self.nu0 > 0):
            bad.append(f"nu0={self.nu0!r} (must be > 0)")
        if not math.isfinite(self.beta0):
            bad.append(f"beta0={self.beta0!r} (must be finite)")
        if not isinstance(self.phase, PhaseKind):
            bad.append(f"phase={self.phase!r} (must be a PhaseKind)")
        if self.t_final is None:
            if not bad:
                object.__setattr__(self, "t_final", math.pi / (2.0 * self.omega0))
        elif not (math.isfinite(self.t_final) and self.t_final > 0):
            bad.append(f"t_final={self.t_final!r} (must be > 0)")
        if bad:
            raise DomainError("invalid scenario parameters: " + "; ".join(bad))

    @property
    def xi(self) -> float:
        """Dimensionless ratio nu0 / omega0."""
        return self.nu0 / self.omega0

    @property
    def time_scale(self) -> float:
        return 1.0 / self.omega0

    def times(self, samples: int = 1001) -> np.ndarray:
        if samples < 2:
            raise DomainError(f"need at least 2 samples, got {samples}")
        grid = np.linspace(0.0, self.t_final, samples)
        grid[-1] = self.t_final
        return grid


class ProfileValues(NamedTuple):
    alpha: float
    alpha_dot: float
    alpha_ddot: float
    beta: float
    beta_dot: float
    beta_ddot: float


class QubitState(NamedTuple):
    c0: complex
    c1: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.c0, self.c1], dtype=complex)


class BlochVector(NamedTuple):
    ax: float
    ay: float
    az: float


class FieldVector(NamedTuple):
    hx: float
    hy: float
    hz: float


def _check_time(params: ScenarioParams, t: float) -> None:
    if not 0.0 <= t <= params.t_final:
        raise DomainError(f"t={t!r} outside [0, {params.t_final!r}]")


def profile_at(params: ScenarioParams, t: float) -> ProfileValues:
    _check_time(params, t)
    w, nu = params.omega0, params.nu0
    kind = params.phase
    if kind is PhaseKind.NO_GROWTH:
        beta = (params.beta0, 0.0, 0.0)
    elif kind is PhaseKind.LINEAR:
        beta = (nu * t, nu, 0.0)
    elif kind is PhaseKind.QUADRATIC:
        beta = (0.5 * nu * nu * t * t, nu * nu * t, nu * nu)
    elif kind is PhaseKind.EXP_GROWTH:
        e = math.exp(nu * t)
        beta = (e, nu * e, nu * nu * e)
    elif kind is PhaseKind.EXP_DECAY:
        e = math.exp(-nu * t)
        # d/dt exp(-nu t) = -nu exp(-nu t)
        beta = (e, -nu * e, nu * nu * e)
    else:  # pragma: no cover - enum is closed
        raise DomainError(f"unsupported phase kind {kind!r}")
    return ProfileValues(w * t, w, 0.0, *beta)


def state_at(params: ScenarioParams, t: float) -> QubitState:
    p = profile_at(params, t)
    return QubitState(
        complex(math.cos(p.alpha), 0.0),
        complex(math.cos(p.beta), math.sin(p.beta)) * math.sin(p.alpha),
    )


def _transport_integrand(params: ScenarioParams):
    def integrand(s: float) -> float:
        p = profile_at(params, s)
        return p.beta_dot * math.sin(p.alpha) ** 2

    return integrand


def transport_phase(
    params: ScenarioParams,
    t: float,
    spec: Optional[numerics.QuadratureSpec] = None,
) -> float:
    """Phase removed from |psi> so that the transported state has <m|dm/dt> = 0."""
    _check_time(params, t)
    if params.phase is PhaseKind.NO_GROWTH:
        return 0.0
    return numerics.integrate(_transport_integrand(params), 0.0, t, spec)


def transport_phases(
    params: ScenarioParams,
    times: Sequence[float],
    spec: Optional[numerics.QuadratureSpec] = None,
) -> np.ndarray:
    """:func:`transport_phase` on a nondecreasing grid, integrated piecewise.

    Each increment is a short integral, so a dense grid costs far less than
    independent calls while keeping the same per-piece tolerance.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1:
        raise DomainError("times must be one-dimensional")
    if np.any(np.diff(times) < 0):
        raise DomainError("times must be nondecreasing")
    out = np.zeros(len(times))
    if len(times) == 0 or params.phase is PhaseKind.NO_GROWTH:
        return out
    for t in (times[0], times[-1]):
        _check_time(params, float(t))
    f = _transport_integrand(params)
    pieces = [numerics.integrate(f, 0.0, float(times[0]), spec)]
    for lo, hi in zip(times[:-1], times[1:]):
        pieces.append(numerics.integrate(f, float(lo), float(hi), spec))
    out[:] = np.cumsum(pieces)
    return out


def transported_state_at(params: ScenarioParams, t: float, phase: Optional[float] = None) -> QubitState:
    """Parallel-transported state exp(-i phi(t)) |psi(t)>."""
    if phase is None:
        phase = transport_phase(params, t)
    c0, c1 = state_at(params, t)
    rot = complex(math.cos(phase), -math.sin(phase))
    return QubitState(rot * c0, rot * c1)


def bloch_from_state(state: QubitState) -> BlochVector:
    """Bloch vector tr(rho sigma) of a normalized pure state."""
    c0, c1 = state
    cross = c0.conjugate() * c1
    return BlochVector(2.0 * cross.real, 2.0 * cross.imag, abs(c0) ** 2 - abs(c1) ** 2)


def bloch_at(params: ScenarioParams, t: float) -> BlochVector:
    p = profile_at(params, t)
    s2a = math.sin(2.0 * p.alpha)
    return BlochVector(s2a * math.cos(p.beta), s2a * math.sin(p.beta), math.cos(2.0 * p.alpha))


def _field_from_profile(p: ProfileValues) -> FieldVector:
    s2, c2 = math.sin(2.0 * p.alpha), math.cos(2.0 * p.alpha)
    sb, cb = math.sin(p.beta), math.cos(p.beta)
    half = 0.5 * p.beta_dot
    return FieldVector(
        -half * c2 * s2 * cb - p.alpha_dot * sb,
        -half * c2 * s2 * sb + p.alpha_dot * cb,
        half * s2 * s2,
    )


def field_at(params: ScenarioParams, t: float) -> FieldVector:
    """Magnetic field h(t) with H(t) = h(t) . sigma (hbar = 1)."""
    return _field_from_profile(profile_at(params, t))


def field_derivative_at(params: ScenarioParams, t: float) -> FieldVector:
    """Analytic time derivative of :func:`field_at`."""
    p = profile_at(params, t)
    s2, c2 = math.sin(2.0 * p.alpha), math.cos(2.0 * p.alpha)
    sb, cb = math.sin(p.beta), math.cos(p.beta)
    # g = sin(2a) cos(2a) = sin(4a)/2 and its derivative
    g = s2 * c2
    g_dot = 2.0 * p.alpha_dot * (c2 * c2 - s2 * s2)
    # q = sin^2(2a)
    q = s2 * s2
    q_dot = 4.0 * p.alpha_dot * s2 * c2
    half, half_dot = 0.5 * p.beta_dot, 0.5 * p.beta_ddot
    radial = half_dot * g + half * g_dot
    return FieldVector(
        -radial * cb + half * g * p.beta_dot * sb - p.alpha_ddot * sb - p.alpha_dot * p.beta_dot * cb,
        -radial * sb - half * g * p.beta_dot * cb + p.alpha_ddot * cb - p.alpha_dot * p.beta_dot * sb,
        half_dot * q + half * q_dot,
    )


def hamiltonian_from_field(h: Sequence[float], h0: float = 0.0) -> np.ndarray:
    hx, hy, hz = h
    return np.array(
        [[h0 + hz, hx - 1j * hy], [hx + 1j * hy, h0 - hz]],
        dtype=complex,
    )


def hamiltonian_at(params: ScenarioParams, t: float) -> np.ndarray:
    """2x2 Hamiltonian matrix h(t) . sigma; Hermitian and traceless."""
    return hamiltonian_from_field(field_at(params, t))


def _rotate_z(angle: float, v) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]])


def rotation_decomposition_check(params: ScenarioParams, t: float, tol: float = 1e-10) -> bool:
    """Check that h(t) is a z-rotation by beta(t) of a field with fixed y-component alpha_dot.

    The rotated field is ``(-sgn r cos 2a, alpha_dot, sgn r sin 2a)`` with
    ``r = sqrt(|h|^2 - alpha_dot^2)`` and ``sgn`` the sign of
    ``(beta_dot / 2) sin 2a``; at ``sin 2a = 0`` both branches coincide.
    """
    p = profile_at(params, t)
    h = np.array(field_at(params, t))
    s2, c2 = math.sin(2.0 * p.alpha), math.cos(2.0 * p.alpha)
    # sqrt(|h|^2 - alpha_dot^2) evaluated as |h - alpha_dot e| with e the
    # rotated y axis; the difference of squares loses half the digits when
    # beta_dot sin 2a is small
    e_axis = np.array([-math.sin(p.beta), math.cos(p.beta), 0.0])
    radial = float(np.linalg.norm(h - p.alpha_dot * e_axis))
    sign = 1.0 if 0.5 * p.beta_dot * s2 >= 0.0 else -1.0
    h_body = np.array([-sign * radial * c2, p.alpha_dot, sign * radial * s2])
    rebuilt = _rotate_z(p.beta, h_body)
    scale = max(1.0, float(np.linalg.norm(h)))
    return bool(np.max(np.abs(rebuilt - h)) <= tol * scale)
