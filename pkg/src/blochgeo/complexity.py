"""Accessed and accessible parametric volumes and the complexity measure.

The trajectory is mapped to spherical angles ``(theta, phi)``; the region
swept from the start to time ``t`` is the rectangle between the initial and
current angles, weighted by the Fubini-Study area density ``sin(theta)/4``.
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional, Tuple

import numpy as np

from . import numerics
from .errors import ConvergenceError, DegenerateTrajectoryError, DomainError, UnsupportedScenarioError
from .model import PhaseKind, QubitState, ScenarioParams, profile_at, state_at

__all__ = [
    "SphericalAngles",
    "VolumeRoute",
    "VolumeReport",
    "metric_density",
    "angles_from_amplitudes",
    "AngleTrack",
    "instantaneous_volume",
    "accessed_volume",
    "accessible_volume",
    "volume_closed_forms",
    "complexity",
    "complexity_closed_form",
    "complexity_limit",
    "LINEAR_COMPLEXITY",
    "QUADRATIC_COMPLEXITY",
]

TWO_PI = 2.0 * math.pi
LINEAR_COMPLEXITY = (3.0 * math.pi**2 - 4.0) / (4.0 * math.pi**2)
QUADRATIC_COMPLEXITY = (5.0 * math.pi**2 - 6.0) / (6.0 * math.pi**2)

# amplitudes smaller than this put the state on a pole, where phi is undefined
POLE_TOL = 1e-12
# azimuthal extent below which the rectangle has no area
DEGENERATE_AZIMUTH = 1e-12
# above this exponent the closed form is divided through by e^{(pi/2) xi}
_DIVIDE_ABOVE = 1.0
_RATE_DIFF = numerics.FiniteDiffSpec(step_scale=1e-7, order="second")


class SphericalAngles(NamedTuple):
    theta: float
    phi_az: float


class VolumeRoute(enum.Enum):
    ANALYTIC = "analytic"
    ANGLES = "angles"


@dataclass
class VolumeReport:
    v_samples: List[Tuple[float, float]]
    v_bar: float
    v_max: float
    complexity: float
    bounds: Tuple[float, float, float, float]
    degenerate_azimuth: bool = False
    route: VolumeRoute = field(default=VolumeRoute.ANGLES)


def metric_density(theta: float) -> float:
    """Square root of the Fubini-Study metric determinant, |sin theta|/4."""
    return abs(math.sin(theta)) / 4.0


def _nearest_translate(raw: float, reference: float) -> float:
    return raw + TWO_PI * round((reference - raw) / TWO_PI)


def _is_polar(c0: complex, c1: complex) -> bool:
    return abs(c0) < POLE_TOL or abs(c1) < POLE_TOL


def _relative_phase(c0: complex, c1: complex) -> float:
    """arg(c1) - arg(c0) in (-pi, pi]."""
    z = c0.conjugate() * c1
    return math.atan2(z.imag, z.real)


def angles_from_amplitudes(state: QubitState, previous: Optional[SphericalAngles] = None) -> SphericalAngles:
    """Polar and (unwrapped) azimuthal angle of a normalized state.

    The azimuth is the 2-argument arctangent of c1 relative to c0, moved to
    the 2 pi translate closest to ``previous``. On a pole it is carried over
    from ``previous`` (0 without one).
    """
    c0, c1 = complex(state[0]), complex(state[1])
    theta = 2.0 * math.atan2(abs(c1), abs(c0))
    if _is_polar(c0, c1):
        return SphericalAngles(theta, previous.phi_az if previous is not None else 0.0)
    raw = _relative_phase(c0, c1)
    if previous is not None:
        raw = _nearest_translate(raw, previous.phi_az)
    return SphericalAngles(theta, raw)


class AngleTrack:
    """Continuous angles along a trajectory ``state(t)`` on ``[t_a, t_b]``.

    The azimuth is lifted through a set of anchor times: each step is
    predicted from the azimuth rate at the midpoint and the interval is
    bisected until the lifted value matches the prediction and neighbouring
    anchors differ by less than ``max_step`` radians. Between anchors, a
    value is lifted from the nearest anchor. On a pole the azimuth is the
    one-sided limit taken from inside the interval.
    """

    def __init__(
        self,
        state: Callable[[float], QubitState],
        t_a: float,
        t_b: float,
        initial: int = 257,
        max_step: float = 1.0,
        max_anchors: int = 200_000,
    ):
        if not t_b > t_a:
            raise DomainError(f"need t_b > t_a, got [{t_a}, {t_b}]")
        self._state = state
        self.t_a, self.t_b = t_a, t_b
        self._delta = 1e-11 * (t_b - t_a)
        self._max_step = max_step
        self._max_anchors = max_anchors
        grid = np.linspace(t_a, t_b, initial)
        grid[-1] = t_b
        theta0, raw0 = self._raw(t_a)
        phi0 = raw0 if raw0 is not None else 0.0
        self.times = [t_a]
        self.thetas = [theta0]
        self.phis = [phi0]
        for hi in grid[1:]:
            self._extend(float(hi))

    def _raw(self, t: float) -> Tuple[float, Optional[float]]:
        c0, c1 = self._state(t)
        theta = 2.0 * math.atan2(abs(c1), abs(c0))
        if _is_polar(c0, c1):
            inward = t + self._delta if t - self.t_a <= self.t_b - t else t - self._delta
            c0, c1 = self._state(inward)
            if _is_polar(c0, c1):
                return theta, None
        return theta, _relative_phase(c0, c1)

    @staticmethod
    def _lift(raw: Optional[float], reference: float) -> float:
        return reference if raw is None else _nearest_translate(raw, reference)

    def _rate(self, t: float) -> float:
        """d(phi)/dt = Im(c1'/c1 - c0'/c0) from differences of the amplitudes.

        The amplitudes never wrap, so this predicts the next azimuth without
        the 2 pi ambiguity of the raw angle.
        """
        c = np.array(self._state(t), dtype=complex)
        if abs(c[0]) < POLE_TOL or abs(c[1]) < POLE_TOL:
            return 0.0
        dc = numerics.derivative(
            lambda s: np.array(self._state(s), dtype=complex),
            t,
            _RATE_DIFF,
            scale=self.t_b - self.t_a,
            bounds=(self.t_a, self.t_b),
        )
        return float((dc[1] / c[1] - dc[0] / c[0]).imag)

    def _extend(self, hi: float) -> None:
        # iterative bisection; the stack holds the pending right endpoints
        stack = [hi]
        while stack:
            if len(self.times) > self._max_anchors:
                raise ConvergenceError(
                    f"azimuth lifting needs more than {self._max_anchors} anchors",
                    estimate=self.phis[-1],
                    error=math.inf,
                )
            lo, phi_lo = self.times[-1], self.phis[-1]
            hi = stack[-1]
            mid = 0.5 * (lo + hi)
            predicted = phi_lo + self._rate(mid) * (hi - lo)
            theta_hi, raw_hi = self._raw(hi)
            phi_hi = self._lift(raw_hi, predicted)
            smooth = abs(phi_hi - predicted) < 0.25 and abs(phi_hi - phi_lo) < self._max_step
            if smooth or not lo < mid < hi:
                stack.pop()
                self.times.append(hi)
                self.thetas.append(theta_hi)
                self.phis.append(phi_hi)
            else:
                stack.append(mid)

    def angles(self, t: float) -> SphericalAngles:
        if not self.t_a <= t <= self.t_b:
            raise DomainError(f"t={t!r} outside [{self.t_a!r}, {self.t_b!r}]")
        i = bisect.bisect_left(self.times, t)
        if i == len(self.times):
            i -= 1
        elif i > 0 and t - self.times[i - 1] < self.times[i] - t:
            i -= 1
        if self.times[i] == t:
            return SphericalAngles(self.thetas[i], self.phis[i])
        theta, raw = self._raw(t)
        return SphericalAngles(theta, self._lift(raw, self.phis[i]))

    def bounds(self) -> Tuple[float, float, float, float]:
        return min(self.thetas), max(self.thetas), min(self.phis), max(self.phis)


def instantaneous_volume(angles_start: SphericalAngles, angles_now: SphericalAngles) -> float:
    """Fubini-Study area of the angle rectangle between two points."""
    d_cos = math.cos(angles_start.theta) - math.cos(angles_now.theta)
    return abs(d_cos * (angles_now.phi_az - angles_start.phi_az)) / 4.0


def _analytic_volume(params: ScenarioParams) -> Callable[[float], float]:
    """V(t) with theta = 2 alpha and phi = beta substituted in."""
    beta_start = profile_at(params, 0.0).beta

    def volume(t: float) -> float:
        p = profile_at(params, t)
        if params.phase is PhaseKind.NO_GROWTH:
            return p.alpha
        # cos(0) - cos(2 alpha) = 2 sin^2(alpha)
        return 0.5 * math.sin(p.alpha) ** 2 * abs(p.beta - beta_start)

    return volume


def _track(params: ScenarioParams) -> AngleTrack:
    return AngleTrack(lambda t: state_at(params, t), 0.0, params.t_final)


def _angle_volume(track: AngleTrack, degenerate: bool) -> Callable[[float], float]:
    start = track.angles(track.t_a)

    def volume(t: float) -> float:
        now = track.angles(t)
        if degenerate:
            return 0.5 * abs(now.theta - start.theta)
        return instantaneous_volume(start, now)

    return volume


def _is_degenerate(bounds) -> bool:
    return bounds[3] - bounds[2] < DEGENERATE_AZIMUTH


def _volume_from_bounds(bounds, degenerate: bool) -> float:
    theta_min, theta_max, phi_min, phi_max = bounds
    if degenerate:
        return 0.5 * (theta_max - theta_min)
    return 0.25 * abs(math.cos(theta_min) - math.cos(theta_max)) * abs(phi_max - phi_min)


def _analytic_bounds(params: ScenarioParams) -> Tuple[float, float, float, float]:
    # theta = 2 alpha and beta are monotone for every profile in the family
    a, b = profile_at(params, 0.0), profile_at(params, params.t_final)
    thetas = (2.0 * a.alpha, 2.0 * b.alpha)
    phis = (a.beta, b.beta)
    return min(thetas), max(thetas), min(phis), max(phis)


def _route(route) -> VolumeRoute:
    return route if isinstance(route, VolumeRoute) else VolumeRoute(route)


def accessed_volume(
    params: ScenarioParams,
    route: VolumeRoute | str = VolumeRoute.ANALYTIC,
    spec: Optional[numerics.QuadratureSpec] = None,
) -> float:
    """Time average of V(t) over the run.

    ``route="analytic"`` integrates the closed-form V(t); ``"angles"``
    recovers the angles from the state amplitudes at every quadrature node.
    A constant azimuth switches V(t) to half the polar arc length.
    """
    route = _route(route)
    if route is VolumeRoute.ANALYTIC:
        integrand = _analytic_volume(params)
    else:
        track = _track(params)
        integrand = _angle_volume(track, _is_degenerate(track.bounds()))
    return numerics.integrate(integrand, 0.0, params.t_final, spec) / params.t_final


def accessible_volume(params: ScenarioParams, route: VolumeRoute | str = VolumeRoute.ANALYTIC) -> float:
    """Area of the rectangle spanned by the angle extrema of the whole run."""
    if _route(route) is VolumeRoute.ANALYTIC:
        bounds = _analytic_bounds(params)
    else:
        bounds = _track(params).bounds()
    return _volume_from_bounds(bounds, _is_degenerate(bounds))


def volume_closed_forms(params: ScenarioParams) -> Tuple[float, float]:
    """Exact (V_bar, V_max) for the five phase profiles."""
    w, nu = params.omega0, params.nu0
    xi = nu / w
    kind = params.phase
    if params.t_final != math.pi / (2.0 * w):
        raise UnsupportedScenarioError("closed forms assume the window [0, pi/(2 omega0)]")
    if kind is PhaseKind.NO_GROWTH:
        return math.pi / 4.0, math.pi / 2.0
    if kind is PhaseKind.LINEAR:
        return xi * (math.pi / 16.0 + 1.0 / (4.0 * math.pi)), math.pi * xi / 4.0
    if kind is PhaseKind.QUADRATIC:
        return xi * xi * (math.pi**2 / 96.0 + 1.0 / 16.0), math.pi**2 * xi * xi / 16.0
    # exponential: V(t) = sin^2(w t) |e^{lam t} - 1| / 2 with lam = +-nu
    lam = nu if kind is PhaseKind.EXP_GROWTH else -nu
    t_f = params.t_final
    em1 = math.expm1(lam * t_f)
    weighted = em1 / (2.0 * lam) + lam * (em1 + 2.0) / (2.0 * (lam * lam + 4.0 * w * w))
    v_bar = abs(weighted - 0.5 * t_f) / (2.0 * t_f)
    return v_bar, abs(em1) / 2.0


def complexity(
    params: ScenarioParams,
    samples: int = 1001,
    route: VolumeRoute | str = VolumeRoute.ANGLES,
    spec: Optional[numerics.QuadratureSpec] = None,
) -> VolumeReport:
    """Complexity (V_max - V_bar) / V_max with the sampled V(t) and bounds."""
    route = _route(route)
    times = params.times(samples)
    if route is VolumeRoute.ANALYTIC:
        bounds = _analytic_bounds(params)
        degenerate = _is_degenerate(bounds)
        volume = _analytic_volume(params)
    else:
        track = _track(params)
        sampled = [track.angles(float(t)) for t in times]
        tb = track.bounds()
        bounds = (
            min(tb[0], min(a.theta for a in sampled)),
            max(tb[1], max(a.theta for a in sampled)),
            min(tb[2], min(a.phi_az for a in sampled)),
            max(tb[3], max(a.phi_az for a in sampled)),
        )
        degenerate = _is_degenerate(bounds)
        volume = _angle_volume(track, degenerate)
    v_max = _volume_from_bounds(bounds, degenerate)
    if v_max <= 0.0:
        raise DegenerateTrajectoryError("accessible volume is zero")
    v_bar = numerics.integrate(volume, 0.0, params.t_final, spec) / params.t_final
    return VolumeReport(
        v_samples=[(float(t), volume(float(t))) for t in times],
        v_bar=v_bar,
        v_max=v_max,
        complexity=(v_max - v_bar) / v_max,
        bounds=bounds,
        degenerate_azimuth=degenerate,
        route=route,
    )


def complexity_closed_form(params: ScenarioParams) -> float:
    kind = params.phase
    if kind is PhaseKind.NO_GROWTH:
        return 0.5
    if kind is PhaseKind.LINEAR:
        return LINEAR_COMPLEXITY
    if kind is PhaseKind.QUADRATIC:
        return QUADRATIC_COMPLEXITY
    return complexity_limit(kind, params.xi)


def complexity_limit(kind: PhaseKind, xi: float) -> float:
    """Closed-form complexity of the exponential profiles as a function of xi.

    Written with ``E - 1`` from ``expm1`` so small ``xi`` keeps its digits;
    for larger ``xi`` numerator and denominator are divided by
    ``E = e^{(pi/2) xi}``, which cannot overflow.
    """
    if not (math.isfinite(xi) and xi > 0):
        raise DomainError(f"xi must be positive and finite, got {xi!r}")
    if kind not in (PhaseKind.EXP_GROWTH, PhaseKind.EXP_DECAY):
        raise UnsupportedScenarioError(f"no xi-dependent closed form for {kind.value}")
    pi = math.pi
    x, x2, x3 = xi, xi * xi, xi**3
    scale = 2 * pi * x3 + 8 * pi * x
    # lead * E - rest; the difference lead - rest is kept in closed form
    # because both are close to -8 (or 8) for small xi
    if kind is PhaseKind.EXP_GROWTH:
        lead = 2 * pi * x3 - 4 * x2 + 8 * pi * x - 8
        rest = pi * x3 + 4 * pi * x - 8
        gap = pi * x3 - 4 * x2 + 4 * pi * x
    else:
        lead = pi * x3 + 4 * pi * x + 8
        rest = 2 * pi * x3 + 4 * x2 + 8 * pi * x + 8
        gap = -pi * x3 - 4 * x2 - 4 * pi * x
    exponent = 0.5 * pi * x
    if exponent > _DIVIDE_ABOVE:
        inv = math.exp(-exponent)
        return (lead - rest * inv) / (scale * (1.0 - inv))
    em1 = math.expm1(exponent)
    return (lead * em1 + gap) / (scale * em1)
