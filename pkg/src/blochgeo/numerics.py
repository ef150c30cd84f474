"""Adaptive quadrature and finite differences.

These are the independent oracles the rest of the package is checked
against, so nothing in here knows about qubits.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Literal, Optional, Tuple, Union

import numpy as np

from .errors import ConvergenceError, DomainError, EvaluationError

__all__ = [
    "QuadratureSpec",
    "FiniteDiffSpec",
    "integrate",
    "derivative",
    "vector_derivative",
]

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 2**20

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_subdivisions < 1:
            raise DomainError(f"max_subdivisions must be >= 1, got {self.max_subdivisions}")


@dataclass(frozen=True)
class FiniteDiffSpec:
    """Central-difference settings.

    The actual step is ``step_scale * scale`` where ``scale`` is the
    characteristic time of the problem (``1/omega0`` for the qubit model).
    """

    step_scale: float = 1e-6
    order: Literal["second", "fourth"] = "second"

    def __post_init__(self):
        if not self.step_scale > 0:
            raise DomainError(f"step_scale must be positive, got {self.step_scale}")
        if self.order not in ("second", "fourth"):
            raise DomainError(f"order must be 'second' or 'fourth', got {self.order!r}")


DEFAULT_QUADRATURE = QuadratureSpec()
DEFAULT_FINITE_DIFF = FiniteDiffSpec()

# Uniform panels the adaptive refinement starts from; guards against a
# coarse Simpson pair agreeing by accident on oscillatory integrands.
_INITIAL_PANELS = 4


def _checked(f: Callable[[float], float], x: float) -> float:
    y = float(f(x))
    if not math.isfinite(y):
        raise EvaluationError(f"integrand returned {y!r} at x={x!r}")
    return y


class _Panel:
    __slots__ = ("a", "b", "fa", "fl", "fm", "fr", "fb", "value", "error")

    def __init__(self, a, b, fa, fl, fm, fr, fb):
        self.a, self.b = a, b
        self.fa, self.fl, self.fm, self.fr, self.fb = fa, fl, fm, fr, fb
        width = b - a
        coarse = width / 6.0 * (fa + 4.0 * fm + fb)
        fine = width / 12.0 * (fa + 4.0 * fl + 2.0 * fm + 4.0 * fr + fb)
        # Richardson extrapolation of the two Simpson estimates
        self.value = fine + (fine - coarse) / 15.0
        self.error = abs(fine - coarse) / 15.0

    def split(self, f) -> Tuple["_Panel", "_Panel"]:
        m = 0.5 * (self.a + self.b)
        left_q = 0.5 * (self.a + m)
        right_q = 0.5 * (m + self.b)
        ll = 0.5 * (self.a + left_q)
        lr = 0.5 * (left_q + m)
        rl = 0.5 * (m + right_q)
        rr = 0.5 * (right_q + self.b)
        left = _Panel(self.a, m, self.fa, _checked(f, ll), self.fl, _checked(f, lr), self.fm)
        right = _Panel(m, self.b, self.fm, _checked(f, rl), self.fr, _checked(f, rr), self.fb)
        return left, right


def _make_panel(f, a: float, b: float) -> _Panel:
    m = 0.5 * (a + b)
    return _Panel(
        a, b,
        _checked(f, a), _checked(f, 0.5 * (a + m)), _checked(f, m),
        _checked(f, 0.5 * (m + b)), _checked(f, b),
    )


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    spec: Optional[QuadratureSpec] = None,
) -> float:
    """Integrate ``f`` over ``[a, b]`` with globally adaptive Simpson's rule.

    The panel with the largest error estimate is bisected until the summed
    estimate satisfies ``error <= max(abs_tol, rel_tol * |I|)``. Raises
    :class:`ConvergenceError` if ``spec.max_subdivisions`` bisections are not
    enough and :class:`EvaluationError` if ``f`` returns NaN or Inf.
    """
    spec = spec or DEFAULT_QUADRATURE
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"integration limits must be finite, got [{a}, {b}]")
    if a > b:
        raise DomainError(f"integration requires a <= b, got [{a}, {b}]")
    if a == b:
        return 0.0

    edges = np.linspace(a, b, _INITIAL_PANELS + 1)
    panels = [_make_panel(f, float(lo), float(hi)) for lo, hi in zip(edges[:-1], edges[1:])]
    # heap entries: (-error, insertion counter, panel); the counter keeps
    # ordering deterministic when two errors tie
    heap = [(-p.error, i, p) for i, p in enumerate(panels)]
    heapq.heapify(heap)
    counter = len(heap)
    total = math.fsum(p.value for p in panels)
    total_err = math.fsum(p.error for p in panels)
    subdivisions = 0

    while total_err > max(spec.abs_tol, spec.rel_tol * abs(total)):
        if subdivisions >= spec.max_subdivisions:
            raise ConvergenceError(
                f"adaptive Simpson did not converge on [{a}, {b}] within "
                f"{spec.max_subdivisions} subdivisions",
                estimate=total,
                error=total_err,
            )
        _, _, worst = heapq.heappop(heap)
        # floating-point panels cannot be split below one ulp
        if worst.b - worst.a <= 4.0 * math.ulp(max(abs(worst.a), abs(worst.b), 1e-300)):
            raise ConvergenceError(
                f"panel [{worst.a}, {worst.b}] reached machine resolution",
                estimate=total,
                error=total_err,
            )
        left, right = worst.split(f)
        subdivisions += 1
        total += left.value + right.value - worst.value
        total_err = max(total_err + left.error + right.error - worst.error, 0.0)
        for child in (left, right):
            heapq.heappush(heap, (-child.error, counter, child))
            counter += 1

    return math.fsum(entry[2].value for entry in heap)


_CENTRAL = {
    "second": ((-1, -0.5), (1, 0.5)),
    "fourth": ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12)),
}
_FORWARD = {
    "second": ((0, -1.5), (1, 2.0), (2, -0.5)),
    "fourth": ((0, -25 / 12), (1, 4.0), (2, -3.0), (3, 4 / 3), (4, -0.25)),
}


def _stencil(order: str, t: float, h: float, bounds: Optional[Tuple[float, float]]):
    reach = 1 if order == "second" else 2
    central = _CENTRAL[order]
    if bounds is None:
        return central, h
    lo, hi = bounds
    if not lo <= t <= hi:
        raise DomainError(f"t={t} outside [{lo}, {hi}]")
    fits_left = t - reach * h >= lo
    fits_right = t + reach * h <= hi
    if fits_left and fits_right:
        return central, h
    forward = _FORWARD[order]
    width = len(forward) - 1
    if not fits_left and t + width * h <= hi:
        return forward, h
    if not fits_right and t - width * h >= lo:
        return forward, -h
    raise DomainError(f"interval [{lo}, {hi}] too short for step {h}")


def derivative(
    f: Callable[[float], ArrayLike],
    t: float,
    spec: Optional[FiniteDiffSpec] = None,
    *,
    scale: float = 1.0,
    bounds: Optional[Tuple[float, float]] = None,
) -> ArrayLike:
    """Finite-difference derivative of ``f`` at ``t``.

    ``f`` may return a scalar or any fixed-shape array (complex allowed).
    When ``bounds`` is given, the stencil switches to a one-sided formula of
    the same order wherever the central stencil would leave the interval.
    """
    spec = spec or DEFAULT_FINITE_DIFF
    h = spec.step_scale * scale
    coefficients, step = _stencil(spec.order, t, h, bounds)
    acc = None
    for offset, weight in coefficients:
        value = np.asarray(f(t + offset * step))
        if not np.all(np.isfinite(value)):
            raise EvaluationError(f"non-finite sample at t={t + offset * step!r}")
        acc = weight * value if acc is None else acc + weight * value
    result = acc / step
    if result.ndim == 0:
        return result.item()
    return result


def vector_derivative(
    f: Callable[[float], ArrayLike],
    t: float,
    spec: Optional[FiniteDiffSpec] = None,
    *,
    scale: float = 1.0,
    bounds: Optional[Tuple[float, float]] = None,
) -> np.ndarray:
    """Componentwise :func:`derivative` of a vector-valued function."""
    value = derivative(lambda x: np.asarray(f(x), dtype=float), t, spec, scale=scale, bounds=bounds)
    return np.atleast_1d(np.asarray(value, dtype=float))
