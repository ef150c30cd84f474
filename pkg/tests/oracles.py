"""Independent reference computations shared by the test modules."""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate as sci
from scipy.linalg import expm

from blochgeo.model import PAULI, PhaseKind, ScenarioParams, profile_at, state_at, transport_phases

ALL_KINDS = list(PhaseKind)
MOVING_KINDS = [k for k in PhaseKind if k is not PhaseKind.NO_GROWTH]
GRID = [0.5, 1.0, 2.0]

# five-point stencils: central, forward, backward (offsets, weights)
_CENTRAL = ((-2, -1, 1, 2), (1 / 12, -8 / 12, 8 / 12, -1 / 12))
_FORWARD = ((0, 1, 2, 3, 4), (-25 / 12, 4.0, -3.0, 4 / 3, -0.25))


def stencil(t, lo, hi, h):
    if t - 2 * h >= lo and t + 2 * h <= hi:
        offsets, weights = _CENTRAL
        return [t + o * h for o in offsets], weights, h
    step = h if t - 2 * h < lo else -h
    offsets, weights = _FORWARD
    return [t + o * step for o in offsets], weights, step


def transported_with_derivative(params: ScenarioParams, times, rel_step=1e-3):
    """m(t) and a fourth-order finite-difference dm/dt on a grid.

    The transport phase is integrated once over the union of all stencil
    nodes so the cost stays linear in the number of samples.
    """
    h = rel_step / params.omega0
    plans = [stencil(float(t), 0.0, params.t_final, h) for t in times]
    nodes = sorted({x for pts, _, _ in plans for x in pts} | {float(t) for t in times})
    nodes = [min(max(x, 0.0), params.t_final) for x in nodes]
    phases = dict(zip(nodes, transport_phases(params, nodes)))

    def m(x):
        return np.exp(-1j * phases[x]) * state_at(params, x).as_array()

    values, derivs = [], []
    for t, (pts, weights, step) in zip(times, plans):
        values.append(m(float(t)))
        derivs.append(sum(w * m(p) for p, w in zip(pts, weights)) / step)
    return np.array(values), np.array(derivs)


def pauli_dot(v):
    return sum(c * p for c, p in zip(v, PAULI))


def magnus_state(h, hdot, psi0, tau):
    """State at time tau for H(t) = (h + t hdot).sigma started from psi0 at t=0.

    Two-term Magnus expansion; the omitted terms are O(tau^4) and O(tau^5),
    far below what the finite-difference curvature stencil can resolve.
    """
    n = np.asarray(h) * tau + np.asarray(hdot) * tau**2 / 2 - (tau**3 / 6) * np.cross(h, hdot)
    return expm(-1j * pauli_dot(n)) @ psi0


def state_from_bloch(a):
    theta = math.acos(max(-1.0, min(1.0, a[2])))
    phi = math.atan2(a[1], a[0])
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])


def quad(f, a, b):
    return sci.quad(f, a, b, epsabs=1e-14, epsrel=1e-13, limit=500)[0]


def printed_growth_mean_volume(xi):
    """Mean accessed volume for exponential growth, written as printed."""
    e = math.exp(0.5 * math.pi * xi)
    return ((xi**2 + 2) * e - 2) / (math.pi * xi * (xi**2 + 4)) - 0.25


def printed_growth_complexity(x):
    e = math.exp(0.5 * math.pi * x)
    pi = math.pi
    num = (2 * pi * x**3 - 4 * x**2 + 8 * pi * x - 8) * e - (pi * x**3 + 4 * pi * x - 8)
    den = (2 * pi * x**3 + 8 * pi * x) * e - (2 * pi * x**3 + 8 * pi * x)
    return num / den


def printed_decay_complexity(x):
    e = math.exp(0.5 * math.pi * x)
    pi = math.pi
    num = (pi * x**3 + 4 * pi * x + 8) * e - (2 * pi * x**3 + 4 * x**2 + 8 * pi * x + 8)
    den = (2 * pi * x**3 + 8 * pi * x) * e - (2 * pi * x**3 + 8 * pi * x)
    return num / den


def local_time_scale(params: ScenarioParams, t):
    """Shortest time scale of the field at t; the transverse part turns at beta_dot."""
    return 1.0 / max(params.omega0, params.nu0, abs(profile_at(params, t).beta_dot))
