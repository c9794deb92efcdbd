"""Periodic solution of y' + a y = b(t) for a constant a > 0.

The solution is evaluated in Green's-function form. With the zero-start
particular integral

    I(t) = int_0^t exp(-a (t - s)) b(s) ds

the periodic solution is ``y(t) = I(t) + exp(-a t) I(p) / (1 - exp(-a p))``.
Only decaying exponentials appear, so large ``a p`` cannot overflow.

I is accumulated by one O(N) sweep. On each cell [t_k, t_k+1] the forcing is
replaced by its cubic interpolant through t_k-1..t_k+2 (indices wrap by
periodicity), and that cubic is integrated exactly against the exponential
weight. The rule is fourth order, reduces to the plain cubic rule as a -> 0,
and stays stable for any a h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import ConfigurationError, DomainError, NearSingular
from .periodic_core import GridFunction, derivative, grid_nodes, sample

# Below this a p the constant part b_mean / a swamps the oscillating part in
# double precision; see scaled_small_a_limit for the regime a -> 0.
MIN_AP = 1e-14

# Lagrange basis on nodes u = -1, 0, 1, 2, as coefficients of 1, u, u^2, u^3.
_BASIS = np.array([
    [0.0, -1.0 / 3.0, 0.5, -1.0 / 6.0],
    [1.0, -0.5, -1.0, 0.5],
    [0.0, 1.0, 0.5, -0.5],
    [0.0, -1.0 / 6.0, 0.0, 1.0 / 6.0],
])


def _moments(z):
    """m_n = int_0^1 exp(-z (1 - u)) u^n du for n = 0..3."""
    if z < 1.0:
        out = []
        for n in range(4):
            term = 1.0 / math.factorial(n + 1)
            s = term
            j = 0
            while abs(term) > 1e-18 * abs(s):
                j += 1
                term *= -z / (j + n + 1)
                s += term
            out.append(math.factorial(n) * s)
        return out
    m = [-math.expm1(-z) / z]
    for n in range(1, 4):
        m.append((1.0 - n * m[-1]) / z)
    return m


@lru_cache(maxsize=256)
def exp_weights(z):
    """Stencil weights (per unit step) for b_k-1, b_k, b_k+1, b_k+2."""
    m = np.array(_moments(float(z)))
    return tuple(float(w) for w in _BASIS @ m)


@dataclass(frozen=True)
class LinearPeriodicProblem:
    a: float
    b: GridFunction
    period: float = None

    def __post_init__(self):
        if self.period is None:
            object.__setattr__(self, "period", self.b.period)
        if not self.a > 0:
            raise DomainError(f"decay rate a must be positive, got {self.a!r}")
        if not math.isclose(self.period, self.b.period, rel_tol=1e-12):
            raise ConfigurationError("forcing period does not match problem period")


class PeriodicSolver:
    """Reusable solver for a fixed (a, period, N); call with forcing samples."""

    def __init__(self, a, period, N):
        if not a > 0:
            raise DomainError(f"decay rate a must be positive, got {a!r}")
        ap = a * period
        if ap < MIN_AP:
            raise NearSingular(
                f"a*p = {ap:.3e} is too small to resolve; a*y tends to the forcing "
                "mean as a -> 0, so solve the rescaled problem instead"
            )
        self.a = float(a)
        self.period = float(period)
        self.N = int(N)
        h = period / N
        self.weights = tuple(h * w for w in exp_weights(a * h))
        self.decay = math.exp(-a * h)
        self.profile = np.exp(-a * grid_nodes(period, N)) / -math.expm1(-ap)

    def particular(self, b):
        w0, w1, w2, w3 = self.weights
        return kernels.periodic_sweep(np.ascontiguousarray(b[:-1]), w0, w1, w2, w3, self.decay)

    def __call__(self, b):
        I = self.particular(b)
        y = I + self.profile * I[-1]
        y[-1] = y[0]
        return y


def solve_linear_periodic(prob):
    """The unique p-periodic solution of y' + a y = b(t) on b's grid."""
    solver = PeriodicSolver(prob.a, prob.period, prob.b.N)
    return GridFunction(prob.period, solver(prob.b.values))


def linear_residual(a, b, y):
    """sup |y' + a y - b| on the grid, y' by periodic finite differences."""
    return float(np.abs(derivative(y) + a * y.values - b.values).max())


@dataclass
class Trajectory:
    """Uniformly stepped states; ``states`` has one row per time."""

    times: np.ndarray
    states: np.ndarray
    step: float
    method: str

    @property
    def final(self):
        return self.states[-1]


def decay_to_periodic(prob, y_init, horizon):
    """Solution from y(0) = y_init over ``horizon`` whole periods.

    Uses exact variation of constants on each period,
    y(kp + t) = exp(-a t) y(kp) + I(t), so the distance to the periodic
    solution shrinks by exactly exp(-a p) per period.
    """
    if horizon < 1:
        raise ConfigurationError("horizon must be at least one period")
    solver = PeriodicSolver(prob.a, prob.period, prob.b.N)
    I = solver.particular(prob.b.values)
    N = prob.b.N
    t = grid_nodes(prob.period, N)
    decay = np.exp(-prob.a * t)
    times = [t]
    pieces = [decay * y_init + I]
    start = pieces[0][-1]
    for k in range(1, horizon):
        times.append(t[1:] + k * prob.period)
        seg = decay * start + I
        pieces.append(seg[1:])
        start = seg[-1]
    return Trajectory(np.concatenate(times), np.concatenate(pieces)[:, None],
                      prob.period / N, "exact-exponential")


def scaled_small_a_limit(b, a_sequence, N=2048):
    """sup_t |a y_a(t) - mean(b)| for each a; tends to 0 as a -> 0."""
    g = b if isinstance(b, GridFunction) else sample(b, N)
    from .periodic_core import integrate_period

    mean = integrate_period(g) / g.period
    out = []
    for a in a_sequence:
        y = solve_linear_periodic(LinearPeriodicProblem(a, g))
        out.append(float(np.abs(a * y.values - mean).max()))
    return out
