"""Initial-value integration of the cell-volume system and attraction metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from . import kernels
from .errors import ConfigurationError, DomainError, SingularityApproached
from .linear_periodic import Trajectory

DEFAULT_STEPS_PER_PERIOD = 2000


def _steps_per_period(period, step):
    if step is None:
        return DEFAULT_STEPS_PER_PERIOD
    if not step > 0:
        raise ConfigurationError("step must be positive")
    m = math.ceil(period / step * (1.0 - 1e-12))
    if m < 100:
        raise ConfigurationError(f"step {step!r} exceeds period/100")
    return m


def integrate(params, x0, y0, step=None, horizon_periods=20, y_floor=1e-9, kernel=None):
    """Fixed-step classical RK4 from (x0, y0) at t = 0.

    The step is snapped down to period / m for an integer m so every period
    boundary falls on a stored time. Raises SingularityApproached (with the
    last safe state) if y would drop to ``y_floor``.
    """
    if not y0 > 0:
        raise DomainError("initial volume y0 must be positive")
    p = params.period
    m = _steps_per_period(p, step)
    h = p / m
    nsteps = int(round(horizon_periods * m))
    half = np.arange(2 * m) * (0.5 * h)
    alpha_half = np.ascontiguousarray(params.alpha(half), dtype=float)
    gamma_half = np.ascontiguousarray(params.gamma(half), dtype=float)
    impl = kernel or kernels
    xs, ys, done = impl.rk4_cell(alpha_half, gamma_half, float(params.beta), float(params.sigma),
                                 float(params.epsilon), float(x0), float(y0), h, nsteps,
                                 float(y_floor))
    if done < nsteps:
        t = done * h
        raise SingularityApproached(
            f"y reached the floor {y_floor:g} after t={t:.6g} starting from ({x0}, {y0})",
            time=t, state=(float(xs[-1]), float(ys[-1])),
        )
    times = np.arange(nsteps + 1) * h
    return Trajectory(times, np.column_stack([xs, ys]), h, "rk4")


def steps_per_period(traj, period):
    return int(round(period / traj.step))


def period_map_displacements(traj, period):
    """|z(kp) - z((k-1)p)| for k = 1..K: distances moved by the period map."""
    m = steps_per_period(traj, period)
    z = traj.states[::m]
    return np.linalg.norm(np.diff(z, axis=0), axis=1)


def one_period_error(params, x0, y0, steps_per_period, reference_factor=4):
    """Error after one period against a run with ``reference_factor`` x more steps."""
    p = params.period
    coarse = integrate(params, x0, y0, p / steps_per_period, 1)
    fine = integrate(params, x0, y0, p / (steps_per_period * reference_factor), 1)
    return float(np.abs(coarse.final - fine.final).max())


@dataclass
class AttractionReport:
    """Per-period distances d_k (k = 1..K) to the periodic solution.

    d_k = sup|x - x*| + sup|y - y*| over [(k-1)p, kp].
    """

    distances: np.ndarray
    ratios: np.ndarray
    tolerance: float
    passed: bool

    @property
    def final(self):
        return float(self.distances[-1])


def periodic_interpolant(g):
    """Periodic cubic spline through a GridFunction."""
    return CubicSpline(g.nodes, g.values, bc_type="periodic")


def attraction_metrics(traj, periodic, period=None, tol=1e-4, floor=None):
    """Distances between a trajectory and a periodic solution, period by period.

    Passes when d_K <= tol and each of the last three ratios is below 1.
    A ratio whose newer distance is already under ``floor`` (default
    tol / 100) counts as settled: there the distances sit at the accuracy
    of the periodic solution and their ratios are noise.
    """
    px, py = periodic
    period = period or px.period
    floor = tol * 1e-2 if floor is None else floor
    m = steps_per_period(traj, period)
    K = (traj.times.size - 1) // m
    if K < 4:
        raise ConfigurationError("trajectory must span at least 4 periods")
    tt = np.mod(traj.times[: K * m + 1], period)
    ex = np.abs(traj.states[: K * m + 1, 0] - periodic_interpolant(px)(tt))
    ey = np.abs(traj.states[: K * m + 1, 1] - periodic_interpolant(py)(tt))
    d = np.array([ex[k * m:(k + 1) * m + 1].max() + ey[k * m:(k + 1) * m + 1].max()
                  for k in range(K)])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(d[:-1] > 0, d[1:] / d[:-1], 0.0)
    settled = (ratios[-3:] < 1.0) | (d[-3:] <= floor)
    passed = bool(d[-1] <= tol and settled.all())
    return AttractionReport(d, ratios, tol, passed)
