"""Continuous p-periodic scalar functions and their grid representation.

Every computed periodic function lives on the same closed uniform grid
``t_k = k p / N`` (k = 0..N, N even) so that pointwise arithmetic never needs
resampling. Quadrature is composite Simpson.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, PeriodicityViolation

DEFAULT_N = 2048

FORCING_KINDS = ("constant", "sinusoid", "raised_cos2", "harmonic", "table")


def _check_angular(omega, period):
    cycles = omega * period / (2.0 * math.pi)
    if abs(cycles - round(cycles)) > 1e-9 * max(1.0, abs(cycles)):
        raise ConfigurationError(
            f"omega={omega!r} is not a multiple of 2*pi/period (period={period!r})"
        )


@dataclass(frozen=True)
class PeriodicForcing:
    """A p-periodic forcing given in closed form or as a sampled table.

    Build instances through the classmethods (``constant``, ``sinusoid``,
    ``raised_cos2``, ``harmonic``, ``table``); ``params`` is a tuple of
    name/value pairs so instances stay hashable and comparable.

    The table form holds N + 1 samples on a uniform grid over [0, p]; other
    grid sizes are served by linear interpolation, which limits accuracy to
    second order.
    """

    kind: str
    period: float
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in FORCING_KINDS:
            raise ConfigurationError(f"unknown forcing kind {self.kind!r}")
        if not (self.period > 0 and math.isfinite(self.period)):
            raise ConfigurationError(f"period must be positive, got {self.period!r}")
        p = self.param_dict
        if self.kind in ("sinusoid", "raised_cos2"):
            _check_angular(p["omega"], self.period)
        elif self.kind == "harmonic":
            if len(p["cos"]) != len(p["sin"]):
                raise ConfigurationError("harmonic cos/sin coefficient lists differ in length")
        elif self.kind == "table":
            v = np.asarray(p["values"], dtype=float)
            if v.size < 3:
                raise ConfigurationError("table forcing needs at least 3 samples")
            if abs(v[0] - v[-1]) > 1e-12 * max(1.0, np.abs(v).max()):
                raise ConfigurationError("table forcing is not periodic: first and last samples differ")

    @property
    def param_dict(self):
        return dict(self.params)

    @classmethod
    def constant(cls, c, period=1.0):
        return cls("constant", float(period), (("c", float(c)),))

    @classmethod
    def sinusoid(cls, c0, c1, omega=None, phase=0.0, period=1.0):
        """``c0 + c1 sin(omega t + phase)``; omega defaults to 2 pi / period."""
        omega = 2.0 * math.pi / period if omega is None else float(omega)
        return cls("sinusoid", float(period),
                   (("c0", float(c0)), ("c1", float(c1)), ("omega", omega), ("phase", float(phase))))

    @classmethod
    def raised_cos2(cls, c0, c1, omega=None, phase=0.0, period=1.0):
        """``c0 + c1 cos^2(omega t + phase)``."""
        omega = 2.0 * math.pi / period if omega is None else float(omega)
        return cls("raised_cos2", float(period),
                   (("c0", float(c0)), ("c1", float(c1)), ("omega", omega), ("phase", float(phase))))

    @classmethod
    def harmonic(cls, cos_coeffs, sin_coeffs, period=1.0):
        """``sum_k a_k cos(2 pi k t / p) + b_k sin(2 pi k t / p)``, k from 0."""
        return cls("harmonic", float(period),
                   (("cos", tuple(float(a) for a in cos_coeffs)),
                    ("sin", tuple(float(b) for b in sin_coeffs))))

    @classmethod
    def table(cls, values, period=1.0):
        return cls("table", float(period), (("values", tuple(float(v) for v in values)),))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        p = self.param_dict
        kind = self.kind
        if kind == "constant":
            return np.full_like(t, p["c"])
        if kind == "sinusoid":
            return p["c0"] + p["c1"] * np.sin(p["omega"] * t + p["phase"])
        if kind == "raised_cos2":
            return p["c0"] + p["c1"] * np.cos(p["omega"] * t + p["phase"]) ** 2
        if kind == "harmonic":
            w = 2.0 * math.pi / self.period
            out = np.zeros_like(t)
            for k, (a, b) in enumerate(zip(p["cos"], p["sin"])):
                out = out + a * np.cos(k * w * t) + b * np.sin(k * w * t)
            return out
        v = np.asarray(p["values"])
        nodes = np.linspace(0.0, self.period, v.size)
        return np.interp(np.mod(t, self.period), nodes, v)

    def exact_mean(self):
        """Closed-form mean over one period, or None for tables."""
        p = self.param_dict
        if self.kind == "constant":
            return p["c"]
        if self.kind == "sinusoid":
            return p["c0"]
        if self.kind == "raised_cos2":
            return p["c0"] + 0.5 * p["c1"]
        if self.kind == "harmonic":
            return p["cos"][0] if p["cos"] else 0.0
        return None


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a p-periodic function at ``t_k = k p / N``, k = 0..N."""

    period: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1:
            raise ConfigurationError("grid values must be one-dimensional")
        n = v.size - 1
        if n < 4 or n % 2:
            raise ConfigurationError(f"grid size N must be even and >= 4, got {n}")
        if not self.period > 0:
            raise ConfigurationError("period must be positive")
        scale = max(1.0, float(np.abs(v).max()))
        if abs(v[0] - v[-1]) > 1e-10 * scale:
            raise PeriodicityViolation(
                f"grid function endpoints differ: {v[0]!r} vs {v[-1]!r}"
            )
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def N(self):
        return self.values.size - 1

    @property
    def step(self):
        return self.period / self.N

    @property
    def nodes(self):
        return grid_nodes(self.period, self.N)

    def max(self):
        return float(self.values.max())

    def min(self):
        return float(self.values.min())

    def sup_distance(self, other):
        return float(np.abs(self.values - _values(other)).max())

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def _values(g):
    return g.values if isinstance(g, GridFunction) else np.asarray(g, dtype=float)


def grid_nodes(period, N):
    return np.linspace(0.0, period, N + 1)


def check_grid_size(N):
    if not isinstance(N, (int, np.integer)) or N < 4 or N % 2:
        raise ConfigurationError(f"grid size N must be an even integer >= 4, got {N!r}")
    return int(N)


def sample(f, N=DEFAULT_N):
    """Sample ``f`` on the closed uniform grid with N intervals."""
    N = check_grid_size(N)
    t = grid_nodes(f.period, N)
    if f.kind == "table" and len(f.param_dict["values"]) == N + 1:
        return GridFunction(f.period, np.array(f.param_dict["values"]))
    return GridFunction(f.period, f(t))


def integrate_period(g):
    """Composite Simpson approximation of the integral over one period."""
    v = g.values
    h = g.step
    return float(h / 3.0 * (v[0] + v[-1] + 4.0 * v[1:-1:2].sum() + 2.0 * v[2:-1:2].sum()))


def mean_decompose(f, N=DEFAULT_N):
    """Split f into its period mean and a zero-mean remainder on the grid."""
    g = f if isinstance(f, GridFunction) else sample(f, N)
    mean = integrate_period(g) / g.period
    return mean, GridFunction(g.period, g.values - mean)


def cumulative_simpson(v, h):
    """Running integral from 0 to each node.

    Simpson on node pairs gives the even nodes; each odd node adds the
    three-point rule h/12 (5 f0 + 8 f1 - f2) to the preceding even node.
    """
    v = np.asarray(v, dtype=float)
    out = np.empty_like(v)
    pairs = h / 3.0 * (v[:-2:2] + 4.0 * v[1:-1:2] + v[2::2])
    out[0] = 0.0
    out[2::2] = np.cumsum(pairs)
    out[1::2] = out[:-1:2] + h / 12.0 * (5.0 * v[:-2:2] + 8.0 * v[1:-1:2] - v[2::2])
    return out


def zero_mean_primitive(tilde, tol=None):
    """The zero-mean periodic solution Y of Y' = tilde.

    Only exists when tilde integrates to zero over a period; otherwise raises
    PeriodicityViolation. Default tolerance is p * max(1e-8 max|tilde|, 1e-13);
    the floor absorbs roundoff left by mean removal from a constant.
    """
    v = tilde.values
    p = tilde.period
    total = integrate_period(tilde)
    if tol is None:
        tol = p * max(1e-8 * float(np.abs(v).max()), 1e-13)
    if abs(total) > tol:
        raise PeriodicityViolation(
            f"integral over one period is {total:.3e}; y' = b(t) has no periodic solution"
        )
    t = tilde.nodes
    Y = cumulative_simpson(v, tilde.step)
    Y = Y - t * (Y[-1] / p)
    Y[-1] = Y[0]
    Y = Y - integrate_period(GridFunction(p, Y)) / p
    Y[-1] = Y[0]
    return GridFunction(p, Y)


def derivative(g):
    """Fourth-order central difference with periodic wrap."""
    v = g.values[:-1]
    d = (np.roll(v, 2) - 8.0 * np.roll(v, 1) + 8.0 * np.roll(v, -1) - np.roll(v, -2)) / (12.0 * g.step)
    return np.append(d, d[0])
