"""Monotone iteration for periodic solutions of cooperative planar systems.

Given an ordered subsolution pair (a, b) <= supersolution pair (A, B) of

    x' = f(t, x, y),   y' = g(t, x, y)

with f_y >= 0 and g_x >= 0 in between, each step solves the linear periodic
problems

    x_n' + M x_n = M x_n-1 + f(t, x_n-1, y_n-1)
    y_n' + M y_n = M y_n-1 + g(t, x_n-1, y_n-1)

once from below and once from above. With M large enough that M x + f and
M y + g are nondecreasing in x and y, the two sequences are monotone and
squeeze the minimal and maximal periodic solutions.

Every iterate pair is itself an ordered sub/supersolution envelope, so M is
re-chosen on the current (shrinking) box every ``refresh_every`` steps. An
envelope-wide M is typically orders of magnitude larger than the one needed
near the solution and would slow convergence by the same factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigurationError, DomainError, EnvelopeError, MonotonicityBreach, NonConvergence
from .linear_periodic import PeriodicSolver
from .periodic_core import GridFunction, derivative, grid_nodes


@dataclass(frozen=True)
class CooperativeSystem:
    """Right-hand sides and their partial derivatives, vectorised in (t, x, y)."""

    f: Callable
    g: Callable
    f_x: Callable
    f_y: Callable
    g_x: Callable
    g_y: Callable
    period: float

    def check_periodicity(self, x_range, y_range, n=16, seed=0, tol=1e-10):
        """Largest |f(t+p) - f(t)|, |g(t+p) - g(t)| at random points; raises if > tol."""
        rng = np.random.default_rng(seed)
        t = rng.uniform(0.0, self.period, n)
        x = rng.uniform(*x_range, n)
        y = rng.uniform(*y_range, n)
        worst = 0.0
        for fn in (self.f, self.g):
            a = np.asarray(fn(t, x, y))
            b = np.asarray(fn(t + self.period, x, y))
            worst = max(worst, float((np.abs(a - b) / (1.0 + np.abs(a))).max()))
        if worst > tol:
            raise DomainError(f"right-hand side is not {self.period}-periodic (deviation {worst:.2e})")
        return worst

    def check_derivatives(self, x_range, y_range, n=100, seed=0, tol=1e-5):
        """Compare analytic partials with central differences; raises if off."""
        rng = np.random.default_rng(seed)
        t = rng.uniform(0.0, self.period, n)
        x = rng.uniform(*x_range, n)
        y = rng.uniform(*y_range, n)
        hx = 1e-6 * (1.0 + np.abs(x))
        hy = 1e-6 * (1.0 + np.abs(y))
        worst = 0.0
        pairs = (
            (self.f_x, (self.f(t, x + hx, y) - self.f(t, x - hx, y)) / (2 * hx)),
            (self.f_y, (self.f(t, x, y + hy) - self.f(t, x, y - hy)) / (2 * hy)),
            (self.g_x, (self.g(t, x + hx, y) - self.g(t, x - hx, y)) / (2 * hx)),
            (self.g_y, (self.g(t, x, y + hy) - self.g(t, x, y - hy)) / (2 * hy)),
        )
        for analytic, fd in pairs:
            a = np.broadcast_to(np.asarray(analytic(t, x, y), dtype=float), fd.shape)
            worst = max(worst, float((np.abs(a - fd) / np.maximum(1.0, np.abs(a))).max()))
        if worst > tol:
            raise DomainError(f"partial derivatives disagree with finite differences ({worst:.2e})")
        return worst


@dataclass(frozen=True, eq=False)
class Envelope:
    """Ordered sub- and supersolution pairs with their exact derivatives."""

    sub_x: GridFunction
    sub_y: GridFunction
    super_x: GridFunction
    super_y: GridFunction
    sub_deriv_x: np.ndarray
    sub_deriv_y: np.ndarray
    super_deriv_x: np.ndarray
    super_deriv_y: np.ndarray

    def __post_init__(self):
        grids = {g.N for g in (self.sub_x, self.sub_y, self.super_x, self.super_y)}
        if len(grids) != 1:
            raise EnvelopeError("envelope components live on different grids")
        for lo, hi, name in ((self.sub_x, self.super_x, "x"), (self.sub_y, self.super_y, "y")):
            bad = np.flatnonzero(lo.values >= hi.values)
            if bad.size:
                k = int(bad[0])
                raise EnvelopeError(
                    f"envelope not strictly ordered in {name} at node {k}: "
                    f"sub={lo.values[k]!r}, super={hi.values[k]!r}"
                )

    @property
    def period(self):
        return self.sub_x.period

    @property
    def N(self):
        return self.sub_x.N

    def contains(self, t, x, y):
        """True if (x, y) lies strictly inside the envelope at time t."""
        nodes = self.sub_x.nodes
        tt = float(np.mod(t, self.period))
        lo_x, hi_x, lo_y, hi_y = (np.interp(tt, nodes, g.values)
                                  for g in (self.sub_x, self.super_x, self.sub_y, self.super_y))
        return bool(lo_x < x < hi_x and lo_y < y < hi_y)


@dataclass
class CheckReport:
    """Outcome of a pointwise check; ``witness`` locates the worst point."""

    name: str
    passed: bool
    worst: float
    witness: dict = None

    def __bool__(self):
        return self.passed


def _lattice(t, lo_x, hi_x, lo_y, hi_y, samples):
    s = np.linspace(0.0, 1.0, samples)[:, None]
    X = (lo_x + s * (hi_x - lo_x))[:, None, :]
    Y = (lo_y + s * (hi_y - lo_y))[None, :, :]
    T = t[None, None, :]
    return T, X, Y


def _eval(fn, T, X, Y):
    return np.broadcast_to(np.asarray(fn(T, X, Y), dtype=float), np.broadcast_shapes(T.shape, X.shape, Y.shape))


def _box(env):
    return (env.sub_x.values[:-1], env.super_x.values[:-1],
            env.sub_y.values[:-1], env.super_y.values[:-1])


def verify_cooperative(sys, env, samples=33, tol=1e-12):
    """f_y >= 0 and g_x >= 0 on a samples x samples x grid lattice inside the box."""
    t = env.sub_x.nodes[:-1]
    T, X, Y = _lattice(t, *_box(env), samples)
    worst = math.inf
    witness = None
    for name, fn in (("f_y", sys.f_y), ("g_x", sys.g_x)):
        vals = _eval(fn, T, X, Y)
        idx = np.unravel_index(int(np.argmin(vals)), vals.shape)
        v = float(vals[idx])
        if v < worst:
            worst = v
            i, j, k = idx
            witness = {"partial": name, "t": float(t[k]),
                       "x": float(X[i, 0, k]), "y": float(Y[0, j, k]), "value": v}
    return CheckReport("cooperative", worst >= -tol, worst, witness)


def _pair_check(name, sign, sys, x, y, dx, dy, slack):
    xv = x.values if isinstance(x, GridFunction) else np.asarray(x, dtype=float)
    yv = y.values if isinstance(y, GridFunction) else np.asarray(y, dtype=float)
    period = x.period if isinstance(x, GridFunction) else sys.period
    t = grid_nodes(period, xv.size - 1)
    dx = np.broadcast_to(np.asarray(dx, dtype=float), xv.shape)
    dy = np.broadcast_to(np.asarray(dy, dtype=float), yv.shape)
    fv = np.broadcast_to(np.asarray(sys.f(t, xv, yv), dtype=float), xv.shape)
    gv = np.broadcast_to(np.asarray(sys.g(t, xv, yv), dtype=float), yv.shape)
    # margin >= 0 means the inequality holds
    mx = sign * (fv - dx)
    my = sign * (gv - dy)
    if slack is None:
        scale = 1.0 + max(np.abs(dx).max(), np.abs(dy).max(), np.abs(fv).max(), np.abs(gv).max())
        slack = 1e-10 * scale
    kx, ky = int(np.argmin(mx)), int(np.argmin(my))
    if mx[kx] <= my[ky]:
        worst, witness = float(mx[kx]), {"component": "x", "node": kx, "t": float(t[kx])}
    else:
        worst, witness = float(my[ky]), {"component": "y", "node": ky, "t": float(t[ky])}
    witness["margin_x"] = float(mx.min())
    witness["margin_y"] = float(my.min())
    return CheckReport(name, worst >= -slack, worst, witness)


def verify_subsolution(sys, x, y, dx, dy, slack=None):
    """x' <= f(t, x, y) and y' <= g(t, x, y) at every node, up to ``slack``."""
    return _pair_check("subsolution", 1.0, sys, x, y, dx, dy, slack)


def verify_supersolution(sys, x, y, dx, dy, slack=None):
    """x' >= f(t, x, y) and y' >= g(t, x, y) at every node, up to ``slack``."""
    return _pair_check("supersolution", -1.0, sys, x, y, dx, dy, slack)


def _box_M(sys, t, lo_x, hi_x, lo_y, hi_y, samples):
    T, X, Y = _lattice(t, lo_x, hi_x, lo_y, hi_y, samples)
    with np.errstate(divide="ignore", invalid="ignore"):
        nfx = -_eval(sys.f_x, T, X, Y)
        ngy = -_eval(sys.g_y, T, X, Y)
    if not (np.isfinite(nfx).all() and np.isfinite(ngy).all()):
        raise DomainError("partial derivatives are not finite inside the envelope box")
    return 1.05 * max(0.0, float(nfx.max()), float(ngy.max())) + 0.01


def choose_M(sys, env, samples=33):
    """Constant making M x + f and M y + g nondecreasing on the sampled box."""
    return _box_M(sys, env.sub_x.nodes[:-1], *_box(env), samples)


def iterate_once(sys, M, current):
    """One step of the monotone map from ``current`` = (x, y)."""
    x, y = current
    t = x.nodes
    solver = PeriodicSolver(M, x.period, x.N)
    fx = sys.f(t, x.values, y.values)
    gy = sys.g(t, x.values, y.values)
    return (GridFunction(x.period, solver(M * x.values + fx)),
            GridFunction(x.period, solver(M * y.values + gy)))


@dataclass
class MonotoneConfig:
    """Stopping rule and M policy.

    ``M_override`` fixes M for the whole run. Otherwise M is chosen on the
    envelope box and re-chosen on the current iterate box every
    ``refresh_every`` steps (``adaptive``), always scaled by ``M_scale``.
    """

    tol_step: float = 1e-9
    tol_unique: float = 1e-7
    max_iter: int = 10000
    M_override: float = None
    M_scale: float = 1.0
    samples: int = 33
    adaptive: bool = True
    refresh_samples: int = 9
    refresh_every: int = 10
    order_tol: float = 1e-9
    residual_tol: float = 1e-6

    def __post_init__(self):
        if self.max_iter < 1:
            raise ConfigurationError("max_iter must be at least 1")
        for name in ("tol_step", "tol_unique", "M_scale", "order_tol"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive")
        if self.M_override is not None and not self.M_override > 0:
            raise ConfigurationError("M_override must be positive")


@dataclass
class IterationState:
    """Snapshot handed to the ``on_iteration`` callback after step n."""

    n: int
    M: float
    lower: tuple
    upper: tuple
    lower_deriv: tuple
    upper_deriv: tuple
    previous_lower: tuple
    previous_upper: tuple


@dataclass
class IterationReport:
    minimal_x: GridFunction
    minimal_y: GridFunction
    maximal_x: GridFunction
    maximal_y: GridFunction
    iterations: int
    chain_gaps: np.ndarray
    M_used: float
    converged: bool
    M_history: list = field(default_factory=list)
    residual_minimal: float = math.nan
    residual_maximal: float = math.nan
    residual_scale: float = math.nan

    @property
    def gap_between(self):
        return max(self.minimal_x.sup_distance(self.maximal_x),
                   self.minimal_y.sup_distance(self.maximal_y))

    @property
    def solution(self):
        """Midpoint of the minimal and maximal solutions."""
        p = self.minimal_x.period
        return (GridFunction(p, 0.5 * (self.minimal_x.values + self.maximal_x.values)),
                GridFunction(p, 0.5 * (self.minimal_y.values + self.maximal_y.values)))


def ode_residual(sys, x, y):
    """sup-norm of (x' - f, y' - g) with x', y' by periodic finite differences."""
    t = x.nodes
    rx = derivative(x) - sys.f(t, x.values, y.values)
    ry = derivative(y) - sys.g(t, x.values, y.values)
    return float(max(np.abs(rx).max(), np.abs(ry).max()))


def _check_envelope(sys, env, samples):
    checks = (
        verify_cooperative(sys, env, samples),
        verify_subsolution(sys, env.sub_x, env.sub_y, env.sub_deriv_x, env.sub_deriv_y),
        verify_supersolution(sys, env.super_x, env.super_y, env.super_deriv_x, env.super_deriv_y),
    )
    for rep in checks:
        if not rep.passed:
            raise EnvelopeError(f"{rep.name} check failed: worst {rep.worst:.3e} at {rep.witness}")
    return checks


def run_monotone(sys, env, config=None, on_iteration=None):
    """Run both monotone sequences to the minimal and maximal periodic solutions.

    Raises EnvelopeError if the envelope fails its hypotheses,
    MonotonicityBreach if an iterate leaves the chain by more than
    ``order_tol`` and NonConvergence (carrying the partial report) when
    ``max_iter`` is exhausted.
    """
    cfg = config or MonotoneConfig()
    _check_envelope(sys, env, cfg.samples)
    p, N = env.period, env.N
    t = env.sub_x.nodes
    lx, ly = env.sub_x.values.copy(), env.sub_y.values.copy()
    ux, uy = env.super_x.values.copy(), env.super_y.values.copy()

    if cfg.M_override is not None:
        M = float(cfg.M_override)
    else:
        M = cfg.M_scale * choose_M(sys, env, cfg.samples)
    M_used = M
    history = [(0, M)]
    solver = PeriodicSolver(M, p, N)
    gaps = []
    converged = False
    n = 0
    tol = cfg.order_tol

    for n in range(1, cfg.max_iter + 1):
        fl, gl = sys.f(t, lx, ly), sys.g(t, lx, ly)
        fu, gu = sys.f(t, ux, uy), sys.g(t, ux, uy)
        nlx, nly = solver(M * lx + fl), solver(M * ly + gl)
        nux, nuy = solver(M * ux + fu), solver(M * uy + gu)

        violation = max(
            float((lx - nlx).max()), float((ly - nly).max()),
            float((nux - ux).max()), float((nuy - uy).max()),
            float((nlx - nux).max()), float((nly - nuy).max()),
        )
        if violation > tol:
            raise MonotonicityBreach(
                f"iteration {n}: chain ordering violated by {violation:.3e} (M={M:.6g})",
                iteration=n, violation=violation,
            )
        # roundoff-level violations are clamped back onto the chain
        nlx, nly = np.maximum(nlx, lx), np.maximum(nly, ly)
        nux, nuy = np.minimum(nux, ux), np.minimum(nuy, uy)
        nlx, nly = np.minimum(nlx, nux), np.minimum(nly, nuy)

        step_lo = max(float(np.abs(nlx - lx).max()), float(np.abs(nly - ly).max()))
        step_hi = max(float(np.abs(nux - ux).max()), float(np.abs(nuy - uy).max()))
        between = max(float((nux - nlx).max()), float((nuy - nly).max()))
        gaps.append((step_lo, step_hi, between))

        if on_iteration is not None:
            on_iteration(IterationState(
                n, M,
                (GridFunction(p, nlx), GridFunction(p, nly)),
                (GridFunction(p, nux), GridFunction(p, nuy)),
                (M * (lx - nlx) + fl, M * (ly - nly) + gl),
                (M * (ux - nux) + fu, M * (uy - nuy) + gu),
                (lx, ly), (ux, uy),
            ))
        lx, ly, ux, uy = nlx, nly, nux, nuy

        if step_lo <= cfg.tol_step and step_hi <= cfg.tol_step:
            converged = between <= cfg.tol_unique
            break

        if cfg.M_override is None and cfg.adaptive and n % cfg.refresh_every == 0:
            M_new = cfg.M_scale * _box_M(sys, t[:-1], lx[:-1], ux[:-1], ly[:-1], uy[:-1],
                                         cfg.refresh_samples)
            if M_new < M:
                M = M_new
                solver = PeriodicSolver(M, p, N)
                history.append((n, M))

    report = IterationReport(
        GridFunction(p, lx), GridFunction(p, ly), GridFunction(p, ux), GridFunction(p, uy),
        n, np.array(gaps).reshape(-1, 3), M_used, converged, history,
    )
    if not (step_lo <= cfg.tol_step and step_hi <= cfg.tol_step):
        raise NonConvergence(f"no convergence after {cfg.max_iter} iterations", report)

    box_scale = 1.0 + max(
        float(np.abs(fn(t, v1, v2)).max())
        for fn in (sys.f, sys.g)
        for v1, v2 in ((env.sub_x.values, env.sub_y.values), (env.super_x.values, env.super_y.values))
    )
    report.residual_minimal = ode_residual(sys, report.minimal_x, report.minimal_y)
    report.residual_maximal = ode_residual(sys, report.maximal_x, report.maximal_y)
    report.residual_scale = box_scale
    if max(report.residual_minimal, report.residual_maximal) > cfg.residual_tol * box_scale:
        report.converged = False
    return report
