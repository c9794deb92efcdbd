"""The solute/water volume flux system

    x' = alpha(t) - beta x / y
    y' = -gamma(t) + sigma x / y + epsilon / y

with positive periodic alpha, gamma and positive constants beta, sigma,
epsilon. A positive periodic solution exists iff

    D = beta * mean(gamma) - sigma * mean(alpha) > 0,

and any such solution satisfies D = (epsilon beta / p) int_0^p dt / y(t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConditionViolated, ConfigurationError, ConstructionError, DomainError
from .linear_periodic import LinearPeriodicProblem, solve_linear_periodic
from .monotone import (CooperativeSystem, Envelope, IterationReport, MonotoneConfig,
                       run_monotone, verify_cooperative, verify_subsolution,
                       verify_supersolution)
from .periodic_core import (DEFAULT_N, GridFunction, PeriodicForcing, integrate_period,
                            mean_decompose, sample, zero_mean_primitive)


@dataclass(frozen=True)
class ModelParams:
    alpha: PeriodicForcing
    gamma: PeriodicForcing
    beta: float
    sigma: float
    epsilon: float
    period: float = None

    def __post_init__(self):
        if self.period is None:
            object.__setattr__(self, "period", self.alpha.period)
        for name in ("beta", "sigma", "epsilon"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ConfigurationError(f"{name} must be a positive number, got {v!r}")
        for name in ("alpha", "gamma"):
            if not math.isclose(getattr(self, name).period, self.period, rel_tol=1e-12):
                raise ConfigurationError(f"{name} period differs from model period {self.period}")

    def check_positive(self, N=DEFAULT_N):
        """alpha and gamma must be strictly positive on the grid."""
        for name in ("alpha", "gamma"):
            v = sample(getattr(self, name), N).values
            if v.min() <= 0:
                k = int(np.argmin(v))
                raise ConfigurationError(
                    f"{name} must be positive; value {v[k]!r} at t={k * self.period / N!r}"
                )

    @classmethod
    def demo(cls):
        """alpha = 2 + sin 2 pi t, gamma = 1 + cos^2 2 pi t, beta=2, sigma=1, epsilon=0.2."""
        return cls(PeriodicForcing.sinusoid(2.0, 1.0, period=1.0),
                   PeriodicForcing.raised_cos2(1.0, 1.0, period=1.0),
                   beta=2.0, sigma=1.0, epsilon=0.2)

    @classmethod
    def autonomous(cls, alpha, gamma, beta, sigma, epsilon, period=1.0):
        return cls(PeriodicForcing.constant(alpha, period), PeriodicForcing.constant(gamma, period),
                   beta=beta, sigma=sigma, epsilon=epsilon)


def rhs(params, t, x, y):
    """Right-hand side (f, g); y must be positive."""
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise DomainError("the model is singular for y <= 0")
    r = x / y
    f = params.alpha(t) - params.beta * r
    g = -params.gamma(t) + params.sigma * r + params.epsilon / y
    return f, g


def partials(params, t, x, y):
    """(f_x, f_y, g_x, g_y)."""
    b, s, e = params.beta, params.sigma, params.epsilon
    y2 = y * y
    return -b / y, b * x / y2, s / y, -(s * x + e) / y2


def cooperative_system(params, N=DEFAULT_N):
    """The model as a CooperativeSystem.

    alpha and gamma are evaluated from their closed forms; on grid nodes the
    values coincide with ``sample(…, N)``.
    """
    a, c = params.alpha, params.gamma
    b, s, e = params.beta, params.sigma, params.epsilon
    return CooperativeSystem(
        f=lambda t, x, y: a(t) - b * x / y,
        g=lambda t, x, y: -c(t) + s * x / y + e / y,
        f_x=lambda t, x, y: -b / y,
        f_y=lambda t, x, y: b * x / (y * y),
        g_x=lambda t, x, y: s / y,
        g_y=lambda t, x, y: -(s * x + e) / (y * y),
        period=params.period,
    )


def necessary_condition(params, N=DEFAULT_N):
    """D = beta * mean(gamma) - sigma * mean(alpha)."""
    alpha_mean, _ = mean_decompose(params.alpha, N)
    gamma_mean, _ = mean_decompose(params.gamma, N)
    return params.beta * gamma_mean - params.sigma * alpha_mean


def identity_residual(params, solution, N=None):
    """|D - (epsilon beta / p) int_0^p dt / y| for a candidate periodic solution."""
    _, y = solution
    if y.values.min() <= 0:
        raise DomainError("volume component must be positive")
    D = necessary_condition(params, N or y.N)
    inv = GridFunction(y.period, 1.0 / y.values)
    return abs(D - params.epsilon * params.beta / y.period * integrate_period(inv))


@dataclass(frozen=True)
class Subsolution:
    c_x: float
    c_y: float
    margin_x: float
    margin_y: float


def build_subsolution(params, N=DEFAULT_N):
    """Constant pair (c_x, c_y) below every positive periodic solution.

    ratio r = alpha_min / (2 beta) keeps beta r < alpha_min with room to
    spare; then c_y = min(1, epsilon / (2 max(gamma_max - sigma r, epsilon/2)))
    makes -gamma + sigma r + epsilon / c_y strictly positive.
    """
    alpha = sample(params.alpha, N).values
    gamma = sample(params.gamma, N).values
    a_min, g_max = float(alpha.min()), float(gamma.max())
    r = a_min / (2.0 * params.beta)
    c_y = min(1.0, params.epsilon / (2.0 * max(g_max - params.sigma * r, 0.5 * params.epsilon)))
    c_x = r * c_y
    margin_x = float((alpha - params.beta * r).min())
    margin_y = float((-gamma + params.sigma * r + params.epsilon / c_y).min())
    return Subsolution(c_x, c_y, margin_x, margin_y)


@dataclass(frozen=True)
class SupersolutionConfig:
    theta: float
    M_env: float
    D: float = None

    def __post_init__(self):
        if not self.theta > 0:
            raise ConfigurationError("theta must be positive")
        if not self.M_env > 0:
            raise ConfigurationError("M_env must be positive")


@dataclass(frozen=True, eq=False)
class Supersolution:
    A: GridFunction
    B: GridFunction
    dA: np.ndarray
    dB: np.ndarray
    y0: GridFunction


def build_supersolution(params, cfg, N=DEFAULT_N):
    """A' = alpha + theta - beta A / M_env (periodic), B = M_env + y0, y0' = -(gamma - mean)."""
    alpha = sample(params.alpha, N)
    gamma_mean, gamma_tilde = mean_decompose(params.gamma, N)
    A = solve_linear_periodic(LinearPeriodicProblem(
        params.beta / cfg.M_env, GridFunction(params.period, alpha.values + cfg.theta)))
    y0 = zero_mean_primitive(GridFunction(params.period, -gamma_tilde.values))
    B = GridFunction(params.period, cfg.M_env + y0.values)
    if B.min() <= 0:
        raise ConstructionError(
            f"M_env={cfg.M_env!r} does not exceed max|y0|={np.abs(y0.values).max()!r}: B is not positive"
        )
    dA = alpha.values + cfg.theta - params.beta * A.values / cfg.M_env
    dB = -gamma_tilde.values
    return Supersolution(A, B, dA, dB, y0)


def supersolution_margins(params, cfg, sup):
    """Slack in the two supersolution inequalities at every node.

    margin_6 = theta - beta A y0 / (M (M + y0))
    margin_7 = mean(gamma) - sigma A / M - sigma A (1/(M + y0) - 1/M) - epsilon / (M + y0)

    Both must be positive.
    """
    gamma_mean, _ = mean_decompose(params.gamma, sup.A.N)
    M = cfg.M_env
    A, y0 = sup.A.values, sup.y0.values
    m6 = cfg.theta - params.beta * A * y0 / (M * (M + y0))
    m7 = (gamma_mean - params.sigma * A / M
          - params.sigma * A * (1.0 / (M + y0) - 1.0 / M) - params.epsilon / (M + y0))
    return m6, m7


def _supersolution_failure(params, cfg, sub, N):
    """Why ``cfg`` does not give a valid supersolution above ``sub``; "" if it does."""
    try:
        sup = build_supersolution(params, cfg, N)
    except ConstructionError as exc:
        return str(exc)
    m6, m7 = supersolution_margins(params, cfg, sup)
    if m6.min() <= 0:
        return f"inequality for x fails (min margin {m6.min():.3e})"
    if m7.min() <= 0:
        return f"inequality for y fails (min margin {m7.min():.3e})"
    if sup.A.min() <= sub.c_x or sup.B.min() <= sub.c_y:
        return "supersolution does not lie above the subsolution"
    return ""


def select_theta_M(params, N=DEFAULT_N, max_doublings=60, sub=None, tighten=True):
    """theta = D / (2 sigma); M_env found on a powers-of-two ladder.

    M_env starts at 10 max(1, max|y0|, c_y) and doubles until the
    supersolution inequalities, positivity of B and ordering above the
    subsolution all hold. With ``tighten`` it is then halved for as long as
    they keep holding: a tighter envelope means a smaller iteration constant
    and far fewer monotone iterations.
    """
    D = necessary_condition(params, N)
    if not D > 0:
        raise ConditionViolated(f"beta*mean(gamma) - sigma*mean(alpha) = {D:.6g} <= 0", D)
    sub = sub or build_subsolution(params, N)
    theta = D / (2.0 * params.sigma)
    _, gamma_tilde = mean_decompose(params.gamma, N)
    y0 = zero_mean_primitive(GridFunction(params.period, -gamma_tilde.values))
    y0_max = float(np.abs(y0.values).max())
    M_env = 10.0 * max(1.0, y0_max, sub.c_y)
    for _ in range(max_doublings + 1):
        failure = _supersolution_failure(params, SupersolutionConfig(theta, M_env, D), sub, N)
        if not failure:
            break
        M_env *= 2.0
    else:
        raise ConstructionError(f"no valid M_env after {max_doublings} doublings: {failure}")
    if tighten:
        for _ in range(max_doublings):
            cand = 0.5 * M_env
            if cand <= y0_max or _supersolution_failure(params, SupersolutionConfig(theta, cand, D), sub, N):
                break
            M_env = cand
    return SupersolutionConfig(theta, M_env, D)


def build_envelope(params, N=DEFAULT_N, cfg=None, sub=None):
    sub = sub or build_subsolution(params, N)
    cfg = cfg or select_theta_M(params, N, sub=sub)
    sup = build_supersolution(params, cfg, N)
    p = params.period
    zeros = np.zeros(N + 1)
    env = Envelope(
        GridFunction(p, np.full(N + 1, sub.c_x)), GridFunction(p, np.full(N + 1, sub.c_y)),
        sup.A, sup.B, zeros, zeros, sup.dA, sup.dB,
    )
    return env, sub, cfg


def enclosing_envelope(params, x0, y0, N=DEFAULT_N, max_doublings=60):
    """An envelope whose interior contains (x0, y0) at t = 0.

    The subsolution is scaled down and M_env doubled until the point is
    strictly inside; both moves preserve the sub/supersolution inequalities.
    """
    if not (x0 > 0 and y0 > 0):
        raise DomainError("initial point must be positive")
    sub = build_subsolution(params, N)
    for _ in range(max_doublings):
        if sub.c_x < x0 and sub.c_y < y0:
            break
        s = 0.5 * min(1.0, x0 / sub.c_x, y0 / sub.c_y)
        c_y = sub.c_y * s
        sub = Subsolution(sub.c_x * s, c_y, sub.margin_x,
                          float((-sample(params.gamma, N).values + params.sigma * sub.c_x / sub.c_y
                                 + params.epsilon / c_y).min()))
    cfg = select_theta_M(params, N, sub=sub)
    for _ in range(max_doublings):
        env, _, _ = build_envelope(params, N, cfg, sub)
        if env.contains(0.0, x0, y0):
            return env, sub, cfg
        cfg = SupersolutionConfig(cfg.theta, 2.0 * cfg.M_env, cfg.D)
    raise ConstructionError(f"could not enclose ({x0}, {y0}) after {max_doublings} doublings")


@dataclass
class CellSolution:
    report: IterationReport
    envelope: Envelope
    subsolution: Subsolution
    supersolution_config: SupersolutionConfig
    D: float
    alpha_mean: float
    gamma_mean: float
    identity_residual_minimal: float
    identity_residual_maximal: float
    unique: bool
    checks: list = field(default_factory=list)

    @property
    def solution(self):
        return self.report.solution

    @property
    def converged(self):
        return self.report.converged


def solve_cell_model(params, config=None, N=DEFAULT_N, on_iteration=None):
    """Condition check, envelope construction and monotone iteration.

    Raises ConditionViolated when D <= 0 (then no positive periodic solution
    exists because D must equal a positive integral).
    """
    cfg = config or MonotoneConfig()
    params.check_positive(N)
    alpha_mean, _ = mean_decompose(params.alpha, N)
    gamma_mean, _ = mean_decompose(params.gamma, N)
    D = params.beta * gamma_mean - params.sigma * alpha_mean
    if not D > 0:
        raise ConditionViolated(
            f"beta*mean(gamma) - sigma*mean(alpha) = {D:.6g} <= 0; a positive periodic "
            "solution y would force this quantity to equal (epsilon*beta/p) * int 1/y dt > 0",
            D,
        )
    env, sub, sup_cfg = build_envelope(params, N)
    system = cooperative_system(params, N)
    checks = [
        verify_cooperative(system, env, cfg.samples),
        verify_subsolution(system, env.sub_x, env.sub_y, env.sub_deriv_x, env.sub_deriv_y),
        verify_supersolution(system, env.super_x, env.super_y, env.super_deriv_x, env.super_deriv_y),
    ]
    for rep in checks:
        if not rep.passed:
            raise ConstructionError(f"{rep.name} check failed: {rep.witness}")
    report = run_monotone(system, env, cfg, on_iteration)
    res_min = identity_residual(params, (report.minimal_x, report.minimal_y))
    res_max = identity_residual(params, (report.maximal_x, report.maximal_y))
    unique = report.gap_between <= cfg.tol_unique
    return CellSolution(report, env, sub, sup_cfg, D, alpha_mean, gamma_mean,
                        res_min, res_max, unique, checks)
