"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line."""

import math
import time

import numpy as np
from cellperiodic import cli
from cellperiodic.cell_model import (ModelParams, build_envelope, cooperative_system,
                                     necessary_condition, solve_cell_model)
from cellperiodic.config import RunConfig, demo_config
from cellperiodic.linear_periodic import (LinearPeriodicProblem, scaled_small_a_limit,
                                          solve_linear_periodic)
from cellperiodic.monotone import MonotoneConfig, run_monotone, verify_subsolution
from cellperiodic.periodic_core import PeriodicForcing, mean_decompose, sample
from cellperiodic.trajectory import integrate, one_period_error, period_map_displacements

from conftest import random_params, record_criterion
from test_config_cli import read_csv, read_summary


def check(number, ok, detail):
    record_criterion(number, ok, detail)
    assert ok, detail


def test_criterion_1_demo_condition():
    t0 = time.perf_counter()
    p = ModelParams.demo()
    a_mean, _ = mean_decompose(p.alpha, 2048)
    g_mean, _ = mean_decompose(p.gamma, 2048)
    D = necessary_condition(p)
    dt = time.perf_counter() - t0
    ok = (abs(D - 1.0) <= 1e-9 and abs(a_mean - 2.0) <= 1e-9 and abs(g_mean - 1.5) <= 1e-9
          and dt < 0.1)
    check(1, ok, f"D={D!r} alpha_mean={a_mean!r} gamma_mean={g_mean!r} ({dt:.3f} s)")


def test_criterion_2_linear_oracle():
    t0 = time.perf_counter()
    b = sample(PeriodicForcing.sinusoid(0.0, 1.0, period=2 * math.pi), 2048)
    y = solve_linear_periodic(LinearPeriodicProblem(1.0, b))
    t = y.nodes
    err = float(np.abs(y.values - 0.5 * (np.sin(t) - np.cos(t))).max())
    dt = time.perf_counter() - t0
    check(2, err <= 1e-8 and dt < 0.1, f"sup error {err:.2e} ({dt:.3f} s)")


def test_criterion_3_autonomous_equilibrium():
    t0 = time.perf_counter()
    p = ModelParams.autonomous(2.0, 2.0, 2.0, 1.0, 0.2)
    sol = solve_cell_model(p)
    r = sol.report
    y_star = 0.2 * 2.0 / (2.0 * 2.0 - 1.0 * 2.0)
    err = max(float(np.abs(g.values - y_star).max())
              for g in (r.minimal_x, r.minimal_y, r.maximal_x, r.maximal_y))
    dt = time.perf_counter() - t0
    check(3, r.converged and err <= 1e-7 and dt < 5,
          f"max |component - 0.2| = {err:.2e}, {r.iterations} iterations ({dt:.2f} s)")


def test_criterion_4_demo_pipeline(tmp_path, demo_reference):
    t0 = time.perf_counter()
    code = cli.cmd_demo(str(tmp_path))
    dt = time.perf_counter() - t0
    s = read_summary(tmp_path / "summary.txt")
    _, att = read_csv(tmp_path / "attraction_0.csv")
    _, sol = read_csv(tmp_path / "periodic_solution.csv")
    gap = float(s["gap_between"])
    ident = float(s["identity_residual"])
    d = att[:, 1]
    ratios = att[-3:, 2]
    # frozen waveform from an independent high-accuracy IVP run
    idx = np.round(np.array(demo_reference["t"]) * 2048).astype(int)
    wave = max(np.abs(sol[idx, 1] - demo_reference["x"]).max(),
               np.abs(sol[idx, 2] - demo_reference["y"]).max())
    ok = (code == 0 and s["converged"] == "True" and gap <= 1e-7 and ident <= 1e-6
          and d.size == 20 and d[-1] <= 1e-4 and np.all(ratios < 1) and wave <= 1e-7 and dt < 60)
    check(4, ok, f"exit {code}, gap {gap:.1e}, identity {ident:.1e}, d_20 {d[-1]:.1e}, "
                 f"ratios {np.round(ratios, 3).tolist()}, waveform {wave:.1e} ({dt:.1f} s)")


def test_criterion_5_chain_ordering():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst_order = 0.0
    sub_fail = 0
    checked = 0
    for _ in range(50):
        p = random_params(rng)
        sys = cooperative_system(p)
        env = {}

        def hook(s):
            nonlocal worst_order, sub_fail, checked
            e = env["env"]
            lx, ly = (g.values for g in s.lower)
            ux, uy = (g.values for g in s.upper)
            plx, ply = s.previous_lower
            pux, puy = s.previous_upper
            v = max(float((e.sub_x.values - lx).max()), float((e.sub_y.values - ly).max()),
                    float((plx - lx).max()), float((ply - ly).max()),
                    float((lx - ux).max()), float((ly - uy).max()),
                    float((ux - pux).max()), float((uy - puy).max()),
                    float((ux - e.super_x.values).max()), float((uy - e.super_y.values).max()))
            worst_order = max(worst_order, v)
            rep = verify_subsolution(sys, s.lower[0], s.lower[1], *s.lower_deriv)
            sub_fail += not rep.passed
            checked += 1

        env["env"], _, _ = build_envelope(p)
        rep = run_monotone(sys, env["env"], MonotoneConfig(), on_iteration=hook)
        assert rep.converged
    dt = time.perf_counter() - t0
    check(5, worst_order <= 1e-9 and sub_fail == 0 and dt < 300,
          f"50 draws, {checked} iterations, worst ordering excess {worst_order:.1e}, "
          f"subsolution failures {sub_fail} ({dt:.0f} s)")


def test_criterion_6_small_a_trend():
    t0 = time.perf_counter()
    vals = scaled_small_a_limit(PeriodicForcing.sinusoid(2.0, 1.0), [1.0, 0.1, 0.01, 0.001])
    dt = time.perf_counter() - t0
    ok = all(b < a for a, b in zip(vals, vals[1:])) and vals[-1] < 1e-2 and dt < 1
    check(6, ok, f"sup|a y_a - 2| = {[f'{v:.2e}' for v in vals]} ({dt:.3f} s)")


def test_criterion_7_necessity(tmp_path):
    base = ModelParams.demo()
    p = ModelParams(base.alpha, base.gamma, beta=2.0, sigma=2.0, epsilon=0.2)
    D = necessary_condition(p)
    cfg = RunConfig(p, output=demo_config(str(tmp_path)).output)
    code, _ = cli.cmd_solve(cfg)
    traj = integrate(p, 1.0, 0.4, horizon_periods=50)
    disp = period_map_displacements(traj, 1.0)
    # (sigma/beta) dx + dy over a period is at least |D| p / beta
    bound = abs(D) / p.beta / math.hypot(1.0, p.sigma / p.beta)
    ok = D < 0 and code == cli.EXIT_CONDITION and disp.size == 50 and disp.min() >= bound * (1 - 1e-9)
    check(7, ok, f"D={D:.3g}, exit {code}, min period-map displacement {disp.min():.3f} "
                 f">= {bound:.3f} over 50 periods")


def test_criterion_8_integrator_order():
    t0 = time.perf_counter()
    p = ModelParams.demo()
    e100 = one_period_error(p, 1.0, 0.4, 100)
    e200 = one_period_error(p, 1.0, 0.4, 200)
    e_default = one_period_error(p, 1.0, 0.4, 2000)
    dt = time.perf_counter() - t0
    ratio = e100 / e200
    check(8, ratio >= 12 and e_default <= 1e-8 and dt < 10,
          f"errors {e100:.2e} -> {e200:.2e}, ratio {ratio:.1f}; default step {e_default:.1e} ({dt:.2f} s)")


def test_criterion_9_M_invariance():
    t0 = time.perf_counter()
    p = ModelParams.demo()
    a = solve_cell_model(p, MonotoneConfig(M_scale=1.0))
    b = solve_cell_model(p, MonotoneConfig(M_scale=2.0))
    (ax, ay), (bx, by) = a.solution, b.solution
    diff = max(ax.sup_distance(bx), ay.sup_distance(by))
    tol = 2 * MonotoneConfig().tol_unique
    dt = time.perf_counter() - t0
    ok = a.converged and b.converged and diff <= tol and dt < 120
    check(9, ok, f"M {a.report.M_used:.4g} vs {b.report.M_used:.4g}: sup difference {diff:.1e} "
                 f"<= {tol:.0e} ({a.report.iterations}/{b.report.iterations} iterations, {dt:.1f} s)")
