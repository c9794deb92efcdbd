"""Command-line interface.

Exit codes: 0 success, 1 attraction verdict failed, 2 existence condition
violated, 3 non-convergence, 4 singularity approached, 64 configuration error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import kernels
from .cell_model import solve_cell_model
from .config import ConfigError, demo_config, dump_config, load_config
from .errors import ConditionViolated, NonConvergence, SingularityApproached
from .periodic_core import grid_nodes, mean_decompose
from .trajectory import attraction_metrics, integrate

log = logging.getLogger("cellperiodic")

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_CONDITION = 2
EXIT_NONCONVERGENCE = 3
EXIT_SINGULAR = 4
EXIT_CONFIG = 64


def _g(v):
    return format(float(v), ".17g")


def write_csv(path, header, columns):
    cols = [np.asarray(c) for c in columns]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*cols):
            fh.write(",".join(str(v) if isinstance(v, (int, np.integer)) else _g(v) for v in row) + "\n")


def write_summary(path, items):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, val in items:
            if isinstance(val, float):
                val = _g(val)
            fh.write(f"{key} = {val}\n")


def _out(cfg, name):
    os.makedirs(cfg.output.directory, exist_ok=True)
    return os.path.join(cfg.output.directory, cfg.output.prefix + name)


def cmd_check(cfg, stream=None):
    stream = stream or sys.stdout
    N = cfg.solver.grid
    p = cfg.params
    a_mean, _ = mean_decompose(p.alpha, N)
    g_mean, _ = mean_decompose(p.gamma, N)
    D = p.beta * g_mean - p.sigma * a_mean
    ok = D > 0
    print(f"alpha_mean = {_g(a_mean)}", file=stream)
    print(f"gamma_mean = {_g(g_mean)}", file=stream)
    print(f"D = beta*gamma_mean - sigma*alpha_mean = {_g(D)}", file=stream)
    print("verdict = " + ("positive periodic solution exists" if ok
                          else "condition violated: no positive periodic solution"), file=stream)
    return EXIT_OK if ok else EXIT_CONDITION


def _write_report_files(cfg, report):
    t = grid_nodes(cfg.params.period, cfg.solver.grid)
    x, y = report.solution
    write_csv(_out(cfg, "periodic_solution.csv"), ["t", "x", "y"], [t, x.values, y.values])
    gaps = report.chain_gaps
    write_csv(_out(cfg, "iteration_history.csv"),
              ["n", "gap_ascending", "gap_descending", "gap_between"],
              [np.arange(1, gaps.shape[0] + 1), gaps[:, 0], gaps[:, 1], gaps[:, 2]])


def _write_envelope(cfg, env):
    write_csv(_out(cfg, "envelope.csv"), ["t", "sub_x", "sub_y", "super_x", "super_y"],
              [env.sub_x.nodes, env.sub_x.values, env.sub_y.values,
               env.super_x.values, env.super_y.values])


def _solve(cfg):
    return solve_cell_model(cfg.params, cfg.solver.monotone_config(), cfg.solver.grid)


def cmd_solve(cfg, stream=None, write=True):
    """Returns (exit code, CellSolution or None)."""
    stream = stream or sys.stdout
    try:
        sol = _solve(cfg)
    except ConditionViolated as exc:
        print(f"error: {exc}", file=stream)
        return EXIT_CONDITION, None
    except NonConvergence as exc:
        print(f"error: {exc}", file=stream)
        if write and exc.report is not None:
            _write_report_files(cfg, exc.report)
        return EXIT_NONCONVERGENCE, None
    if not write:
        return (EXIT_OK if sol.converged else EXIT_NONCONVERGENCE), sol
    r = sol.report
    _write_report_files(cfg, r)
    _write_envelope(cfg, sol.envelope)
    items = [
        ("period", float(cfg.params.period)),
        ("grid", cfg.solver.grid),
        ("alpha_mean", sol.alpha_mean),
        ("gamma_mean", sol.gamma_mean),
        ("D", sol.D),
        ("theta", sol.supersolution_config.theta),
        ("M_env", sol.supersolution_config.M_env),
        ("c_x", sol.subsolution.c_x),
        ("c_y", sol.subsolution.c_y),
        ("M_used", r.M_used),
        ("M_final", r.M_history[-1][1]),
        ("iterations", r.iterations),
        ("converged", r.converged),
        ("gap_between", r.gap_between),
        ("ode_residual_minimal", r.residual_minimal),
        ("ode_residual_maximal", r.residual_maximal),
        ("identity_residual_minimal", sol.identity_residual_minimal),
        ("identity_residual_maximal", sol.identity_residual_maximal),
        ("identity_residual", max(sol.identity_residual_minimal, sol.identity_residual_maximal)),
        ("unique", sol.unique),
        ("seed", cfg.trajectory.seed),
    ]
    write_summary(_out(cfg, "summary.txt"), items)
    print(f"converged = {r.converged} after {r.iterations} iterations; "
          f"min/max gap = {_g(r.gap_between)}; unique = {sol.unique}", file=stream)
    return (EXIT_OK if r.converged else EXIT_NONCONVERGENCE), sol


def initial_points(cfg):
    t = cfg.trajectory
    pts = [tuple(map(float, p)) for p in t.initial_points]
    if t.random_points:
        rng = np.random.default_rng(t.seed)
        draws = rng.uniform(t.random_low, t.random_high, size=(t.random_points, 2))
        pts.extend((float(a), float(b)) for a, b in draws)
    return pts


def _simulate_one(cfg, point, periodic):
    t = cfg.trajectory
    traj = integrate(cfg.params, point[0], point[1], t.step, t.horizon, t.y_floor)
    return traj, attraction_metrics(traj, periodic, tol=t.attraction_tol)


def cmd_simulate(cfg, stream=None, sol=None, jobs=1):
    stream = stream or sys.stdout
    if sol is None:
        code, sol = cmd_solve(cfg, stream, write=False)
        if code != EXIT_OK:
            return code
    periodic = sol.solution
    pts = initial_points(cfg)
    try:
        with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
            results = list(pool.map(lambda pt: _simulate_one(cfg, pt, periodic), pts))
    except SingularityApproached as exc:
        print(f"error: {exc}", file=stream)
        return EXIT_SINGULAR
    stride = cfg.trajectory.stride
    all_ok = True
    rows = []
    for i, (pt, (traj, rep)) in enumerate(zip(pts, results)):
        write_csv(_out(cfg, f"trajectory_{i}.csv"), ["t", "x", "y"],
                  [traj.times[::stride], traj.states[::stride, 0], traj.states[::stride, 1]])
        k = np.arange(1, rep.distances.size + 1)
        ratio = np.concatenate([[np.nan], rep.ratios])
        write_csv(_out(cfg, f"attraction_{i}.csv"), ["k", "d_k", "ratio"], [k, rep.distances, ratio])
        rows.append((i, pt[0], pt[1], rep.final, int(rep.passed)))
        all_ok &= rep.passed
        print(f"point {i} ({pt[0]!r}, {pt[1]!r}): d_{rep.distances.size} = {rep.final:.3e} "
              f"{'pass' if rep.passed else 'FAIL'}", file=stream)
    write_csv(_out(cfg, "attraction_summary.csv"), ["i", "x0", "y0", "d_final", "passed"],
              list(zip(*rows)) if rows else [[], [], [], [], []])
    return EXIT_OK if all_ok else EXIT_VERDICT


def cmd_demo(directory="out", stream=None, grid=None, tol=None, seed=None, jobs=1):
    stream = stream or sys.stdout
    cfg = demo_config(directory).with_overrides(grid, tol, seed)
    os.makedirs(cfg.output.directory, exist_ok=True)
    with open(_out(cfg, "config.ini"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_config(cfg))
    code = cmd_check(cfg, stream)
    if code != EXIT_OK:
        return code
    code, sol = cmd_solve(cfg, stream)
    if code != EXIT_OK:
        return code
    return cmd_simulate(cfg, stream, sol, jobs)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cellperiodic",
        description="Periodic solutions of the cell-volume flux model by monotone iteration.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", type=int, metavar="N", help="grid intervals (even)")
    common.add_argument("--tol", type=float, metavar="X", help="uniqueness tolerance (min/max gap)")
    common.add_argument("--seed", type=int, metavar="S", help="seed for random initial points")
    common.add_argument("--out", metavar="DIR", help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("check", "evaluate the existence condition"),
                       ("solve", "compute the periodic solution"),
                       ("simulate", "integrate trajectories and measure attraction")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("config")
        if name == "simulate":
            p.add_argument("--jobs", type=int, default=1)
    p = sub.add_parser("demo", parents=[common], help="run the built-in example end to end")
    p.add_argument("--jobs", type=int, default=1)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    log.debug("kernel backend: %s", kernels.BACKEND)
    try:
        if args.command == "demo":
            return cmd_demo(args.out or "out", grid=args.grid, tol=args.tol, seed=args.seed,
                            jobs=args.jobs)
        cfg = load_config(args.config).with_overrides(args.grid, args.tol, args.seed, args.out)
        if args.command == "check":
            return cmd_check(cfg)
        if args.command == "solve":
            return cmd_solve(cfg)[0]
        return cmd_simulate(cfg, jobs=args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
