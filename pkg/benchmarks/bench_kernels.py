"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--full]

``--full`` also times a complete demo solve per backend by monkeypatching
the dispatch module.
"""

import argparse
import timeit

import numpy as np

from cellperiodic import _fallback, kernels
from cellperiodic.cell_model import ModelParams, solve_cell_model
from cellperiodic.linear_periodic import exp_weights


def best(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def sweep_case(impl, N=2048, z=1120.0 / 2048):
    b = np.random.default_rng(0).normal(size=N)
    w = exp_weights(z)
    decay = float(np.exp(-z))
    return lambda: impl.periodic_sweep(b, *w, decay)


def rk4_case(impl, m=2000, periods=20):
    p = ModelParams.demo()
    h = 1.0 / m
    half = np.arange(2 * m) * (0.5 * h)
    al, ga = p.alpha(half), p.gamma(half)
    return lambda: impl.rk4_cell(al, ga, 2.0, 1.0, 0.2, 1.0, 0.4, h, m * periods, 1e-9)


def solve_case(impl):
    def run():
        saved = kernels.periodic_sweep, kernels.rk4_cell
        kernels.periodic_sweep, kernels.rk4_cell = impl.periodic_sweep, impl.rk4_cell
        try:
            solve_cell_model(ModelParams.demo())
        finally:
            kernels.periodic_sweep, kernels.rk4_cell = saved
    return run


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--full", action="store_true")
    args = ap.parse_args(argv)

    backends = [("python", _fallback)]
    if kernels.compiled_available():
        from cellperiodic import _kernels
        backends.insert(0, ("compiled", _kernels))
    else:
        print("compiled extension not built; timing the fallback only")

    cases = [("periodic_sweep N=2048", sweep_case, 200),
             ("rk4 40000 steps", rk4_case, 1)]
    if args.full:
        cases.append(("demo solve N=2048", solve_case, 1))

    print(f"{'kernel':<24}" + "".join(f"{name:>14}" for name, _ in backends) + f"{'speedup':>10}")
    for label, make, number in cases:
        times = [best(make(impl), args.repeat, number) for _, impl in backends]
        row = f"{label:<24}" + "".join(f"{t * 1e3:>11.3f} ms" for t in times)
        if len(times) == 2:
            row += f"{times[1] / times[0]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
