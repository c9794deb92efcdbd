import os
import subprocess
import sys

import numpy as np
import pytest

from cellperiodic import _fallback, kernels
from cellperiodic.cell_model import ModelParams
from cellperiodic.linear_periodic import exp_weights
from cellperiodic.trajectory import integrate

compiled = pytest.mark.skipif(not kernels.compiled_available(), reason="extension not built")


@compiled
@pytest.mark.parametrize("z", [1e-6, 0.3, 5.0, 200.0])
def test_sweep_backends_agree(z):
    from cellperiodic import _kernels
    rng = np.random.default_rng(0)
    b = rng.normal(size=512)
    w = exp_weights(z)
    decay = float(np.exp(-z))
    a = _kernels.periodic_sweep(b, *w, decay)
    f = _fallback.periodic_sweep(b, *w, decay)
    assert a.shape == (513,)
    np.testing.assert_allclose(a, f, rtol=1e-13, atol=1e-13)


@compiled
def test_rk4_backends_agree():
    from cellperiodic import _kernels
    p = ModelParams.demo()
    a = integrate(p, 1.0, 0.4, horizon_periods=2, kernel=_kernels)
    f = integrate(p, 1.0, 0.4, horizon_periods=2, kernel=_fallback)
    np.testing.assert_allclose(a.states, f.states, rtol=0, atol=1e-14)


def test_rk4_floor_stops_both():
    al = np.full(400, 1.0)
    ga = np.full(400, 50.0)
    xs, ys, done = _fallback.rk4_cell(al, ga, 1.0, 1.0, 0.01, 0.1, 1.0, 0.005, 1000, 1e-9)
    assert done < 1000 and xs.size == done + 1 and ys.min() > 0
    if kernels.compiled_available():
        from cellperiodic import _kernels
        xc, yc, dc = _kernels.rk4_cell(al, ga, 1.0, 1.0, 0.01, 0.1, 1.0, 0.005, 1000, 1e-9)
        assert dc == done
        np.testing.assert_allclose(yc, ys, atol=1e-14)


def test_backend_selected():
    assert kernels.BACKEND in ("compiled", "python")
    assert (kernels.BACKEND == "compiled") == kernels.compiled_available()


def test_forced_fallback():
    env = dict(os.environ, CELLPERIODIC_PURE_PYTHON="1")
    code = ("from cellperiodic import kernels\n"
            "from cellperiodic.cell_model import ModelParams, solve_cell_model\n"
            "s = solve_cell_model(ModelParams.autonomous(2.0, 2.0, 2.0, 1.0, 0.2), N=64)\n"
            "print(kernels.BACKEND, round(float(s.solution[1].values[0]), 6))\n")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True).stdout.split()
    assert out == ["python", "0.2"]


def test_benchmark_runs(capsys):
    import importlib.util
    import pathlib
    path = pathlib.Path(__file__).parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    mod.main(["--repeat", "1"])
    out = capsys.readouterr().out
    assert "periodic_sweep" in out and "rk4" in out
