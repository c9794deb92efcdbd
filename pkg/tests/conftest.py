import json
import pathlib

import numpy as np
import pytest

from cellperiodic.cell_model import ModelParams, solve_cell_model
from cellperiodic.periodic_core import PeriodicForcing

DATA = pathlib.Path(__file__).parent / "data"

ACCEPTANCE_LINES = []


def record_criterion(number, passed, detail):
    ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def demo_params():
    return ModelParams.demo()


@pytest.fixture(scope="session")
def autonomous_params():
    return ModelParams.autonomous(2.0, 2.0, 2.0, 1.0, 0.2)


@pytest.fixture(scope="session")
def demo_solution(demo_params):
    return solve_cell_model(demo_params)


@pytest.fixture(scope="session")
def demo_reference():
    return json.loads((DATA / "demo_reference.json").read_text())


def random_params(rng, period=1.0):
    """A positive parameter set with D > 0 and a comfortable margin."""
    while True:
        a0 = rng.uniform(0.5, 3.0)
        a1 = rng.uniform(0.0, 0.9) * a0
        c0 = rng.uniform(0.5, 3.0)
        c1 = rng.uniform(0.0, 2.0)
        beta = rng.uniform(0.5, 3.0)
        sigma = rng.uniform(0.2, 2.0)
        eps = rng.uniform(0.05, 1.0)
        g_mean = c0 + 0.5 * c1
        if beta * g_mean - sigma * a0 > 0.2 * beta * g_mean:
            return ModelParams(
                PeriodicForcing.sinusoid(a0, a1, phase=rng.uniform(0, 2 * np.pi), period=period),
                PeriodicForcing.raised_cos2(c0, c1, phase=rng.uniform(0, 2 * np.pi), period=period),
                beta, sigma, eps,
            )
