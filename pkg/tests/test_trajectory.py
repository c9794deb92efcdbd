import numpy as np
import pytest

from cellperiodic.cell_model import ModelParams
from cellperiodic.errors import ConfigurationError, DomainError, SingularityApproached
from cellperiodic.periodic_core import PeriodicForcing
from cellperiodic.trajectory import (attraction_metrics, integrate, one_period_error,
                                     period_map_displacements, periodic_interpolant)


def test_reference_orbit_matches_solver(demo_solution, demo_reference):
    x, y = demo_solution.solution
    t = np.array(demo_reference["t"])
    assert demo_reference["period_closure"] < 1e-12
    assert np.abs(periodic_interpolant(x)(t) - demo_reference["x"]).max() < 1e-8
    assert np.abs(periodic_interpolant(y)(t) - demo_reference["y"]).max() < 1e-8


def test_transient_matches_reference(demo_params, demo_reference):
    traj = integrate(demo_params, 1.0, 0.4, horizon_periods=5)
    idx = np.arange(6) * 2000
    np.testing.assert_allclose(traj.times[idx], demo_reference["transient_t"], atol=1e-12)
    np.testing.assert_allclose(traj.states[idx, 0], demo_reference["transient_x"], atol=1e-10)
    np.testing.assert_allclose(traj.states[idx, 1], demo_reference["transient_y"], atol=1e-10)


def test_on_orbit_stays(demo_params, demo_solution):
    x, y = demo_solution.solution
    traj = integrate(demo_params, x.values[0], y.values[0], horizon_periods=10)
    rep = attraction_metrics(traj, (x, y))
    assert rep.distances.max() <= 1e-6
    assert rep.passed
    assert np.abs(traj.final - traj.states[0]).max() < 1e-6


def test_equilibrium_constant():
    p = ModelParams.autonomous(2.0, 2.0, 2.0, 1.0, 0.2)
    traj = integrate(p, 0.2, 0.2, horizon_periods=5)
    np.testing.assert_allclose(traj.states, 0.2, atol=1e-14)


def test_demo_distances_regression(demo_params, demo_solution, demo_reference):
    traj = integrate(demo_params, 1.0, 0.4)
    rep = attraction_metrics(traj, demo_solution.solution)
    assert rep.distances.size == 20
    np.testing.assert_allclose(rep.distances[:10], demo_reference["distances"], atol=2e-8)
    assert rep.passed
    assert rep.final <= 1e-4
    assert np.all(rep.ratios[-3:] < 1)


def test_random_points_attracted(demo_params, demo_solution):
    # starts with y0 near 5 spend ~8 periods draining volume, hence 40 periods
    rng = np.random.default_rng(2024)
    for x0, y0 in rng.uniform(0.05, 5.0, size=(12, 2)):
        traj = integrate(demo_params, x0, y0, horizon_periods=40)
        assert traj.states[:, 1].min() > 0
        rep = attraction_metrics(traj, demo_solution.solution)
        assert rep.passed, (x0, y0, rep.distances)


def test_attraction_fails_when_not_converged(demo_params, demo_solution):
    traj = integrate(demo_params, 4.0, 0.1, horizon_periods=4)
    rep = attraction_metrics(traj, demo_solution.solution)
    assert not rep.passed


def test_noise_floor_counts_as_settled(demo_params, demo_solution):
    traj = integrate(demo_params, 0.05, 5.0, horizon_periods=40)
    rep = attraction_metrics(traj, demo_solution.solution)
    assert rep.final < 1e-7
    assert not np.all(rep.ratios[-3:] < 1)
    assert rep.passed
    assert not attraction_metrics(traj, demo_solution.solution, floor=0.0).passed


def test_metrics_need_four_periods(demo_params, demo_solution):
    traj = integrate(demo_params, 1.0, 0.4, horizon_periods=3)
    with pytest.raises(ConfigurationError):
        attraction_metrics(traj, demo_solution.solution)


def test_singularity_detected():
    # gamma drains volume faster than any influx can refill it
    p = ModelParams.autonomous(1.0, 50.0, 1.0, 1.0, 0.01)
    with pytest.raises(SingularityApproached) as info:
        integrate(p, 0.1, 1.0, horizon_periods=5)
    assert 0 < info.value.time < 5
    assert info.value.state[1] > 0


def test_step_limits(demo_params):
    with pytest.raises(ConfigurationError):
        integrate(demo_params, 1.0, 0.4, step=0.02)
    with pytest.raises(DomainError):
        integrate(demo_params, 1.0, -0.4)
    traj = integrate(demo_params, 1.0, 0.4, step=0.003, horizon_periods=1)
    # snapped down to 1/334
    assert traj.step == pytest.approx(1 / 334)
    assert traj.times[-1] == pytest.approx(1.0, abs=1e-14)


def test_fourth_order(demo_params):
    errs = [one_period_error(demo_params, 1.0, 0.4, m) for m in (100, 200, 400)]
    assert errs[0] / errs[1] >= 12 and errs[1] / errs[2] >= 12
    assert one_period_error(demo_params, 1.0, 0.4, 2000) <= 1e-8


def test_period_map_contracts(demo_params):
    traj = integrate(demo_params, 1.0, 0.4, horizon_periods=10)
    disp = period_map_displacements(traj, 1.0)
    assert disp.size == 10
    assert np.all(np.diff(disp[2:]) < 0)


def test_table_forcing_matches_closed_form():
    t = np.linspace(0, 1, 4001)
    tab = ModelParams(PeriodicForcing.table(2 + np.sin(2 * np.pi * t)),
                      PeriodicForcing.table(1 + np.cos(2 * np.pi * t) ** 2), 2.0, 1.0, 0.2)
    a = integrate(tab, 1.0, 0.4, horizon_periods=4)
    b = integrate(ModelParams.demo(), 1.0, 0.4, horizon_periods=4)
    assert np.abs(a.final - b.final).max() < 1e-12
