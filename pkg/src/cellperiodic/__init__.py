"""Positive periodic solutions of the cell-volume flux system

    x' = alpha(t) - beta x / y,   y' = -gamma(t) + sigma x / y + epsilon / y

by monotone iteration between ordered sub- and supersolutions, with
checks of every hypothesis used and trajectory-based attraction metrics.
"""

from .cell_model import ModelParams, necessary_condition, solve_cell_model
from .kernels import BACKEND
from .linear_periodic import LinearPeriodicProblem, solve_linear_periodic
from .monotone import CooperativeSystem, Envelope, MonotoneConfig, run_monotone
from .periodic_core import GridFunction, PeriodicForcing, integrate_period, sample
from .trajectory import attraction_metrics, integrate

__all__ = [
    "BACKEND",
    "CooperativeSystem",
    "Envelope",
    "GridFunction",
    "LinearPeriodicProblem",
    "ModelParams",
    "MonotoneConfig",
    "PeriodicForcing",
    "attraction_metrics",
    "integrate",
    "integrate_period",
    "necessary_condition",
    "run_monotone",
    "sample",
    "solve_cell_model",
    "solve_linear_periodic",
]

__version__ = "0.1.0"
