"""Run configuration stored as INI text (one section per block).

Example::

    [model]
    period = 1.0
    beta = 2.0
    sigma = 1.0
    epsilon = 0.2

    [alpha]
    kind = sinusoid
    c0 = 2.0
    c1 = 1.0

    [gamma]
    kind = raised_cos2
    c0 = 1.0
    c1 = 1.0

    [solver]
    grid = 2048

    [trajectory]
    initial_points = 1.0 0.4; 2.0 1.0
    horizon = 20

    [output]
    directory = out
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field, replace

from .cell_model import ModelParams
from .errors import CellPeriodicError
from .monotone import MonotoneConfig
from .periodic_core import DEFAULT_N, PeriodicForcing, check_grid_size


class ConfigError(CellPeriodicError, ValueError):
    """Malformed configuration; ``location`` names the section and key."""

    def __init__(self, location, message):
        super().__init__(f"[{location}] {message}")
        self.location = location


@dataclass(frozen=True)
class SolverSettings:
    grid: int = DEFAULT_N
    tol_step: float = 1e-9
    tol_unique: float = 1e-7
    max_iter: int = 10000
    m_scale: float = 1.0
    m_override: float = None

    def monotone_config(self):
        return MonotoneConfig(tol_step=self.tol_step, tol_unique=self.tol_unique,
                              max_iter=self.max_iter, M_scale=self.m_scale,
                              M_override=self.m_override)


@dataclass(frozen=True)
class TrajectorySettings:
    initial_points: tuple = ((1.0, 0.4),)
    random_points: int = 0
    random_low: float = 0.05
    random_high: float = 5.0
    seed: int = 12345
    step: float = None
    horizon: int = 20
    attraction_tol: float = 1e-4
    y_floor: float = 1e-9
    stride: int = 10


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "out"
    prefix: str = ""


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    solver: SolverSettings = field(default_factory=SolverSettings)
    trajectory: TrajectorySettings = field(default_factory=TrajectorySettings)
    output: OutputSettings = field(default_factory=OutputSettings)

    def with_overrides(self, grid=None, tol=None, seed=None, directory=None):
        solver, traj, out = self.solver, self.trajectory, self.output
        if grid is not None:
            solver = replace(solver, grid=grid)
        if tol is not None:
            solver = replace(solver, tol_unique=tol)
        if seed is not None:
            traj = replace(traj, seed=seed)
        if directory is not None:
            out = replace(out, directory=directory)
        cfg = RunConfig(self.params, solver, traj, out)
        validate(cfg)
        return cfg


def demo_config(directory="out"):
    return RunConfig(ModelParams.demo(), output=OutputSettings(directory=directory))


_FORCING_KEYS = {
    "constant": {"c"},
    "sinusoid": {"c0", "c1", "omega", "phase"},
    "raised_cos2": {"c0", "c1", "omega", "phase"},
    "harmonic": {"cos", "sin"},
    "table": {"values"},
}


def _num(section, key, raw, kind=float):
    try:
        v = kind(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{section}.{key}", f"expected {kind.__name__}, got {raw!r}") from None
    if kind is float and not math.isfinite(v):
        raise ConfigError(f"{section}.{key}", "value must be finite")
    return v


def _list(section, key, raw):
    items = [s for s in raw.replace(",", " ").split() if s]
    return tuple(_num(section, key, s) for s in items)


def _require(cp, section, key):
    if not cp.has_section(section):
        raise ConfigError(section, "missing section")
    if not cp.has_option(section, key):
        raise ConfigError(f"{section}.{key}", "missing required field")
    return cp.get(section, key)


def _forcing(cp, section, period):
    kind = _require(cp, section, "kind").strip()
    if kind not in _FORCING_KEYS:
        raise ConfigError(f"{section}.kind", f"unknown kind {kind!r}; expected one of {sorted(_FORCING_KEYS)}")
    extra = set(cp.options(section)) - _FORCING_KEYS[kind] - {"kind"}
    if extra:
        raise ConfigError(section, f"unexpected keys for {kind}: {sorted(extra)}")
    try:
        if kind == "constant":
            return PeriodicForcing.constant(_num(section, "c", _require(cp, section, "c")), period)
        if kind in ("sinusoid", "raised_cos2"):
            build = PeriodicForcing.sinusoid if kind == "sinusoid" else PeriodicForcing.raised_cos2
            omega = cp.get(section, "omega", fallback=None)
            return build(_num(section, "c0", _require(cp, section, "c0")),
                         _num(section, "c1", _require(cp, section, "c1")),
                         None if omega is None else _num(section, "omega", omega),
                         _num(section, "phase", cp.get(section, "phase", fallback="0")),
                         period)
        if kind == "harmonic":
            return PeriodicForcing.harmonic(_list(section, "cos", _require(cp, section, "cos")),
                                            _list(section, "sin", _require(cp, section, "sin")),
                                            period)
        return PeriodicForcing.table(_list(section, "values", _require(cp, section, "values")), period)
    except ConfigError:
        raise
    except CellPeriodicError as exc:
        raise ConfigError(section, str(exc)) from None


def _points(raw):
    pts = []
    for chunk in raw.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        vals = _list("trajectory", "initial_points", chunk)
        if len(vals) != 2:
            raise ConfigError("trajectory.initial_points", f"expected 'x y' pairs, got {chunk!r}")
        pts.append(vals)
    return tuple(pts)


def _opt(cp, section, key, kind, default):
    if not cp.has_section(section) or not cp.has_option(section, key):
        return default
    raw = cp.get(section, key).strip()
    if kind is None:
        return raw
    if raw.lower() in ("", "none"):
        return None
    return _num(section, key, raw, kind)


def parse_config(text):
    # ';' separates initial points, so only '#' starts an inline comment
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("file", str(exc).splitlines()[0]) from None
    known = {"model", "alpha", "gamma", "solver", "trajectory", "output"}
    unknown = set(cp.sections()) - known
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown section")

    period = _num("model", "period", _require(cp, "model", "period"))
    constants = {k: _num("model", k, _require(cp, "model", k)) for k in ("beta", "sigma", "epsilon")}
    alpha = _forcing(cp, "alpha", period)
    gamma = _forcing(cp, "gamma", period)
    try:
        params = ModelParams(alpha, gamma, period=period, **constants)
    except CellPeriodicError as exc:
        raise ConfigError("model", str(exc)) from None

    d = SolverSettings()
    solver = SolverSettings(
        grid=_opt(cp, "solver", "grid", int, d.grid),
        tol_step=_opt(cp, "solver", "tol_step", float, d.tol_step),
        tol_unique=_opt(cp, "solver", "tol_unique", float, d.tol_unique),
        max_iter=_opt(cp, "solver", "max_iter", int, d.max_iter),
        m_scale=_opt(cp, "solver", "m_scale", float, d.m_scale),
        m_override=_opt(cp, "solver", "m_override", float, d.m_override),
    )
    dt = TrajectorySettings()
    traj = TrajectorySettings(
        initial_points=(_points(cp.get("trajectory", "initial_points"))
                        if cp.has_option("trajectory", "initial_points") else dt.initial_points),
        random_points=_opt(cp, "trajectory", "random_points", int, dt.random_points),
        random_low=_opt(cp, "trajectory", "random_low", float, dt.random_low),
        random_high=_opt(cp, "trajectory", "random_high", float, dt.random_high),
        seed=_opt(cp, "trajectory", "seed", int, dt.seed),
        step=_opt(cp, "trajectory", "step", float, dt.step),
        horizon=_opt(cp, "trajectory", "horizon", int, dt.horizon),
        attraction_tol=_opt(cp, "trajectory", "attraction_tol", float, dt.attraction_tol),
        y_floor=_opt(cp, "trajectory", "y_floor", float, dt.y_floor),
        stride=_opt(cp, "trajectory", "stride", int, dt.stride),
    )
    do = OutputSettings()
    output = OutputSettings(
        directory=_opt(cp, "output", "directory", None, do.directory),
        prefix=_opt(cp, "output", "prefix", None, do.prefix),
    )
    cfg = RunConfig(params, solver, traj, output)
    validate(cfg)
    return cfg


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("file", f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)


def validate(cfg):
    s = cfg.solver
    try:
        check_grid_size(s.grid)
    except CellPeriodicError as exc:
        raise ConfigError("solver.grid", str(exc)) from None
    for key in ("tol_step", "tol_unique", "m_scale"):
        if not getattr(s, key) > 0:
            raise ConfigError(f"solver.{key}", "must be positive")
    if s.m_override is not None and not s.m_override > 0:
        raise ConfigError("solver.m_override", "must be positive")
    if s.max_iter < 1:
        raise ConfigError("solver.max_iter", "must be at least 1")
    t = cfg.trajectory
    if t.horizon < 4:
        raise ConfigError("trajectory.horizon", "must span at least 4 periods")
    if not t.attraction_tol > 0:
        raise ConfigError("trajectory.attraction_tol", "must be positive")
    if t.step is not None and not 0 < t.step <= cfg.params.period / 100:
        raise ConfigError("trajectory.step", "must lie in (0, period/100]")
    if t.random_points < 0 or not 0 < t.random_low < t.random_high:
        raise ConfigError("trajectory.random_points", "need count >= 0 and 0 < random_low < random_high")
    if t.stride < 1:
        raise ConfigError("trajectory.stride", "must be at least 1")
    for x, y in t.initial_points:
        if not y > 0:
            raise ConfigError("trajectory.initial_points", f"y must be positive in ({x}, {y})")
    try:
        cfg.params.check_positive(s.grid)
    except CellPeriodicError as exc:
        raise ConfigError("model", str(exc)) from None


def _forcing_items(f):
    p = f.param_dict
    items = [("kind", f.kind)]
    for key, val in p.items():
        if isinstance(val, tuple):
            items.append((key, ", ".join(repr(v) for v in val)))
        else:
            items.append((key, repr(val)))
    return items


def _fmt(v):
    return "none" if v is None else repr(v)


def dump_config(cfg):
    """INI text that parses back to an identical RunConfig."""
    cp = configparser.ConfigParser(interpolation=None)
    p = cfg.params
    cp["model"] = {"period": repr(p.period), "beta": repr(p.beta), "sigma": repr(p.sigma),
                   "epsilon": repr(p.epsilon)}
    cp["alpha"] = dict(_forcing_items(p.alpha))
    cp["gamma"] = dict(_forcing_items(p.gamma))
    s = cfg.solver
    cp["solver"] = {"grid": str(s.grid), "tol_step": repr(s.tol_step), "tol_unique": repr(s.tol_unique),
                    "max_iter": str(s.max_iter), "m_scale": repr(s.m_scale),
                    "m_override": _fmt(s.m_override)}
    t = cfg.trajectory
    cp["trajectory"] = {
        "initial_points": "; ".join(f"{x!r} {y!r}" for x, y in t.initial_points),
        "random_points": str(t.random_points), "random_low": repr(t.random_low),
        "random_high": repr(t.random_high), "seed": str(t.seed), "step": _fmt(t.step),
        "horizon": str(t.horizon), "attraction_tol": repr(t.attraction_tol),
        "y_floor": repr(t.y_floor), "stride": str(t.stride),
    }
    cp["output"] = {"directory": cfg.output.directory, "prefix": cfg.output.prefix}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()
