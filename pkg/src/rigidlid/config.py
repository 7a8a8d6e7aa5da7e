"""Experiment configuration: one ``[experiment]`` section of key = value pairs."""

from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass, field, fields

import numpy as np

from .approx import ApproximantKind
from .diagnostics import NORMALIZATIONS
from .integrator import SolveSpec
from .params import Params
from .spectral import Grid
from .systems import StateV

DEFAULT_GAMMAS = (0.75, 0.9, 0.93, 0.95, 0.965, 0.975, 0.9825, 0.9875, 0.99)
SCENARIOS = ("well_prepared", "ill_prepared")
SECTION = "experiment"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    x_min: float = -100.0
    x_max: float = 100.0
    n: int = 2000
    delta: float = 0.5
    epsilon: float = 0.5
    # None means alpha = rho for each gamma
    alpha: float | None = None
    gamma: float = 0.9
    gammas: tuple = DEFAULT_GAMMAS
    scenario: str = "well_prepared"
    kind: str = "rl_only"
    allow_kind_override: bool = False
    # Gaussian initial data a*exp(-(x/width)^2)
    width: float = 2.0
    zeta1_amp: float = 0.0
    zeta2_amp: float = 1.0
    us_amp: float = -1.0 / 3.0
    # None means 0 (well prepared) or 2 (ill prepared)
    m_amp: float | None = None
    t_end: float = 4.0
    n_samples: int = 9
    rel_tol: float = 1e-8
    abs_tol: float = 1e-8
    max_steps: int = 10_000_000
    normalization: str = "initial"
    error_time: str = "final"
    dealias: bool = True
    margin: float = 0.0
    workers: int = 1

    def __post_init__(self):
        g = self.gammas
        if len(g) == 0 or any(not 0.0 < x < 1.0 for x in g):
            raise ConfigError("gammas must lie in (0, 1)")
        if any(b <= a for a, b in zip(g, g[1:])):
            raise ConfigError("gammas must be strictly increasing")
        if not 0.0 < self.gamma < 1.0:
            raise ConfigError("gamma must lie in (0, 1)")
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {SCENARIOS}")
        try:
            kind = ApproximantKind(self.kind)
        except ValueError:
            names = [k.value for k in ApproximantKind]
            raise ConfigError(f"kind must be one of {names}") from None
        if kind.burgers and self.scenario != "ill_prepared" and not self.allow_kind_override:
            raise ConfigError(f"kind {self.kind} needs scenario = ill_prepared (or allow_kind_override)")
        if self.normalization not in NORMALIZATIONS:
            raise ConfigError(f"normalization must be one of {NORMALIZATIONS}")
        if self.error_time not in ("final", "sup"):
            raise ConfigError("error_time must be final or sup")
        if self.n < 4 or self.n % 2 or self.x_max <= self.x_min:
            raise ConfigError("grid needs an even n >= 4 and x_max > x_min")
        if not (self.t_end > 0 and self.rel_tol > 0 and self.abs_tol > 0):
            raise ConfigError("t_end and tolerances must be positive")
        if self.n_samples < 2 or self.workers < 1 or self.width <= 0:
            raise ConfigError("n_samples >= 2, workers >= 1 and width > 0 are required")

    @property
    def approximant_kind(self) -> ApproximantKind:
        return ApproximantKind(self.kind)

    @property
    def grid(self) -> Grid:
        return Grid(self.x_min, self.x_max, self.n)

    def params(self, gamma: float | None = None) -> Params:
        return Params(self.gamma if gamma is None else gamma, self.delta, self.epsilon, self.alpha)

    def solve_spec(self) -> SolveSpec:
        times = tuple(np.linspace(0.0, self.t_end, self.n_samples))
        return SolveSpec(
            0.0,
            self.t_end,
            rel_tol=self.rel_tol,
            abs_tol=self.abs_tol,
            sample_times=times,
            max_steps=self.max_steps,
        )

    @property
    def resolved_m_amp(self) -> float:
        if self.m_amp is not None:
            return self.m_amp
        return 2.0 if self.scenario == "ill_prepared" else 0.0

    def initial_state(self, grid: Grid | None = None) -> StateV:
        grid = grid or self.grid
        bump = np.exp(-((grid.x / self.width) ** 2))
        return StateV(
            self.zeta1_amp * bump,
            self.zeta2_amp * bump,
            self.us_amp * bump,
            self.resolved_m_amp * bump,
        )

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def header_lines(self) -> list[str]:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ", ".join(repr(x) for x in v)
            out.append(f"{f.name} = {v}")
        return out

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _parse_value(name: str, raw: str, typ):
    raw = raw.strip()
    try:
        if name in ("alpha", "m_amp"):
            return None if raw.lower() in ("", "none", "rho") else float(raw)
        if name == "gammas":
            return tuple(float(x) for x in raw.replace(",", " ").split())
        if typ in ("int", int):
            return int(raw)
        if typ in ("bool", bool):
            low = raw.lower()
            if low not in ("true", "false", "yes", "no", "1", "0"):
                raise ValueError(raw)
            return low in ("true", "yes", "1")
        if typ in ("float", float):
            v = float(raw)
            if not math.isfinite(v):
                raise ValueError(raw)
            return v
        return raw
    except ValueError:
        raise ConfigError(f"bad value for {name}: {raw!r}") from None


def from_mapping(values: dict) -> ExperimentConfig:
    known = {f.name: f.type for f in fields(ExperimentConfig)}
    unknown = sorted(set(values) - set(known))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    parsed = {
        k: _parse_value(k, v, known[k]) if isinstance(v, str) else v for k, v in values.items()
    }
    return ExperimentConfig(**parsed)


def load_config(path) -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    extra = [s for s in cp.sections() if s != SECTION]
    if extra:
        raise ConfigError(f"unknown config sections: {', '.join(extra)}")
    values = dict(cp[SECTION]) if cp.has_section(SECTION) else {}
    return from_mapping(values)
