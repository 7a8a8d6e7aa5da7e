"""Single runs, gamma sweeps and artifact emission."""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .approx import ApproximantKind, Approximant, assemble
from .config import ConfigError, ExperimentConfig
from .diagnostics import (
    VARIABLES,
    ConservationReport,
    ErrorTable,
    RateFit,
    compare,
    conservation_report,
    fit_rate,
)
from .integrator import COMPLETED, Trajectory, integrate
from .params import validate
from .systems import StateU, StateV, check_hyperbolicity_fs, fs_rhs_array, u_to_v, v_to_u

log = logging.getLogger(__name__)


class NumericalFailure(RuntimeError):
    pass


@dataclass
class SimulationResult:
    gamma: float
    rho: float
    status: str
    initial: StateV
    times: np.ndarray
    exact: list = field(default_factory=list)  # StateV per sample
    approx: dict = field(default_factory=dict)  # kind -> list of StateV per sample
    errors: dict = field(default_factory=dict)  # kind -> 4-tuple
    conservation: ConservationReport | None = None
    t_fail: float | None = None
    message: str = ""

    @property
    def completed(self) -> bool:
        return self.status == COMPLETED


def _integrate_fs(cfg: ExperimentConfig, U0: StateU, p, grid) -> Trajectory:
    def monitor(t, y):
        return check_hyperbolicity_fs(StateU(*y), p, cfg.margin).passed

    return integrate(
        lambda t, y: fs_rhs_array(y, p, grid, cfg.dealias), U0.stack(), cfg.solve_spec(), monitor
    )


def simulate(cfg: ExperimentConfig, gamma: float, kinds=None) -> SimulationResult:
    """Integrate the free-surface system at one gamma and compare with each
    approximant in ``kinds`` (default: the configured kind)."""
    kinds = [cfg.approximant_kind] if kinds is None else [ApproximantKind(k) for k in kinds]
    p = cfg.params(gamma)
    verdict = validate(p)
    if not verdict:
        raise ConfigError("; ".join(verdict.violations))
    grid = cfg.grid
    V0 = cfg.initial_state(grid)
    U0 = v_to_u(V0, p)
    if not check_hyperbolicity_fs(U0, p, cfg.margin).passed:
        raise ConfigError(f"initial data fail the hyperbolicity condition at gamma={gamma}")
    traj = _integrate_fs(cfg, U0, p, grid)
    res = SimulationResult(gamma, p.rho, traj.status, V0, np.asarray(traj.times), t_fail=traj.t_fail)
    res.conservation = conservation_report(traj.times, traj.states, p, grid)
    if not traj.completed:
        res.message = f"free-surface run ended with {traj.status} at t={traj.t_fail}"
        return res
    res.exact = [u_to_v(StateU(*s), p) for s in traj.states]
    spec = cfg.solve_spec()
    for kind in kinds:
        app: Approximant = assemble(kind, V0, p, grid, spec, cfg.margin, cfg.dealias)
        states = [app.evaluate(t) for t in traj.times]
        res.approx[kind] = states
        per_time = [
            compare(e, a, grid, cfg.normalization, reference=V0) for e, a in zip(res.exact, states)
        ]
        if cfg.error_time == "sup":
            res.errors[kind] = tuple(float(x) for x in np.max(per_time, axis=0))
        else:
            res.errors[kind] = per_time[-1]
    return res


def run_simulation(cfg: ExperimentConfig, gamma: float | None = None, kinds=None) -> SimulationResult:
    res = simulate(cfg, cfg.gamma if gamma is None else gamma, kinds)
    if not res.completed:
        raise NumericalFailure(res.message)
    return res


@dataclass
class SweepResult:
    config: ExperimentConfig
    kinds: list
    tables: dict  # kind -> ErrorTable
    fits: dict  # kind -> RateFit or None
    statuses: dict  # gamma -> status string
    results: list

    @property
    def completed(self) -> bool:
        return all(s == COMPLETED for s in self.statuses.values())

    @property
    def table(self) -> ErrorTable:
        return self.tables[self.kinds[0]]

    @property
    def fit(self) -> RateFit | None:
        return self.fits[self.kinds[0]]


def _simulate_job(args):
    cfg, gamma, kinds = args
    try:
        return simulate(cfg, gamma, kinds)
    except (FloatingPointError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        p = cfg.params(gamma)
        return SimulationResult(gamma, p.rho, "failed", cfg.initial_state(), np.array([]), message=str(exc))


def run_sweep(cfg: ExperimentConfig, kinds=None) -> SweepResult:
    """Loop over ``cfg.gammas``; failed runs are kept with their status."""
    kinds = [cfg.approximant_kind] if kinds is None else [ApproximantKind(k) for k in kinds]
    jobs = [(cfg, g, kinds) for g in cfg.gammas]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_simulate_job, jobs))
    else:
        results = [_simulate_job(j) for j in jobs]
    tables = {k: ErrorTable(normalization=cfg.normalization) for k in kinds}
    statuses = {}
    for r in results:
        statuses[r.gamma] = r.status
        if r.completed:
            for k in kinds:
                tables[k].add(r.gamma, r.rho, r.errors[k])
        else:
            log.warning("gamma=%s: %s", r.gamma, r.message)
    fits = {}
    for k in kinds:
        try:
            fits[k] = fit_rate(tables[k])
        except ValueError:
            fits[k] = None
    return SweepResult(cfg, kinds, tables, fits, statuses, results)


# --- artifacts ------------------------------------------------------------

def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _json(cfg: ExperimentConfig, payload: dict) -> str:
    doc = {"config": {k: (list(v) if isinstance(v, tuple) else v) for k, v in cfg.to_dict().items()}}
    doc.update(payload)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _header(cfg: ExperimentConfig) -> str:
    return "".join(f"# {line}\n" for line in cfg.header_lines())


def snapshot_csv(cfg: ExperimentConfig, x: np.ndarray, columns: dict, extra=()) -> str:
    lines = [_header(cfg)]
    lines += [f"# {e}\n" for e in extra]
    names = list(columns)
    lines.append(",".join(["x"] + names) + "\n")
    data = np.column_stack([x] + [columns[n] for n in names])
    for row in data:
        lines.append(",".join(repr(float(v)) for v in row) + "\n")
    return "".join(lines)


def write_simulation(out: str, cfg: ExperimentConfig, res: SimulationResult, tag: str = "") -> None:
    os.makedirs(out, exist_ok=True)
    x = cfg.grid.x
    g = f"g{res.gamma:g}{tag}"
    extra = [f"gamma = {res.gamma!r}", f"rho = {res.rho!r}", f"status = {res.status}"]
    init = {v: getattr(res.initial, v) for v in VARIABLES}
    _write(os.path.join(out, f"snapshot_initial_{g}.csv"), snapshot_csv(cfg, x, init, extra))
    if res.conservation is not None:
        _write(os.path.join(out, f"conservation_{g}.json"), _json(cfg, {"gamma": res.gamma, **res.conservation.to_dict()}))
    if not res.completed:
        return
    final = {f"exact_{v}": getattr(res.exact[-1], v) for v in VARIABLES}
    for kind, states in res.approx.items():
        final.update({f"{kind.value}_{v}": getattr(states[-1], v) for v in VARIABLES})
    _write(os.path.join(out, f"snapshot_final_{g}.csv"), snapshot_csv(cfg, x, final, extra))


def write_sweep(out: str, cfg: ExperimentConfig, sweep: SweepResult, snapshots: bool = True) -> None:
    os.makedirs(out, exist_ok=True)
    multi = len(sweep.kinds) > 1
    for kind in sweep.kinds:
        suffix = f"_{kind.value}" if multi else ""
        header = cfg.header_lines() + [f"approximant = {kind.value}"]
        _write(os.path.join(out, f"errors{suffix}.csv"), sweep.tables[kind].to_csv(header))
        fit = sweep.fits[kind]
        payload = {
            "approximant": kind.value,
            "fit": None if fit is None else fit.to_dict(),
            "status": {repr(g): s for g, s in sweep.statuses.items()},
        }
        _write(os.path.join(out, f"rates{suffix}.json"), _json(cfg, payload))
    if snapshots:
        for r in sweep.results:
            write_simulation(out, cfg, r)
