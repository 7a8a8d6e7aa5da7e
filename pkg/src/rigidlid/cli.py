"""Command line: ``python -m rigidlid {simulate,sweep,check,figures} [config] --out DIR``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import fields

from .approx import AdmissibilityError, ApproximantKind, ShockHorizonError
from .checks import run_all
from .config import ConfigError, ExperimentConfig, from_mapping, load_config
from .experiment import NumericalFailure, run_simulation, run_sweep, write_simulation, write_sweep
from .spectral import Grid

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
log = logging.getLogger("rigidlid")


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("config", nargs="?", help="INI file with an [experiment] section")
    parser.add_argument("--out", help="directory for emitted artifacts")
    for f in fields(ExperimentConfig):
        parser.add_argument(f"--{f.name.replace('_', '-')}", dest=f"cfg_{f.name}", metavar="VALUE")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rigidlid", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in [
        ("simulate", "one free-surface run at --gamma compared with --kind"),
        ("sweep", "error table and fitted rates over --gammas"),
        ("check", "invariant suite at reduced resolution"),
        ("figures", "sweeps and snapshots for all four approximants"),
    ]:
        _add_config_flags(sub.add_parser(name, help=text))
    return parser


def resolve_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {
        k[4:]: v for k, v in vars(args).items() if k.startswith("cfg_") and v is not None
    }
    if overrides:
        merged = {k: v for k, v in cfg.to_dict().items()}
        merged.update(overrides)
        cfg = from_mapping(merged)
    return cfg


def _echo_rho(cfg: ExperimentConfig, gammas) -> None:
    for g in gammas:
        print(f"gamma={g!r} rho={cfg.params(g).rho:.6g}")


def _setup_log(out: str | None) -> None:
    log.setLevel(logging.INFO)
    if out and not any(isinstance(h, logging.FileHandler) for h in log.handlers):
        os.makedirs(out, exist_ok=True)
        log.addHandler(logging.FileHandler(os.path.join(out, "run.log"), mode="w"))


def _fmt(errors) -> str:
    return " ".join(f"{e:.4e}" for e in errors)


def cmd_simulate(cfg: ExperimentConfig, out: str | None) -> int:
    _echo_rho(cfg, [cfg.gamma])
    res = run_simulation(cfg)
    kind = cfg.approximant_kind
    print(f"errors ({kind.value}) zeta1 zeta2 us m: {_fmt(res.errors[kind])}")
    log.info("simulate gamma=%r errors=%s", cfg.gamma, res.errors[kind])
    if out:
        write_simulation(out, cfg, res)
    return EXIT_OK


def _report_sweep(sweep) -> None:
    for kind in sweep.kinds:
        fit = sweep.fits[kind]
        for row in sweep.tables[kind].rows:
            print(f"{kind.value} gamma={row[0]!r} rho={row[1]:.6g} errors: {_fmt(row[2:])}")
        if fit is not None:
            slopes = " ".join(f"{k}={v:.3f}" for k, v in fit.slopes.items())
            print(f"{kind.value} slopes: {slopes}")
            log.info("%s slopes %s", kind.value, fit.slopes)
    for g, s in sweep.statuses.items():
        if s != "completed":
            print(f"gamma={g!r} status={s}")


def cmd_sweep(cfg: ExperimentConfig, out: str | None) -> int:
    _echo_rho(cfg, cfg.gammas)
    sweep = run_sweep(cfg)
    _report_sweep(sweep)
    if out:
        write_sweep(out, cfg, sweep)
    return EXIT_OK if sweep.completed else EXIT_NUMERICAL


def cmd_figures(cfg: ExperimentConfig, out: str | None) -> int:
    _echo_rho(cfg, cfg.gammas)
    code = EXIT_OK
    groups = {
        "well_prepared": [ApproximantKind.RL_ONLY, ApproximantKind.IMPROVED_WP],
        "ill_prepared": [ApproximantKind.IP_BASIC, ApproximantKind.IP_IMPROVED],
    }
    for scenario, kinds in groups.items():
        sub = cfg.replace(scenario=scenario, kind=kinds[0].value, m_amp=None)
        sweep = run_sweep(sub, kinds)
        _report_sweep(sweep)
        if out:
            write_sweep(os.path.join(out, scenario), sub, sweep)
        if not sweep.completed:
            code = EXIT_NUMERICAL
    return code


def cmd_check(cfg: ExperimentConfig, out: str | None) -> int:
    # reduced resolution, same grid spacing as the experiment
    n = max(4, min(cfg.n, 1000) // 2 * 2)
    half = 0.5 * (cfg.x_max - cfg.x_min) * n / cfg.n
    mid = 0.5 * (cfg.x_max + cfg.x_min)
    grid = Grid(mid - half, mid + half, n)
    results = run_all(grid, tol=cfg.rel_tol, t_end=cfg.t_end, dealias=cfg.dealias)
    for r in results:
        print(r.line())
        log.info(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERICAL


COMMANDS = {"simulate": cmd_simulate, "sweep": cmd_sweep, "check": cmd_check, "figures": cmd_figures}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _setup_log(args.out)
    try:
        return COMMANDS[args.command](cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, AdmissibilityError, ShockHorizonError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
