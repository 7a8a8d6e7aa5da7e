import json
import os

import numpy as np
import pytest

from rigidlid import checks
from rigidlid.approx import ApproximantKind
from rigidlid.cli import main
from rigidlid.config import DEFAULT_GAMMAS, ConfigError, ExperimentConfig, from_mapping, load_config
from rigidlid.diagnostics import ErrorTable
from rigidlid.experiment import run_simulation, run_sweep
from rigidlid.params import Params
from rigidlid.spectral import Grid

SMALL = ["--x-min", "-50", "--x-max", "50", "--n", "512", "--t-end", "1"]


def small_cfg(**kw):
    base = dict(x_min=-50.0, x_max=50.0, n=512, t_end=1.0)
    base.update(kw)
    return ExperimentConfig(**base)


def write_ini(tmp_path, body):
    path = tmp_path / "exp.ini"
    path.write_text("[experiment]\n" + body)
    return str(path)


# --- configuration ---------------------------------------------------------

def test_defaults():
    cfg = ExperimentConfig()
    assert cfg.gammas == DEFAULT_GAMMAS
    assert (cfg.x_min, cfg.x_max, cfg.n, cfg.delta, cfg.epsilon, cfg.t_end) == (-100, 100, 2000, 0.5, 0.5, 4.0)
    assert cfg.params().alpha == pytest.approx(0.2672612419124244)
    assert cfg.resolved_m_amp == 0.0
    assert cfg.replace(scenario="ill_prepared").resolved_m_amp == 2.0


def test_initial_state():
    cfg = ExperimentConfig(scenario="ill_prepared", kind="ip_basic")
    V = cfg.initial_state()
    i = cfg.grid.ref_index
    assert (V.zeta1[i], V.zeta2[i], V.us[i], V.m[i]) == pytest.approx((0, 1, -1 / 3, 2))


def test_load_ini(tmp_path):
    cfg = load_config(write_ini(tmp_path, "gammas = 0.9, 0.95\nn = 256\ndealias = false\nalpha = rho\n"))
    assert cfg.gammas == (0.9, 0.95) and cfg.n == 256 and not cfg.dealias and cfg.alpha is None


@pytest.mark.parametrize(
    "body",
    [
        "colour = red\n",
        "gammas = 0.95, 0.9\n",
        "gammas = 0.9, 1.0\n",
        "n = lots\n",
        "kind = ip_basic\n",
        "kind = nope\n",
        "scenario = sideways\n",
        "normalization = weird\n",
        "dealias = maybe\n",
        "n = 7\n",
    ],
)
def test_bad_config_rejected(tmp_path, body):
    with pytest.raises(ConfigError):
        load_config(write_ini(tmp_path, body))


def test_unknown_section_rejected(tmp_path):
    path = tmp_path / "x.ini"
    path.write_text("[experiment]\nn = 256\n[other]\na = 1\n")
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_kind_override():
    cfg = from_mapping({"kind": "ip_basic", "allow_kind_override": "true"})
    assert cfg.approximant_kind is ApproximantKind.IP_BASIC


# --- runs ------------------------------------------------------------------

def test_zero_data_gives_zero_errors():
    cfg = small_cfg(zeta2_amp=0.0, us_amp=0.0, kind="improved_wp")
    res = run_simulation(cfg)
    assert res.errors[ApproximantKind.IMPROVED_WP] == (0.0, 0.0, 0.0, 0.0)


@pytest.fixture(scope="module")
def wp_run():
    cfg = ExperimentConfig(normalization="rms")
    return run_simulation(cfg, 0.9, ["rl_only", "improved_wp"])


def test_rigid_lid_error_sits_on_fast_variables(wp_run):
    e = wp_run.errors[ApproximantKind.RL_ONLY]
    assert min(e[0], e[3]) > max(e[1], e[2])


def test_improved_approximation_beats_rigid_lid(wp_run):
    base = wp_run.errors[ApproximantKind.RL_ONLY]
    better = wp_run.errors[ApproximantKind.IMPROVED_WP]
    assert better[0] < base[0] and better[3] < base[3]
    # the slow variables come from the same rigid-lid flow
    assert better[1] == base[1] and better[2] == base[2]


def test_two_gamma_sweep(tmp_path):
    cfg = small_cfg(gammas=(0.9, 0.95))
    sweep = run_sweep(cfg)
    assert sweep.completed and len(sweep.table.rows) == 2
    assert sweep.fit is None


def test_cli_simulate_writes_artifacts(tmp_path, capsys):
    out = tmp_path / "sim"
    assert main(["simulate", *SMALL, "--out", str(out)]) == 0
    assert "rho=0.267261" in capsys.readouterr().out
    names = sorted(os.listdir(out))
    assert names == ["conservation_g0.9.json", "run.log", "snapshot_final_g0.9.csv", "snapshot_initial_g0.9.csv"]
    snap = (out / "snapshot_final_g0.9.csv").read_text()
    assert "# delta = 0.5" in snap and "x,exact_zeta1" in snap
    doc = json.loads((out / "conservation_g0.9.json").read_text())
    assert doc["config"]["n"] == 512 and doc["drifts"]["momentum"] < 1e-8


def test_cli_sweep_reproducible(tmp_path, capsys):
    ini = write_ini(tmp_path, "x_min = -50\nx_max = 50\nn = 512\nt_end = 1\ngammas = 0.9, 0.95, 0.975\n")
    for d in ("a", "b"):
        assert main(["sweep", ini, "--out", str(tmp_path / d)]) == 0
    text = capsys.readouterr().out
    assert "gamma=0.9 rho=0.267261" in text and "slopes:" in text
    for name in ("errors.csv", "rates.json", "snapshot_final_g0.95.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    table = ErrorTable.from_csv((tmp_path / "a" / "errors.csv").read_text())
    assert len(table.rows) == 3
    rates = json.loads((tmp_path / "a" / "rates.json").read_text())
    assert set(rates["fit"]["slopes"]) == {"zeta1", "zeta2", "us", "m"}


def test_cli_figures(tmp_path):
    out = tmp_path / "fig"
    assert main(["figures", *SMALL, "--gammas", "0.9,0.95,0.975", "--out", str(out)]) == 0
    assert os.path.exists(out / "well_prepared" / "errors_improved_wp.csv")
    assert os.path.exists(out / "ill_prepared" / "errors_ip_improved.csv")
    snap = (out / "ill_prepared" / "snapshot_final_g0.9.csv").read_text()
    assert "ip_basic_m" in snap and "ip_improved_m" in snap


def test_cli_config_error_exit_code(tmp_path, capsys):
    assert main(["simulate", "--kind", "ip_basic"]) == 2
    assert main(["simulate", str(tmp_path / "missing.ini")]) == 2
    assert main(["simulate", *SMALL, "--zeta2-amp", "5"]) == 2  # inadmissible initial data


def test_cli_numerical_failure_exit_code(capsys):
    assert main(["simulate", *SMALL, "--max-steps", "3"]) == 3


def test_cli_check_passes(capsys):
    assert main(["check", *SMALL[:6]]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "PASS energy drift" in out


def test_check_detects_relaxed_tolerance(capsys):
    assert main(["check", *SMALL[:6], "--rel-tol", "1e-3", "--abs-tol", "1e-3"]) == 3
    assert "FAIL energy drift" in capsys.readouterr().out


def test_check_detects_symmetrizer_sign_error(monkeypatch):
    original = checks.matrix_S

    def broken(point, p):
        S = original(point, p)
        S[..., 1, 3] *= -1
        return S

    monkeypatch.setattr(checks, "matrix_S", broken)
    res = {r.name: r for r in checks.symmetrizer_checks(Params(0.9, 0.5, 0.5), 200)}
    assert not res["SA symmetry"].passed
