import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rigidlid.diagnostics import (
    ErrorTable,
    compare,
    conservation_report,
    fit_rate,
    rl_energy,
    total_energy,
    total_momentum,
    weighted_localization,
)
from rigidlid.integrator import SolveSpec, integrate
from rigidlid.params import Params
from rigidlid.spectral import Grid
from rigidlid.systems import StateRL, StateU, StateV, fs_rhs_array, rl_rhs_array, u_to_v, v_to_u
from conftest import bump

G = Grid(-50.0, 50.0, 512)
P = Params(0.9, 0.5, 0.5)


def wp(amp=1.0, m_amp=0.0, grid=G):
    b = bump(grid.x)
    return v_to_u(StateV(0 * b, amp * b, -amp * b / 3, m_amp * b), P)


def test_rest_energy_and_momentum_vanish():
    U = StateU.zeros(G)
    assert total_energy(U, P, G) == 0.0
    assert total_momentum(U, P, G) == 0.0


def test_energy_is_quadratic_at_small_amplitude():
    e1 = total_energy(wp(1e-3, 1e-3), P, G)
    e2 = total_energy(wp(5e-4, 5e-4), P, G)
    assert e1 / e2 == pytest.approx(4.0, rel=0.05)


def test_momentum_is_integral_of_m():
    U = wp(0.5, 1.0)
    assert total_momentum(U, P, G) == pytest.approx(G.integrate(u_to_v(U, P).m), rel=1e-14)


def test_drifts_along_free_surface_run():
    ts = tuple(np.linspace(0, 1, 5))
    tr = integrate(lambda t, y: fs_rhs_array(y, P, G, True), wp(1.0, 2.0).stack(), SolveSpec(0, 1, sample_times=ts))
    rep = conservation_report(tr.times, tr.states, P, G)
    assert rep.within()
    assert rep.drift("momentum") <= 1e-9
    d = rep.to_dict()
    assert set(d["drifts"]) == {"mass1", "mass2", "momentum", "energy"}


def test_zero_initial_mass_uses_floor():
    states = [wp().stack(), wp().stack()]
    states[1][0] += 1e-12 * bump(G.x)
    rep = conservation_report([0, 1], states, P, G)
    assert rep.drift("mass1") == pytest.approx(1.0)  # scaled by its own size


def test_rigid_lid_energy_drift():
    y0 = np.stack([bump(G.x), -bump(G.x) / 3])
    tr = integrate(lambda t, y: rl_rhs_array(y, P, G), y0, SolveSpec(0, 2, sample_times=(0, 1, 2)))
    E = [rl_energy(StateRL(*s), P, G) for s in tr.states]
    assert max(abs(e - E[0]) for e in E) / E[0] <= 1e-6


# --- compare ---------------------------------------------------------------

def rand_state(seed):
    rng = np.random.default_rng(seed)
    return StateV(*rng.normal(size=(4, G.n)))


def test_compare_identity():
    V = rand_state(0)
    assert compare(V, V, G, reference=V) == (0.0, 0.0, 0.0, 0.0)


def test_compare_self_normalization_of_zero_approx():
    V = rand_state(1)
    assert np.allclose(compare(V, StateV.zeros(G), G, "self"), 1.0)


def test_compare_linear_in_difference():
    V, W, R = rand_state(2), rand_state(3), rand_state(4)
    a = np.array(compare(V, W, G, reference=R))
    doubled = StateV.from_array(V.stack() + (W.stack() - V.stack()) * 2)
    assert np.allclose(compare(V, doubled, G, reference=R), 2 * a, rtol=1e-13)


def test_compare_zero_reference_falls_back_to_rms():
    V = rand_state(5)
    errs = compare(V, StateV.zeros(G), G, reference=StateV.zeros(G))
    assert errs[0] == pytest.approx(math.sqrt(np.mean(V.zeta1**2)))


def test_compare_rejects_unknown_mode():
    with pytest.raises(ValueError):
        compare(rand_state(0), rand_state(1), G, "bogus")
    with pytest.raises(ValueError):
        compare(rand_state(0), rand_state(1), G, "initial")


@given(st.integers(0, 10_000), st.sampled_from(["initial", "rms"]))
def test_compare_is_a_metric(seed, mode):
    A, B, C = rand_state(seed), rand_state(seed + 1), rand_state(seed + 2)
    R = rand_state(seed + 3)
    ab = np.array(compare(A, B, G, mode, reference=R))
    ba = np.array(compare(B, A, G, mode, reference=R))
    bc = np.array(compare(B, C, G, mode, reference=R))
    ac = np.array(compare(A, C, G, mode, reference=R))
    assert np.allclose(ab, ba, rtol=1e-14)
    assert np.all(ac <= ab + bc + 1e-12)


# --- localization ------------------------------------------------------------

def test_weighted_localization_values():
    g = Grid()
    assert weighted_localization(g.zeros(), g, 1.0) == 0.0
    # int (1+x^2)^2 exp(-x^2/2) dx = 6 sqrt(2 pi)
    assert weighted_localization(bump(g.x), g, 1.0) == pytest.approx(
        math.sqrt(6 * math.sqrt(2 * math.pi)), rel=1e-12
    )


def test_weighted_localization_grows_with_distance():
    g = Grid()
    vals = [weighted_localization(bump(g.x - s), g, 0.75) for s in (0, 5, 10, 20)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_weighted_localization_needs_sigma_above_half():
    with pytest.raises(ValueError):
        weighted_localization(G.zeros(), G, 0.5)


# --- rate fitting ----------------------------------------------------------

def table_of(fn, rhos=(0.4, 0.2, 0.1, 0.05)):
    t = ErrorTable()
    for r in rhos:
        t.add(0.9, r, [fn(r)] * 4)
    return t


def test_fit_quadratic():
    fit = fit_rate(table_of(lambda r: r**2))
    assert all(s == pytest.approx(2.0, abs=1e-12) for s in fit.slopes.values())


def test_fit_linear_with_intercept():
    fit = fit_rate(table_of(lambda r: 3 * r))
    assert fit.slopes["zeta1"] == pytest.approx(1.0, abs=1e-12)
    assert fit.intercepts["m"] == pytest.approx(math.log(3), abs=1e-12)
    assert fit.residuals["us"] < 1e-20


@given(st.floats(0.5, 3.0), st.floats(0.01, 100.0))
def test_fit_recovers_power_laws(k, c):
    fit = fit_rate(table_of(lambda r: c * r**k))
    assert fit.slopes["zeta2"] == pytest.approx(k, abs=1e-9)


def test_fit_needs_three_rows():
    with pytest.raises(ValueError):
        fit_rate(table_of(lambda r: r, rhos=(0.2, 0.1)))


def test_fit_rejects_zero_error():
    t = table_of(lambda r: r)
    t.rows[0] = t.rows[0][:2] + (0.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        fit_rate(t)


def test_table_rejects_negative_error():
    with pytest.raises(ValueError):
        ErrorTable().add(0.9, 0.2, [1.0, -1.0, 0.0, 0.0])


def test_table_sorted_and_round_trips():
    t = ErrorTable()
    for g in (0.99, 0.75, 0.9):
        t.add(g, Params(g, 0.5).rho, [0.1 * g, 0.2, 1 / 3, 1e-17])
    assert np.all(np.diff(t.rho) < 0)
    text = t.to_csv(["delta = 0.5"])
    assert text.startswith("# delta = 0.5\n")
    assert "gamma,rho,err_zeta1,err_zeta2,err_us,err_m" in text
    back = ErrorTable.from_csv(text)
    assert back.rows == t.rows
