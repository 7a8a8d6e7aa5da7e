import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rigidlid.spectral import Grid, NonFiniteFieldError
from conftest import bump


def test_grid_layout(grid):
    assert grid.n == 2000
    assert grid.dx == pytest.approx(0.1)
    assert grid.x[0] == -100.0 and grid.x[-1] == pytest.approx(99.9)
    assert grid.x[grid.ref_index] == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("n", [3, 5, 2])
def test_grid_rejects_bad_n(n):
    with pytest.raises(ValueError):
        Grid(-1, 1, n)


def test_check_rejects_nan(small_grid):
    f = small_grid.zeros()
    f[3] = np.nan
    with pytest.raises(NonFiniteFieldError):
        small_grid.deriv(f)


def test_check_rejects_shape(small_grid):
    with pytest.raises(ValueError):
        small_grid.deriv(np.zeros(10))


def test_deriv_sine_exact():
    g = Grid(0.0, 2 * np.pi, 64)
    assert np.max(np.abs(g.deriv(np.sin(3 * g.x)) - 3 * np.cos(3 * g.x))) < 1e-12


def test_deriv_gaussian(grid):
    f = bump(grid.x)
    exact = -0.5 * grid.x * f
    assert np.max(np.abs(grid.deriv(f) - exact)) < 1e-12


def test_deriv_many_matches_deriv(small_grid):
    f = np.stack([bump(small_grid.x), np.sin(2 * np.pi * small_grid.x / 100)])
    d = small_grid.deriv_many(f)
    for i in range(2):
        assert np.allclose(d[i], small_grid.deriv(f[i]), atol=1e-14)


def test_dealiased_derivative_leaves_smooth_data(grid):
    f = bump(grid.x)
    assert np.max(np.abs(grid.deriv_many(f, dealias=True) - grid.deriv(f))) < 1e-13


@given(st.floats(-30, 30))
def test_translate_gaussian(shift):
    g = Grid()
    out = g.translate(bump(g.x), shift)
    assert np.max(np.abs(out - bump(g.x - shift))) < 1e-12


@given(st.floats(-20, 20), st.floats(-20, 20))
def test_translate_composes(a, b):
    g = Grid(-50, 50, 512)
    f = bump(g.x)
    assert np.allclose(g.translate(g.translate(f, a), b), g.translate(f, a + b), atol=1e-12)


def test_antideriv_round_trip(grid):
    f = -0.5 * grid.x * bump(grid.x)
    F = grid.antideriv(f)
    assert np.max(np.abs(F - (bump(grid.x) - 1.0))) < 1e-12
    assert np.max(np.abs(grid.deriv(F - F.mean()) - f)) < 1e-9


def test_antideriv_of_nonzero_mean(grid):
    # integral from 0 of exp(-x^2/4) is sqrt(pi) erf(x/2)
    F = grid.antideriv(bump(grid.x))
    exact = np.array([math.sqrt(math.pi) * math.erf(x / 2) for x in grid.x])
    assert np.max(np.abs(F - exact)) < 1e-10


def test_sobolev_norm_l2_matches(grid):
    f = bump(grid.x)
    # ||exp(-x^2/4)||^2 = sqrt(2 pi)
    assert grid.sobolev_norm(f, 0) == pytest.approx((2 * math.pi) ** 0.25, rel=1e-12)
    assert grid.l2_norm(f) == pytest.approx((2 * math.pi) ** 0.25, rel=1e-12)


def test_sobolev_norm_h1(grid):
    # ||f||_H1^2 = ||f||^2 + ||f'||^2 = sqrt(2pi) (1 + 1/4)
    assert grid.sobolev_norm(bump(grid.x), 1) == pytest.approx(
        math.sqrt(1.25 * math.sqrt(2 * math.pi)), rel=1e-12
    )


def test_sobolev_norm_rejects_negative(grid):
    with pytest.raises(ValueError):
        grid.sobolev_norm(grid.zeros(), -1)


@given(st.floats(0, 3))
def test_sobolev_norm_monotone(s):
    g = Grid(-50, 50, 256)
    f = bump(g.x)
    assert g.sobolev_norm(f, s) <= g.sobolev_norm(f, s + 0.5) + 1e-14


def test_integrate_gaussian(grid):
    assert grid.integrate(bump(grid.x)) == pytest.approx(2 * math.sqrt(math.pi), rel=1e-14)


def test_dealias_removes_top_third():
    g = Grid(0, 2 * np.pi, 48)
    f = np.sin(2 * g.x) + np.sin(20 * g.x)
    assert np.allclose(g.dealias(f), np.sin(2 * g.x), atol=1e-13)
    assert np.array_equal(g.dealias(f, enabled=False), f)
