import math

import pytest
from hypothesis import given, strategies as st

from rigidlid.params import Params, derive_rho, validate


def test_rho_reference_value():
    # sqrt(0.1 / 1.4)
    assert derive_rho(0.9, 0.5) == pytest.approx(0.2672612419124244, rel=1e-15)
    assert f"{derive_rho(0.9, 0.5):.6g}" == "0.267261"


def test_rho_limits():
    assert derive_rho(1 - 1e-16, 1.0) < 1e-7
    assert derive_rho(0.5, 0.5) == pytest.approx(math.sqrt(0.5), rel=1e-15)


@pytest.mark.parametrize("gamma", [0.0, 1.0, -0.1, 1.2])
def test_rho_rejects_gamma(gamma):
    with pytest.raises(ValueError):
        derive_rho(gamma, 0.5)


@pytest.mark.parametrize("delta", [0.0, -1.0, math.inf])
def test_rho_rejects_delta(delta):
    with pytest.raises(ValueError):
        derive_rho(0.9, delta)


@given(st.floats(0.01, 0.99), st.floats(0.1, 10.0))
def test_rho_inverts(gamma, delta):
    r = derive_rho(gamma, delta)
    assert (1 - r**2 * delta) / (1 + r**2) == pytest.approx(gamma, rel=1e-12)


@given(st.floats(0.5, 0.99), st.floats(0.5, 0.995), st.floats(0.1, 10.0))
def test_rho_decreases_with_gamma(g1, g2, delta):
    if g1 < g2:
        assert derive_rho(g2, delta) < derive_rho(g1, delta)


def test_params_defaults():
    p = Params(0.9, 0.5)
    assert p.alpha == p.rho
    assert p.c_fast == pytest.approx(math.sqrt(3.0))
    assert p.alpha_is_rho
    # alpha * (delta+gamma)/(1-gamma) = 1/rho when alpha = rho
    assert p.alpha * p.pressure_coef == pytest.approx(1 / p.rho)


def test_normalized():
    p = Params(0.9, 0.5, 0.5, alpha=0.3).normalized()
    assert p.epsilon == 1.0 and p.alpha_is_rho


def test_validate_accepts_experiment():
    assert validate(Params(0.99, 0.5, 0.5))


def test_validate_lists_every_violation():
    v = validate(Params(0.3, 20.0, 2.0, alpha=1.5))
    assert not v
    assert len(v.violations) == 4


def test_validate_invalid_gamma():
    v = validate(Params(1.0, 0.5))
    assert not v
    assert any("gamma" in s for s in v.violations)
