"""Approximate solutions built from the rigid-lid flow plus slow/fast correctors.

All correctors are computed on the normalized unknowns (epsilon = 1,
alpha = rho); :func:`assemble` takes and returns states in the caller's
epsilon-scaled variables.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .integrator import SolveSpec, Trajectory, integrate
from .params import Params
from .spectral import Grid
from .systems import (
    StateRL,
    StateV,
    check_hyperbolicity_rl,
    from_normalized,
    rl_rhs_array,
    to_normalized,
)


class ApproximantKind(enum.Enum):
    RL_ONLY = "rl_only"
    IMPROVED_WP = "improved_wp"
    IP_BASIC = "ip_basic"
    IP_IMPROVED = "ip_improved"

    @property
    def has_slow_corrector(self) -> bool:
        return self in (ApproximantKind.IMPROVED_WP, ApproximantKind.IP_IMPROVED)

    @property
    def burgers(self) -> bool:
        return self in (ApproximantKind.IP_BASIC, ApproximantKind.IP_IMPROVED)


class ShockHorizonError(ValueError):
    pass


class AdmissibilityError(ValueError):
    pass


def rigid_lid_solution(
    eta0: np.ndarray,
    v0: np.ndarray,
    p: Params,
    grid: Grid,
    spec: SolveSpec,
    h0: float = 0.0,
    dealias: bool = False,
) -> Trajectory:
    """Integrate the rigid-lid system; stops with ``condition_lost`` if the
    hyperbolicity margin drops below ``h0``."""
    W0 = StateRL(grid.check(eta0, "eta0"), grid.check(v0, "v0"))
    if not check_hyperbolicity_rl(W0, p, h0).passed:
        raise AdmissibilityError("rigid-lid initial data violate the hyperbolicity condition")

    def monitor(t, y):
        return check_hyperbolicity_rl(StateRL(*y), p, h0).passed

    return integrate(lambda t, y: rl_rhs_array(y, p, grid, dealias), W0.stack(), spec, monitor)


def slow_corrector_zeta1(eta, v, p: Params) -> np.ndarray:
    """Leading-order surface deformation slaved to the rigid-lid flow (normalized unknowns)."""
    d = p.delta
    c4 = (1.0 + 1.0 / d) ** 2
    return -(eta + 0.5 * d * eta**2) - (1.0 - eta) * (1.0 / d + eta) * v**2 / c4


def _zeta1_partials(eta, v, p: Params):
    d = p.delta
    c4 = (1.0 + 1.0 / d) ** 2
    d_eta = -(1.0 + d * eta) - (1.0 - 1.0 / d - 2.0 * eta) * v**2 / c4
    d_v = -2.0 * (1.0 - eta) * (1.0 / d + eta) * v / c4
    return d_eta, d_v


def slow_corrector_zeta1_dt(eta, v, p: Params, grid: Grid) -> np.ndarray:
    """Time derivative of the slow surface corrector along the rigid-lid flow (chain rule)."""
    pn = p.normalized()
    deta_dt, dv_dt = rl_rhs_array(np.stack([eta, v]), pn, grid)
    d_eta, d_v = _zeta1_partials(eta, v, p)
    return d_eta * deta_dt + d_v * dv_dt


def slow_corrector_m_simple(v, p: Params) -> np.ndarray:
    return p.delta / (1.0 + p.delta) * np.asarray(v)


def slow_corrector_m_full(eta, v, p: Params, grid: Grid) -> np.ndarray:
    """Higher-order momentum corrector; grows linearly away from x = 0 when
    the surface corrector has non-zero net rate of change."""
    dz_dt = slow_corrector_zeta1_dt(eta, v, p, grid)
    return -grid.antideriv(dz_dt) + p.delta * (1.0 - eta) * (1.0 / p.delta + eta) * v


def fast_profiles(zeta1_adj, m0, p: Params):
    """Initial right/left-going fast-mode amplitudes u_+ and u_-."""
    c = p.c_fast
    return 0.5 * (zeta1_adj + m0 / c), 0.5 * (zeta1_adj - m0 / c)


def _fast_state(grid: Grid, u_plus, u_minus, p: Params) -> StateV:
    z = grid.zeros()
    return StateV(u_plus + u_minus, z, z.copy(), p.c_fast * (u_plus - u_minus))


def fast_corrector_linear(zeta1_adj, m0, p: Params, grid: Grid, t: float) -> StateV:
    """Linear fast mode: two pulses carried rigidly at speed +-c/rho."""
    up, um = fast_profiles(zeta1_adj, m0, p)
    shift = p.c_fast * t / p.rho
    return _fast_state(grid, grid.translate(up, shift), grid.translate(um, -shift), p)


def shock_time(profile, grid: Grid, p: Params, coef: float | None = None) -> float:
    """Gradient catastrophe time of the inviscid Burgers flow of ``profile``."""
    coef = 1.5 / p.c_fast if coef is None else coef
    slope = np.max(np.abs(grid.deriv(profile)))
    if slope == 0.0 or coef == 0.0:
        return math.inf
    return 1.0 / (coef * slope)


@dataclass(frozen=True)
class BurgersFastMode:
    """Fast mode with Burgers self-interaction, solved in co-moving frames."""

    grid: Grid
    params: Params
    trajectory: Trajectory
    coef: float

    def profiles(self, t: float):
        """Co-moving amplitudes (w_+, w_-) at sample time t."""
        wp, wm = self.trajectory.at(t)
        return wp, wm

    def evaluate(self, t: float) -> StateV:
        wp, wm = self.profiles(t)
        shift = self.params.c_fast * t / self.params.rho
        g = self.grid
        return _fast_state(g, g.translate(wp, shift), g.translate(wm, -shift), self.params)


def burgers_rhs(y, coef: float, grid: Grid, dealias: bool = False):
    """w_+ and w_- advected by +coef*w and -coef*w (divergence form)."""
    wp, wm = y
    flux = 0.5 * coef * np.stack([wp**2, -(wm**2)])
    return -grid.deriv_many(flux, dealias)


def fast_corrector_burgers(
    zeta1_adj,
    m0,
    p: Params,
    grid: Grid,
    spec: SolveSpec,
    coef: float | None = None,
    dealias: bool = False,
) -> BurgersFastMode:
    """Nonlinear fast mode; ``coef`` overrides the Burgers coefficient 3/(2c)."""
    coef = 1.5 / p.c_fast if coef is None else coef
    up, um = fast_profiles(zeta1_adj, m0, p)
    t_star = min(shock_time(up, grid, p, coef), shock_time(um, grid, p, coef))
    if spec.t_end >= t_star:
        raise ShockHorizonError(
            f"final time {spec.t_end} is beyond the Burgers shock time {t_star:.4g}"
        )
    traj = integrate(lambda t, y: burgers_rhs(y, coef, grid, dealias), np.stack([up, um]), spec)
    if not traj.completed:
        raise FloatingPointError(f"Burgers fast mode failed: {traj.status} at t={traj.t_fail}")
    return BurgersFastMode(grid, p, traj, coef)


@dataclass(frozen=True)
class Approximant:
    kind: ApproximantKind
    params: Params
    grid: Grid
    rl_trajectory: Trajectory
    zeta1_adj: np.ndarray
    m0: np.ndarray
    burgers: BurgersFastMode | None = None

    def evaluate_normalized(self, t: float) -> StateV:
        g = self.grid
        pn = self.params.normalized()
        eta, v = self.rl_trajectory.at(t)
        out = StateV(g.zeros(), eta.copy(), v.copy(), g.zeros())
        if self.kind.has_slow_corrector:
            out.zeta1 = out.zeta1 + pn.rho * slow_corrector_zeta1(eta, v, pn)
        if self.kind is ApproximantKind.IMPROVED_WP:
            out = out + fast_corrector_linear(self.zeta1_adj, self.m0, pn, g, t)
        elif self.burgers is not None:
            out = out + self.burgers.evaluate(t)
        return out

    def evaluate(self, t: float) -> StateV:
        return from_normalized(self.evaluate_normalized(t), self.params)


def assemble(
    kind: ApproximantKind,
    V0: StateV,
    p: Params,
    grid: Grid,
    spec: SolveSpec,
    h0: float = 0.0,
    dealias: bool = False,
) -> Approximant:
    """Build the approximant of ``kind`` for initial data ``V0`` (caller's variables)."""
    pn = p.normalized()
    Vn = to_normalized(V0, p)
    # the rigid-lid flow is integrated on normalized unknowns; tolerances keep their meaning
    rl = rigid_lid_solution(Vn.zeta2, Vn.us, pn, grid, spec, h0, dealias)
    if not rl.completed:
        raise AdmissibilityError(f"rigid-lid run ended with {rl.status} at t={rl.t_fail}")
    zeta1_adj = Vn.zeta1.copy()
    if kind.has_slow_corrector:
        zeta1_adj = zeta1_adj - pn.rho * slow_corrector_zeta1(Vn.zeta2, Vn.us, pn)
    burgers = None
    if kind.burgers:
        burgers = fast_corrector_burgers(zeta1_adj, Vn.m, pn, grid, spec, dealias=dealias)
    return Approximant(kind, p, grid, rl, zeta1_adj, Vn.m.copy(), burgers)
