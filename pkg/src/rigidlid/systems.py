"""Free-surface and rigid-lid two-layer systems: states, right-hand sides,
changes of variables, pointwise matrices and admissibility checks.

Unknowns
--------
StateU  (zeta1, zeta2, u1, u2)  free-surface system in layer velocities
StateV  (zeta1, zeta2, us, m)   free-surface system in shear velocity / momentum
StateRL (eta, v)                rigid-lid system

Right-hand sides are evaluated in conservation form: fluxes are assembled
pointwise and differentiated spectrally in one batched transform.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .params import Params
from .spectral import Grid


class DepthCollapseError(FloatingPointError):
    pass


class _State:
    """Shared plumbing: stacking into a (k, n) array for the integrator."""

    def stack(self) -> np.ndarray:
        return np.stack([getattr(self, f.name) for f in fields(self)])

    @classmethod
    def from_array(cls, a):
        a = np.asarray(a, dtype=float)
        return cls(*a)

    @classmethod
    def zeros(cls, grid: Grid):
        return cls(*np.zeros((len(fields(cls)), grid.n)))

    def scaled(self, factor: float):
        return type(self).from_array(factor * self.stack())

    def __sub__(self, other):
        return type(self).from_array(self.stack() - other.stack())

    def __add__(self, other):
        return type(self).from_array(self.stack() + other.stack())

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.stack())))


@dataclass
class StateU(_State):
    zeta1: np.ndarray
    zeta2: np.ndarray
    u1: np.ndarray
    u2: np.ndarray

    def depths(self, p: Params):
        h1 = 1.0 + p.epsilon * p.alpha * self.zeta1 - p.epsilon * self.zeta2
        h2 = 1.0 / p.delta + p.epsilon * self.zeta2
        return h1, h2


@dataclass
class StateV(_State):
    zeta1: np.ndarray
    zeta2: np.ndarray
    us: np.ndarray
    m: np.ndarray

    def depths(self, p: Params):
        h1 = 1.0 + p.epsilon * p.alpha * self.zeta1 - p.epsilon * self.zeta2
        h2 = 1.0 / p.delta + p.epsilon * self.zeta2
        return h1, h2


@dataclass
class StateRL(_State):
    eta: np.ndarray
    v: np.ndarray

    def depths(self, p: Params):
        return 1.0 - p.epsilon * self.eta, 1.0 / p.delta + p.epsilon * self.eta


# --------------------------------------------------------------------------
# right-hand sides on stacked arrays


def fs_rhs_array(y: np.ndarray, p: Params, grid: Grid, dealias: bool = False) -> np.ndarray:
    """d/dt of (zeta1, zeta2, u1, u2) for the free-surface system, general (epsilon, alpha)."""
    z1, z2, u1, u2 = y
    eps, alpha, g, d = p.epsilon, p.alpha, p.gamma, p.delta
    if alpha <= 0.0:
        raise ValueError("free-surface system needs alpha > 0")
    h1 = 1.0 + eps * alpha * z1 - eps * z2
    h2 = 1.0 / d + eps * z2
    # alpha * (delta+gamma)/(1-gamma); equals 1/rho when alpha = rho
    ap = alpha * p.pressure_coef
    flux = np.stack(
        [
            (h1 * u1 + h2 * u2) / alpha,
            h2 * u2,
            ap * z1 + 0.5 * eps * u1**2,
            (d + g) * z2 + g * ap * z1 + 0.5 * eps * u2**2,
        ]
    )
    return -grid.deriv_many(flux, dealias)


def fs2_rhs_array(y: np.ndarray, p: Params, grid: Grid, dealias: bool = False) -> np.ndarray:
    """d/dt of (zeta1, zeta2, us, m) for the normalized (epsilon=1, alpha=rho) system.

    Only ``gamma`` and ``delta`` of ``p`` are read.
    """
    z1, z2, us, m = y
    g, d = p.gamma, p.delta
    rho = p.rho
    h1 = 1.0 + rho * z1 - z2
    h2 = 1.0 / d + z2
    H = h1 + h2
    H0 = 1.0 + 1.0 / d
    a = m - h2 * us
    b = m + h1 * us
    flux = np.stack(
        [
            # (1-gamma)/(gamma*rho) rewritten as rho*(gamma+delta)/gamma
            m / rho + rho * (g + d) / g * h1 * a / H,
            h2 * b / H,
            (d + g) * z2 + 0.5 * (g * b**2 - a**2) / (g * H**2),
            # pressure with its rest value removed
            g * (H0 * z1 / rho + 0.5 * z1**2)
            + (g + d) * (z2 / d + 0.5 * z2**2)
            + (h1 * a**2 + g * h2 * b**2) / (g * H**2),
        ]
    )
    return -grid.deriv_many(flux, dealias)


def rl_rhs_array(y: np.ndarray, p: Params, grid: Grid, dealias: bool = False) -> np.ndarray:
    """d/dt of (eta, v) for the rigid-lid system, general epsilon."""
    eta, v = y
    eps, g, d = p.epsilon, p.gamma, p.delta
    h1 = 1.0 - eps * eta
    h2 = 1.0 / d + eps * eta
    q = h1 + g * h2
    flux = np.stack(
        [
            h1 * h2 / q * v,
            (g + d) * eta + 0.5 * eps * (h1**2 - g * h2**2) / q**2 * v**2,
        ]
    )
    return -grid.deriv_many(flux, dealias)


def _checked(state, p: Params, grid: Grid, kernel, cls, dealias: bool = False):
    y = state.stack()
    if not np.all(np.isfinite(y)):
        raise FloatingPointError("non-finite state")
    out = kernel(y, p, grid, dealias)
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("non-finite right-hand side")
    return cls.from_array(out)


def rhs_fs(U: StateU, p: Params, grid: Grid, dealias: bool = False) -> StateU:
    h1, h2 = U.depths(p)
    if np.min(h1 + h2) <= 0.0:
        raise DepthCollapseError("total depth vanishes")
    return _checked(U, p, grid, fs_rhs_array, StateU, dealias)


def rhs_fs2(V: StateV, p: Params, grid: Grid, dealias: bool = False) -> StateV:
    if np.min(1.0 + 1.0 / p.delta + p.rho * V.zeta1) <= 0.0:
        raise DepthCollapseError("total depth vanishes")
    return _checked(V, p, grid, fs2_rhs_array, StateV, dealias)


def rhs_rl(W: StateRL, p: Params, grid: Grid, dealias: bool = False) -> StateRL:
    h1, h2 = W.depths(p)
    if np.min(h1) <= 0.0 or np.min(h2) <= 0.0 or np.min(h1 + p.gamma * h2) <= 0.0:
        raise DepthCollapseError("layer depth vanishes")
    return _checked(W, p, grid, rl_rhs_array, StateRL, dealias)


# --------------------------------------------------------------------------
# changes of variables


def u_to_v(U: StateU, p: Params) -> StateV:
    h1, h2 = U.depths(p)
    return StateV(
        U.zeta1.copy(),
        U.zeta2.copy(),
        U.u2 - p.gamma * U.u1,
        p.gamma * h1 * U.u1 + h2 * U.u2,
    )


def v_to_u(V: StateV, p: Params) -> StateU:
    h1, h2 = V.depths(p)
    H = h1 + h2
    if np.min(H) <= 0.0:
        raise DepthCollapseError("total depth h1 + h2 vanishes")
    return StateU(
        V.zeta1.copy(),
        V.zeta2.copy(),
        (V.m - h2 * V.us) / (p.gamma * H),
        (V.m + h1 * V.us) / H,
    )


def _require_alpha_rho(p: Params):
    if not p.alpha_is_rho:
        raise ValueError("scaling to the normalized system requires alpha = rho")


def to_normalized(state, p: Params):
    """Map a state of the (epsilon, alpha=rho) system to the epsilon=1 system.

    Every unknown (including the momentum, whose depths carry epsilon)
    is multiplied by epsilon.
    """
    _require_alpha_rho(p)
    return state.scaled(p.epsilon)


def from_normalized(state, p: Params):
    _require_alpha_rho(p)
    return state.scaled(1.0 / p.epsilon)


# --------------------------------------------------------------------------
# pointwise matrices; a "point" is a length-4 sequence of scalars or arrays


def _components(point):
    return [np.asarray(c, dtype=float) for c in point]


def _assemble(rows, shape):
    out = np.zeros(shape + (len(rows), len(rows[0])))
    for i, row in enumerate(rows):
        for j, entry in enumerate(row):
            out[..., i, j] = entry
    return out


def matrix_A(point, p: Params) -> np.ndarray:
    """Quasilinear matrix of the free-surface system in (zeta1, zeta2, u1, u2)."""
    z1, z2, u1, u2 = _components(point)
    shape = np.broadcast(z1, z2, u1, u2).shape
    eps, alpha, g, d = p.epsilon, p.alpha, p.gamma, p.delta
    h1 = 1.0 + eps * alpha * z1 - eps * z2
    h2 = 1.0 / d + eps * z2
    ap = alpha * p.pressure_coef
    rows = [
        [eps * u1, eps * (u2 - u1) / alpha, h1 / alpha, h2 / alpha],
        [0.0, eps * u2, 0.0, h2],
        [ap, 0.0, eps * u1, 0.0],
        [g * ap, d + g, 0.0, eps * u2],
    ]
    return _assemble(rows, shape)


def matrix_S(point, p: Params) -> np.ndarray:
    """Symmetrizer of the free-surface system (alpha = rho), evaluated at epsilon*point."""
    _require_alpha_rho(p)
    z1, z2, u1, u2 = (p.epsilon * c for c in _components(point))
    shape = np.broadcast(z1, z2, u1, u2).shape
    g, d, rho = p.gamma, p.delta, p.rho
    h1 = 1.0 + rho * z1 - z2
    h2 = 1.0 / d + z2
    w = u2 - u1
    rows = [
        [g, 0.0, 0.0, 0.0],
        [0.0, g + d, 0.0, w],
        [0.0, 0.0, g * h1, 0.0],
        [0.0, w, 0.0, h2],
    ]
    return _assemble(rows, shape)


def matrix_Sigma(point, p: Params) -> np.ndarray:
    """Closed form of S[U] A[U] (alpha = rho), evaluated at epsilon*point."""
    _require_alpha_rho(p)
    z1, z2, u1, u2 = (p.epsilon * c for c in _components(point))
    shape = np.broadcast(z1, z2, u1, u2).shape
    g, d, rho = p.gamma, p.delta, p.rho
    h1 = 1.0 + rho * z1 - z2
    h2 = 1.0 / d + z2
    w = u2 - u1
    off = (g + d) * h2 + u2 * w
    rows = [
        [g * u1, g * w / rho, g * h1 / rho, g * h2 / rho],
        [g * w / rho, (g + d) * (2 * u2 - u1), 0.0, off],
        [g * h1 / rho, 0.0, g * h1 * u1, 0.0],
        [g * h2 / rho, off, 0.0, h2 * (2 * u2 - u1)],
    ]
    return _assemble(rows, shape)


def jacobian_F(point, p: Params) -> np.ndarray:
    """Jacobian of (zeta1, zeta2, us, m) -> (zeta1, zeta2, u1, u2), normalized unknowns."""
    z1, z2, us, m = _components(point)
    shape = np.broadcast(z1, z2, us, m).shape
    g, d, rho = p.gamma, p.delta, p.rho
    h1 = 1.0 + rho * z1 - z2
    h2 = 1.0 / d + z2
    H = h1 + h2
    if np.min(H) <= 0.0:
        raise DepthCollapseError("singular change of variables: total depth vanishes")
    u1 = (m - h2 * us) / (g * H)
    rows = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-rho * u1 / H, -us / (g * H), -h2 / (g * H), 1.0 / (g * H)],
        [-rho * g * u1 / H, -us / H, h1 / H, 1.0 / H],
    ]
    return _assemble(rows, shape)


def _F_point(point, p: Params):
    z1, z2, us, m = _components(point)
    rho = p.rho
    h1 = 1.0 + rho * z1 - z2
    h2 = 1.0 / p.delta + z2
    H = h1 + h2
    return z1, z2, (m - h2 * us) / (p.gamma * H), (m + h1 * us) / H


def matrix_T(point, p: Params) -> np.ndarray:
    """Symmetrizer dF^T S[F(V)] dF of the (us, m) system, normalized unknowns."""
    pn = p.normalized()
    dF = jacobian_F(point, pn)
    S = matrix_S(_F_point(point, pn), pn)
    return np.swapaxes(dF, -1, -2) @ S @ dF


def matrix_L(p: Params) -> np.ndarray:
    """Constant part (times rho) of the (us, m) system."""
    g, d, rho = p.gamma, p.delta, p.rho
    return np.array(
        [
            [0.0, 0.0, (g - 1.0) / (g * (d + 1.0)), (g + d) / (g * (d + 1.0))],
            [0.0, 0.0, rho / (1.0 + d), rho / (1.0 + d)],
            [0.0, rho * (g + d), 0.0, 0.0],
            [g * (1.0 + 1.0 / d), rho * (d + g) / d, 0.0, 0.0],
        ]
    )


def matrix_L0(p: Params) -> np.ndarray:
    out = np.zeros((4, 4))
    out[0, 3] = 1.0
    out[3, 0] = 1.0 + 1.0 / p.delta
    return out


def matrix_L1(p: Params) -> np.ndarray:
    g, d = p.gamma, p.delta
    out = np.zeros((4, 4))
    out[1, 2] = out[1, 3] = 1.0 / (1.0 + d)
    out[2, 1] = g + d
    out[3, 1] = (d + 1.0) / d
    return out


def projector_pi() -> np.ndarray:
    """Orthogonal projector onto ker L0, i.e. onto the (zeta2, us) slots."""
    return np.diag([0.0, 1.0, 1.0, 0.0])


def satisfies_condH(point, p: Params, h0: float = 0.0) -> np.ndarray:
    """Sufficient hyperbolicity condition for the symmetrizer, at epsilon*point."""
    z1, z2, u1, u2 = (p.epsilon * c for c in _components(point))
    h1 = 1.0 + p.rho * z1 - z2
    h2 = 1.0 / p.delta + z2
    return (h1 > h0) & (h2 - (u2 - u1) ** 2 / (p.gamma + p.delta) > h0)


# --------------------------------------------------------------------------
# admissibility monitors


@dataclass(frozen=True)
class MarginReport:
    margin: float
    h0: float
    minima: tuple[float, ...]
    locations: tuple[float, ...]

    @property
    def passed(self) -> bool:
        return self.margin >= self.h0


def _report(exprs, grid: Grid | None, h0: float) -> MarginReport:
    exprs = [np.atleast_1d(e) for e in exprs]
    minima = tuple(float(e.min()) for e in exprs)
    idx = [int(e.argmin()) for e in exprs]
    locs = tuple(float(grid.x[i]) if grid is not None else float(i) for i in idx)
    return MarginReport(min(minima), h0, minima, locs)


def hyperbolicity_terms_fs(U: StateU, p: Params):
    eps, g, d = p.epsilon, p.gamma, p.delta
    h1, h2 = U.depths(p)
    return (
        h1,
        h2 - eps**2 * (U.u2 - U.u1) ** 2 / (g + d),
        (h1 + g * h2) ** 3
        - eps**2 * g * (1.0 + 1.0 / d) ** 2 * (U.u2 - g * U.u1) ** 2 / (g + d),
    )


def hyperbolicity_terms_rl(W: StateRL, p: Params):
    eps, g, d = p.epsilon, p.gamma, p.delta
    h1, h2 = W.depths(p)
    return (
        h1,
        h2,
        g + d - eps**2 * g * (1.0 + 1.0 / d) ** 2 / (h1 + g * h2) ** 3 * W.v**2,
    )


def check_hyperbolicity_fs(
    U: StateU, p: Params, h0: float = 0.0, grid: Grid | None = None
) -> MarginReport:
    """Pointwise minima of the three free-surface admissibility expressions."""
    return _report(hyperbolicity_terms_fs(U, p), grid, h0)


def check_hyperbolicity_rl(
    W: StateRL, p: Params, h0: float = 0.0, grid: Grid | None = None
) -> MarginReport:
    return _report(hyperbolicity_terms_rl(W, p), grid, h0)


def check_prepared(U: StateU, p: Params, grid: Grid, s: float = 0.0) -> tuple[float, float]:
    """(slow size, fast size); well-prepared data has fast size <= M*rho."""
    V = u_to_v(U, p)
    slow = grid.sobolev_norm(U.zeta2, s) + grid.sobolev_norm(V.us, s)
    fast = p.alpha / p.rho * grid.sobolev_norm(U.zeta1, s) + grid.sobolev_norm(V.m, s)
    return slow, fast


def symmetrizer_energy(U: StateU, p: Params, grid: Grid) -> float:
    """Quadrature of <S[U] U, U> over the grid."""
    y = U.stack()
    S = matrix_S(y, p)
    return grid.integrate(np.einsum("ni,nij,nj->n", y.T, S, y.T))
