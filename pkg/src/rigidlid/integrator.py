"""Adaptive Dormand-Prince 5(4) time stepping for method-of-lines systems."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

log = logging.getLogger(__name__)

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# difference between the 5th- and embedded 4th-order weights
_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)
# 4th-order continuous extension (Shampine); columns multiply theta^1..theta^4
_P = np.array(
    [
        [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

COMPLETED = "completed"
DIVERGED = "diverged"
CONDITION_LOST = "condition_lost"
STEP_UNDERFLOW = "step_underflow"
MAX_STEPS = "max_steps"


@dataclass(frozen=True)
class SolveSpec:
    t0: float = 0.0
    t_end: float = 4.0
    rel_tol: float = 1e-8
    abs_tol: float = 1e-8
    sample_times: tuple[float, ...] | None = None  # None: (t0, t_end)
    max_steps: int = 10_000_000
    safety: float = 0.9
    min_factor: float = 0.2
    max_factor: float = 10.0
    pi_beta: float = 0.04
    h_init: float | None = None
    h_min_rel: float = 1e-13

    def __post_init__(self):
        if not self.t_end > self.t0:
            raise ValueError("t_end must exceed t0")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        ts = self.samples()
        if np.any(np.diff(ts) <= 0):
            raise ValueError("sample_times must be strictly increasing")
        if ts[0] < self.t0 or ts[-1] > self.t_end:
            raise ValueError("sample_times must lie in [t0, t_end]")

    def samples(self) -> np.ndarray:
        if self.sample_times is None:
            return np.array([self.t0, self.t_end])
        return np.asarray(self.sample_times, dtype=float)


@dataclass
class StepStats:
    accepted: int = 0
    rejected: int = 0
    nfev: int = 0
    dt_min: float = np.inf
    dt_max: float = 0.0


@dataclass
class Trajectory:
    times: list[float] = field(default_factory=list)
    states: list[np.ndarray] = field(default_factory=list)
    stats: StepStats = field(default_factory=StepStats)
    status: str = COMPLETED
    t_fail: Optional[float] = None

    @property
    def completed(self) -> bool:
        return self.status == COMPLETED

    def at(self, t: float) -> np.ndarray:
        """State stored at sample time ``t``."""
        i = int(np.argmin(np.abs(np.asarray(self.times) - t)))
        if not np.isclose(self.times[i], t, rtol=0, atol=1e-12 * max(1.0, abs(t))):
            raise KeyError(f"no sample at t={t}")
        return self.states[i]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def _error_norm(err, y, y_new, spec: SolveSpec) -> float:
    scale = spec.abs_tol + spec.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def _initial_step(rhs, t0, y0, f0, spec: SolveSpec) -> float:
    # Hairer, Norsett & Wanner, Solving ODEs I, II.4
    scale = spec.abs_tol + spec.rel_tol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    span = spec.t_end - spec.t0
    h0 = min(h0, span)
    f1 = rhs(t0 + h0, y0 + h0 * f0)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, span)


def integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    spec: SolveSpec,
    monitor: Callable[[float, np.ndarray], bool] | None = None,
) -> Trajectory:
    """Integrate y' = rhs(t, y) and record states at ``spec.sample_times``.

    ``monitor(t, y)`` is called after every accepted step; returning False
    stops the run with status ``condition_lost``.
    """
    y = np.array(y0, dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError("initial state must be finite")
    traj = Trajectory()
    stats = traj.stats
    samples = spec.samples()
    si = 0
    t = spec.t0
    while si < len(samples) and samples[si] <= t:
        traj.times.append(float(samples[si]))
        traj.states.append(y.copy())
        si += 1

    f = rhs(t, y)
    stats.nfev += 1
    h = spec.h_init or _initial_step(rhs, t, y, f, spec)
    stats.nfev += 1
    expo = 0.2 - 0.75 * spec.pi_beta
    err_old = 1e-4
    rejected_last = False
    K = np.empty((7,) + y.shape)

    while si < len(samples):
        if stats.accepted + stats.rejected >= spec.max_steps:
            traj.status, traj.t_fail = MAX_STEPS, t
            break
        h_min = spec.h_min_rel * max(1.0, abs(t))
        if h < h_min:
            traj.status, traj.t_fail = STEP_UNDERFLOW, t
            log.warning("step size underflow at t=%g", t)
            break
        last = h >= spec.t_end - t
        if last:
            h = spec.t_end - t

        K[0] = f
        for s in range(1, 7):
            dy = np.tensordot(_A[s], K[:s], axes=(0, 0))
            K[s] = rhs(t + _C[s] * h, y + h * dy)
        stats.nfev += 6
        y_new = y + h * np.tensordot(_B[:6], K[:6], axes=(0, 0))
        err = _error_norm(h * np.tensordot(_E, K, axes=(0, 0)), y, y_new, spec)

        if not np.isfinite(err) or not np.all(np.isfinite(y_new)):
            # a shorter step may still recover; give up only at the floor
            stats.rejected += 1
            h *= spec.min_factor
            if h < h_min:
                traj.status, traj.t_fail = DIVERGED, t
                break
            rejected_last = True
            continue

        if err <= 1.0:
            t_new = spec.t_end if last else t + h
            if monitor is not None and not monitor(t_new, y_new):
                # samples inside this step are dropped with the offending state
                stats.accepted += 1
                traj.status, traj.t_fail = CONDITION_LOST, t_new
                break
            while si < len(samples) and samples[si] <= t_new + 1e-14 * max(1.0, abs(t_new)):
                ts = samples[si]
                if np.isclose(ts, t_new, rtol=1e-14, atol=0):
                    traj.states.append(y_new.copy())
                else:
                    theta = (ts - t) / h
                    powers = theta ** np.arange(1, 5)
                    coef = _P @ powers
                    traj.states.append(y + h * np.tensordot(coef, K, axes=(0, 0)))
                traj.times.append(float(ts))
                si += 1
            stats.accepted += 1
            stats.dt_min = min(stats.dt_min, h)
            stats.dt_max = max(stats.dt_max, h)
            t, y, f = t_new, y_new, K[6].copy()
            fac = spec.safety * max(err, 1e-10) ** (-expo) * err_old**spec.pi_beta
            fac = min(spec.max_factor, max(spec.min_factor, fac))
            if rejected_last:
                fac = min(fac, 1.0)
            h *= fac
            err_old = max(err, 1e-4)
            rejected_last = False
        else:
            stats.rejected += 1
            h *= max(spec.min_factor, spec.safety * err ** (-0.2))
            rejected_last = True

    return traj
