"""Conserved quantities, error metrics and convergence-rate fitting."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .params import Params
from .spectral import Grid
from .systems import StateRL, StateU, StateV

VARIABLES = ("zeta1", "zeta2", "us", "m")


# --- conserved quantities -------------------------------------------------

def energy_density(U: StateU, p: Params) -> np.ndarray:
    """Energy density relative to rest.

    The pressure part is p/eps^2 with the terms linear in (zeta1, zeta2)
    removed; those integrate to conserved masses, so the total is still
    conserved and is exactly quadratic in the surface and interface.
    """
    h1, h2 = U.depths(p)
    kinetic = 0.5 * p.gamma * h1 * U.u1**2 + 0.5 * h2 * U.u2**2
    potential = 0.5 * p.gamma * p.pressure_coef * p.alpha**2 * U.zeta1**2
    potential = potential + 0.5 * (p.gamma + p.delta) * U.zeta2**2
    return kinetic + potential


def total_energy(U: StateU, p: Params, grid: Grid) -> float:
    return grid.integrate(energy_density(U, p))


def momentum_density(U: StateU, p: Params) -> np.ndarray:
    h1, h2 = U.depths(p)
    return p.gamma * h1 * U.u1 + h2 * U.u2


def total_momentum(U: StateU, p: Params, grid: Grid) -> float:
    return grid.integrate(momentum_density(U, p))


def masses(U: StateU, grid: Grid) -> tuple[float, float]:
    return grid.integrate(U.zeta1), grid.integrate(U.zeta2)


def rl_energy(W: StateRL, p: Params, grid: Grid) -> float:
    """Quadratic energy of the rigid-lid system."""
    h1, h2 = W.depths(p)
    dens = (p.gamma + p.delta) * W.eta**2 + h1 * h2 * W.v**2 / (h1 + p.gamma * h2)
    return grid.integrate(dens)


def _drift(values, scale: float) -> float:
    q = np.asarray(values, dtype=float)
    return float(np.max(np.abs(q - q[0])) / max(abs(q[0]), scale, 1e-300))


@dataclass
class ConservationReport:
    times: np.ndarray
    mass1: np.ndarray
    mass2: np.ndarray
    momentum: np.ndarray
    energy: np.ndarray
    # magnitude floors for quantities whose initial value may vanish
    scales: dict = field(default_factory=dict)

    def drift(self, name: str) -> float:
        return _drift(getattr(self, name), self.scales.get(name, 0.0))

    @property
    def drifts(self) -> dict:
        return {k: self.drift(k) for k in ("mass1", "mass2", "momentum", "energy")}

    def within(self, mass_tol: float = 1e-8, momentum_tol: float = 1e-8, energy_tol: float = 1e-6) -> bool:
        d = self.drifts
        return (
            d["mass1"] <= mass_tol
            and d["mass2"] <= mass_tol
            and d["momentum"] <= momentum_tol
            and d["energy"] <= energy_tol
        )

    def to_dict(self) -> dict:
        return {
            "times": [float(t) for t in self.times],
            "mass1": self.mass1.tolist(),
            "mass2": self.mass2.tolist(),
            "momentum": self.momentum.tolist(),
            "energy": self.energy.tolist(),
            "drifts": self.drifts,
        }


def conservation_report(times, states, p: Params, grid: Grid) -> ConservationReport:
    """Conserved quantities along a sequence of stacked StateU arrays.

    Drifts of the masses and momentum are scaled by the largest integral of
    the absolute density over the samples, since their initial values are
    often exactly zero.
    """
    Us = [StateU(*s) for s in states]
    m1, m2, mom, en = [], [], [], []
    abs_scale = {"mass1": 0.0, "mass2": 0.0, "momentum": 0.0}
    for U in Us:
        a, b = masses(U, grid)
        m1.append(a)
        m2.append(b)
        md = momentum_density(U, p)
        mom.append(grid.integrate(md))
        en.append(total_energy(U, p, grid))
        abs_scale["mass1"] = max(abs_scale["mass1"], grid.integrate(np.abs(U.zeta1)))
        abs_scale["mass2"] = max(abs_scale["mass2"], grid.integrate(np.abs(U.zeta2)))
        abs_scale["momentum"] = max(abs_scale["momentum"], grid.integrate(np.abs(md)))
    return ConservationReport(
        np.asarray(times, dtype=float),
        np.array(m1),
        np.array(m2),
        np.array(mom),
        np.array(en),
        abs_scale,
    )


# --- error metrics --------------------------------------------------------

NORMALIZATIONS = ("initial", "self", "rms")


def _rms(f: np.ndarray) -> float:
    return float(np.sqrt(np.mean(f**2)))


def compare(
    exact: StateV,
    approx: StateV,
    grid: Grid,
    normalization: str = "initial",
    reference: StateV | None = None,
) -> tuple[float, float, float, float]:
    """Per-variable normalized discrete l2 errors (zeta1, zeta2, us, m).

    ``initial``: divide by the norm of ``reference`` (time-zero exact data);
    ``self``: divide by the norm of ``exact`` itself; ``rms``: plain
    root-mean-square. Reference variables with norm below
    1e-3*sqrt(n)*dx fall back to the root-mean-square.
    """
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {normalization!r}")
    if normalization == "initial" and reference is None:
        raise ValueError("initial normalization needs the time-zero reference state")
    ref = {"initial": reference, "self": exact}.get(normalization)
    floor = 1e-3 * math.sqrt(grid.n) * grid.dx
    out = []
    for name in VARIABLES:
        diff = getattr(exact, name) - getattr(approx, name)
        if ref is not None:
            r = grid.l2_norm(getattr(ref, name))
            if r > floor:
                out.append(grid.l2_norm(diff) / r)
                continue
        out.append(_rms(diff))
    return tuple(out)


def weighted_localization(f: np.ndarray, grid: Grid, sigma: float) -> float:
    """l2 norm of (1+x^2)^sigma f."""
    if not sigma > 0.5:
        raise ValueError("sigma must exceed 1/2")
    return grid.l2_norm((1.0 + grid.x**2) ** sigma * f)


# --- rate tables ----------------------------------------------------------

COLUMNS = ("gamma", "rho", "err_zeta1", "err_zeta2", "err_us", "err_m")


@dataclass
class ErrorTable:
    rows: list = field(default_factory=list)
    normalization: str = "initial"

    def add(self, gamma: float, rho: float, errors) -> None:
        if any(not e >= 0 for e in errors):
            raise ValueError("errors must be non-negative")
        self.rows.append((float(gamma), float(rho), *map(float, errors)))
        self.rows.sort(key=lambda r: -r[1])

    @property
    def rho(self) -> np.ndarray:
        return np.array([r[1] for r in self.rows])

    def errors(self, name: str) -> np.ndarray:
        j = 2 + VARIABLES.index(name)
        return np.array([r[j] for r in self.rows])

    def to_csv(self, header_lines=()) -> str:
        buf = io.StringIO()
        for line in header_lines:
            buf.write(f"# {line}\n")
        buf.write(f"# normalization = {self.normalization}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow([repr(v) for v in r])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ErrorTable":
        norm = "initial"
        lines = []
        for line in text.splitlines():
            if line.startswith("# normalization ="):
                norm = line.split("=", 1)[1].strip()
            elif not line.startswith("#"):
                lines.append(line)
        reader = csv.reader(lines)
        if tuple(next(reader)) != COLUMNS:
            raise ValueError("unexpected CSV columns")
        t = cls(normalization=norm)
        for r in reader:
            t.add(float(r[0]), float(r[1]), [float(v) for v in r[2:]])
        return t


@dataclass
class RateFit:
    slopes: dict
    intercepts: dict
    residuals: dict

    def to_dict(self) -> dict:
        return {"slopes": self.slopes, "intercepts": self.intercepts, "residuals": self.residuals}


def fit_rate(table: ErrorTable) -> RateFit:
    """Least-squares line through (ln rho, ln err) for each variable."""
    if len(table.rows) < 3:
        raise ValueError("rate fit needs at least 3 rows")
    x = np.log(table.rho)
    slopes, intercepts, residuals = {}, {}, {}
    for name in VARIABLES:
        e = table.errors(name)
        if np.any(e <= 0):
            raise ValueError(f"non-positive error for {name}; fit is degenerate")
        y = np.log(e)
        (a, b), res, *_ = np.polyfit(x, y, 1, full=True)
        slopes[name] = float(a)
        intercepts[name] = float(b)
        residuals[name] = float(res[0]) if len(res) else 0.0
    return RateFit(slopes, intercepts, residuals)
