"""Dimensionless parameters of the two-layer shallow-water models."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace


def derive_rho(gamma: float, delta: float) -> float:
    """Density-contrast parameter sqrt((1 - gamma) / (gamma + delta))."""
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma!r}")
    if not delta > 0.0 or not math.isfinite(delta):
        raise ValueError(f"delta must be positive, got {delta!r}")
    return math.sqrt((1.0 - gamma) / (gamma + delta))


@dataclass(frozen=True)
class Params:
    """Parameter set (gamma, delta, epsilon, alpha).

    ``alpha`` defaults to ``rho``; pass it explicitly to exercise the general
    scaling. No admissibility checks happen here, see :func:`validate`.
    """

    gamma: float
    delta: float
    epsilon: float = 1.0
    alpha: float | None = field(default=None)

    def __post_init__(self):
        if self.alpha is None:
            try:
                alpha = derive_rho(self.gamma, self.delta)
            except ValueError:
                alpha = math.nan  # reported by validate()
            object.__setattr__(self, "alpha", alpha)

    @property
    def rho(self) -> float:
        return derive_rho(self.gamma, self.delta)

    @property
    def c_fast(self) -> float:
        """Rescaled barotropic wave speed sqrt(1 + 1/delta)."""
        return math.sqrt(1.0 + 1.0 / self.delta)

    @property
    def pressure_coef(self) -> float:
        """(delta + gamma) / (1 - gamma); infinite in the rigid-lid limit."""
        return (self.delta + self.gamma) / (1.0 - self.gamma)

    def normalized(self) -> "Params":
        """Same fluids with epsilon = 1 and alpha = rho."""
        return replace(self, epsilon=1.0, alpha=self.rho)

    @property
    def alpha_is_rho(self) -> bool:
        return math.isclose(self.alpha, self.rho, rel_tol=1e-12, abs_tol=1e-15)


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    violations: tuple[str, ...] = ()

    def __bool__(self):
        return self.accepted


def validate(
    params: Params,
    delta_min: float = 0.1,
    delta_max: float = 10.0,
    gamma_min: float = 0.5,
) -> Verdict:
    """Check membership of the admissible parameter set, listing every violation."""
    p = params
    bad = []
    if not 0.0 < p.gamma < 1.0:
        bad.append(f"0 < gamma < 1 violated (gamma={p.gamma})")
    if p.gamma < gamma_min:
        bad.append(f"gamma >= gamma_min violated (gamma={p.gamma}, gamma_min={gamma_min})")
    if not delta_min <= p.delta <= delta_max:
        bad.append(f"delta in [{delta_min}, {delta_max}] violated (delta={p.delta})")
    if not 0.0 < p.epsilon <= 1.0:
        bad.append(f"0 < epsilon <= 1 violated (epsilon={p.epsilon})")
    if not 0.0 <= p.alpha <= 1.0:
        bad.append(f"0 <= alpha <= 1 violated (alpha={p.alpha})")
    return Verdict(not bad, tuple(bad))
