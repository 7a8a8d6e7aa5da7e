"""Free-surface vs rigid-lid two-layer shallow water: simulation and rate studies."""

from .approx import ApproximantKind, assemble
from .config import ExperimentConfig, load_config
from .diagnostics import ErrorTable, RateFit, compare, fit_rate
from .integrator import SolveSpec, Trajectory, integrate
from .params import Params, derive_rho, validate
from .spectral import Grid
from .systems import StateRL, StateU, StateV

__all__ = [
    "ApproximantKind",
    "ErrorTable",
    "ExperimentConfig",
    "Grid",
    "Params",
    "RateFit",
    "SolveSpec",
    "StateRL",
    "StateU",
    "StateV",
    "Trajectory",
    "assemble",
    "compare",
    "derive_rho",
    "fit_rate",
    "integrate",
    "load_config",
    "validate",
]
