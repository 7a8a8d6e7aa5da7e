"""Fourier pseudo-spectral kernels on a uniform periodic grid.

Fields are plain 1-D float arrays holding nodal values; the grid carries the
wavenumbers and performs every transform.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


class NonFiniteFieldError(FloatingPointError):
    pass


@dataclass(frozen=True)
class Grid:
    """Nodes x_j = x_min + j*dx, j = 0..n-1, on the periodic interval [x_min, x_max)."""

    x_min: float = -100.0
    x_max: float = 100.0
    n: int = 2000

    def __post_init__(self):
        if self.n < 4 or self.n % 2:
            raise ValueError(f"grid size must be even and >= 4, got {self.n}")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        return self.length / self.n

    @cached_property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    @cached_property
    def k(self) -> np.ndarray:
        """Non-negative wavenumbers of the real transform; last entry is Nyquist."""
        return 2.0 * np.pi * np.fft.rfftfreq(self.n, d=self.dx)

    @cached_property
    def _ik(self) -> np.ndarray:
        ik = 1j * self.k
        ik[-1] = 0.0  # Nyquist derivative mode
        return ik

    @cached_property
    def _mode_weights(self) -> np.ndarray:
        # rfft stores each interior mode once; its conjugate partner is implicit
        w = np.full(self.k.size, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        return w

    @cached_property
    def ref_index(self) -> int:
        """Index of the node nearest x = 0."""
        return int(np.argmin(np.abs(self.x)))

    def check(self, f: np.ndarray, name: str = "field") -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if f.shape != (self.n,):
            raise ValueError(f"{name} has shape {f.shape}, grid expects ({self.n},)")
        if not np.all(np.isfinite(f)):
            raise NonFiniteFieldError(f"{name} contains NaN or Inf")
        return f

    def zeros(self) -> np.ndarray:
        return np.zeros(self.n)

    def deriv(self, f: np.ndarray) -> np.ndarray:
        """Spectral d/dx."""
        f = self.check(f)
        return np.fft.irfft(self._ik * np.fft.rfft(f), n=self.n)

    @cached_property
    def _ik_dealiased(self) -> np.ndarray:
        ik = self._ik.copy()
        ik[self.k > (2.0 / 3.0) * self.k[-1]] = 0.0
        return ik

    def deriv_many(self, fs: np.ndarray, dealias: bool = False) -> np.ndarray:
        """d/dx along the last axis of a stack of fields (no finiteness check).

        With ``dealias`` the 2/3-rule filter is applied in the same transform.
        """
        ik = self._ik_dealiased if dealias else self._ik
        return np.fft.irfft(ik * np.fft.rfft(fs, axis=-1), n=self.n, axis=-1)

    def translate(self, f: np.ndarray, shift: float) -> np.ndarray:
        """Return g(x) = f(x - shift), exact for band-limited periodic f."""
        fh = np.fft.rfft(np.asarray(f, dtype=float))
        return np.fft.irfft(fh * np.exp(-1j * self.k * shift), n=self.n)

    def antideriv(self, f: np.ndarray) -> np.ndarray:
        """F with F' = f and F = 0 at the node nearest x = 0.

        The mean of f integrates to a linear ramp, so F is not periodic
        unless f has zero mean.
        """
        f = self.check(f)
        fh = np.fft.rfft(f)
        mean = fh[0].real / self.n
        gh = np.zeros_like(fh)
        gh[1:-1] = fh[1:-1] / (1j * self.k[1:-1])
        F = np.fft.irfft(gh, n=self.n) + mean * self.x
        return F - F[self.ref_index]

    def sobolev_norm(self, f: np.ndarray, s: float = 0.0) -> float:
        """Discrete H^s norm with multiplier (1 + k^2)^(s/2)."""
        if s < 0:
            raise ValueError("regularity index must be non-negative")
        fh = np.fft.rfft(np.asarray(f, dtype=float))
        power = self._mode_weights * np.abs(fh) ** 2 * (1.0 + self.k**2) ** s
        return float(np.sqrt(power.sum() * self.dx / self.n))

    def l2_norm(self, f: np.ndarray) -> float:
        return float(np.sqrt(self.dx * np.sum(np.asarray(f) ** 2)))

    def integrate(self, f: np.ndarray) -> float:
        """Rectangle rule, spectrally accurate for smooth periodic integrands."""
        return float(self.dx * np.sum(f))

    def dealias(self, f: np.ndarray, enabled: bool = True) -> np.ndarray:
        """2/3-rule filter: zero every mode above two thirds of the Nyquist wavenumber."""
        f = np.asarray(f, dtype=float)
        if not enabled:
            return f
        fh = np.fft.rfft(f)
        fh[self.k > (2.0 / 3.0) * self.k[-1]] = 0.0
        return np.fft.irfft(fh, n=self.n)
