"""Physical constants, unit conversion and Matsubara frequency grids.

All frequencies are angular and expressed in s^-1; wavevectors are in m^-1.
Electromagnetic formulas only ever see frequencies through ``xi / c``.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy import constants as _sc

from .errors import DomainError

__all__ = [
    "CONSTANTS",
    "PhysicalConstants",
    "MatsubaraGrid",
    "THZ",
    "DEFAULT_XI0_FRACTION",
    "thz",
    "matsubara_frequency",
    "first_matsubara_frequency",
    "build_grid",
    "vacuum_decay",
    "geometric_tail",
]

THZ = 1.0e12
DEFAULT_XI0_FRACTION = 1.0e-6


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float
    k_B: float
    c: float
    eps0: float
    e: float


CONSTANTS = PhysicalConstants(
    hbar=_sc.hbar, k_B=_sc.k, c=_sc.c, eps0=_sc.epsilon_0, e=_sc.e
)


def thz(value):
    """Convert a frequency given in THz to s^-1 (1 THz = 1e12 s^-1)."""
    return value * THZ


def first_matsubara_frequency(T):
    if not T > 0:
        raise DomainError(f"temperature must be positive, got {T!r}")
    return 2.0 * math.pi * CONSTANTS.k_B * T / CONSTANTS.hbar


def matsubara_frequency(n, T, xi0_regularization=None):
    r"""Matsubara frequency :math:`\xi_n = 2\pi n k_B T/\hbar`.

    Parameters
    ----------
    n : int
        non-negative Matsubara index
    T : float
        temperature in K
    xi0_regularization : float, optional
        value returned for ``n = 0``; defaults to
        ``DEFAULT_XI0_FRACTION * xi_1``

    Returns
    -------
    float
        frequency in s^-1
    """
    xi1 = first_matsubara_frequency(T)
    if n < 0:
        raise DomainError(f"Matsubara index must be >= 0, got {n}")
    if n == 0:
        return DEFAULT_XI0_FRACTION * xi1 if xi0_regularization is None else xi0_regularization
    return n * xi1


@dataclass(frozen=True)
class MatsubaraGrid:
    """Matsubara frequencies 0..n_max with the primed-sum weights.

    ``frequencies[0]`` holds the regularized zero frequency, never 0 itself.
    """

    temperature: float
    frequencies: np.ndarray
    weights: np.ndarray
    xi0_regularization: float

    @property
    def n_max(self):
        return len(self.frequencies) - 1

    @property
    def xi1(self):
        return first_matsubara_frequency(self.temperature)

    def indices(self):
        return np.arange(len(self.frequencies))

    def extended(self, n_max):
        """Return a grid with indices 0..n_max (n_max may shrink the grid too)."""
        return _make_grid(self.temperature, n_max, self.xi0_regularization)


def _make_grid(T, n_max, xi0):
    xi1 = first_matsubara_frequency(T)
    n = np.arange(n_max + 1, dtype=float)
    freqs = n * xi1
    freqs[0] = xi0
    weights = np.ones(n_max + 1)
    weights[0] = 0.5
    freqs.setflags(write=False)
    weights.setflags(write=False)
    return MatsubaraGrid(T, freqs, weights, xi0)


def build_grid(T, rel_tol=1e-6, n_cap=100_000, *, distance=None,
               xi0_fraction=DEFAULT_XI0_FRACTION):
    """Build a Matsubara grid sized for a given gap.

    With ``distance`` the grid is cut where the vacuum propagation factor
    ``exp(-2 xi_n d / c)`` falls below ``rel_tol``, which bounds the tail of
    the pressure sum for any passive pair of plates. Without it the grid
    runs to ``n_cap``. The cap always wins; callers that find the tail
    estimate still too large extend the grid with :meth:`MatsubaraGrid.extended`.
    """
    if not T > 0:
        raise DomainError(f"temperature must be positive, got {T!r}")
    if not 0 < rel_tol < 1:
        raise DomainError(f"rel_tol must lie in (0, 1), got {rel_tol!r}")
    if n_cap < 1:
        raise DomainError(f"n_cap must be >= 1, got {n_cap!r}")
    if not xi0_fraction > 0:
        raise DomainError("xi0 regularization must be positive")
    xi1 = first_matsubara_frequency(T)
    if distance is None:
        n_max = n_cap
    else:
        if not distance > 0:
            raise DomainError(f"distance must be positive, got {distance!r}")
        step = 2.0 * xi1 * distance / CONSTANTS.c
        n_max = min(n_cap, max(1, math.ceil(math.log(1.0 / rel_tol) / step) + 1))
    return _make_grid(T, n_max, xi0_fraction * xi1)


def vacuum_decay(k, xi):
    """Decay constant k1 = sqrt(k^2 + (xi/c)^2) of an evanescent vacuum wave."""
    k = np.asarray(k, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if np.any(k < 0) or np.any(xi < 0):
        raise DomainError("k and xi must be non-negative")
    if np.any((k == 0) & (xi == 0)):
        raise DomainError("vacuum decay undefined for k = xi = 0")
    k1 = np.hypot(k, xi / CONSTANTS.c)
    return k1 if k1.ndim else float(k1)


def geometric_tail(contributions):
    """Geometric extrapolation of the remainder of a decaying series.

    Uses the ratio of the last two terms. Returns ``inf`` when the series
    does not (yet) look geometrically convergent.
    """
    if len(contributions) < 2:
        return math.inf
    last, prev = contributions[-1], contributions[-2]
    if last == 0:
        return 0.0
    if prev == 0:
        return math.inf
    ratio = last / prev
    if not 0 <= ratio < 1:
        # oscillating or growing terms: bound by the last term magnitude only if shrinking
        return abs(last) if abs(ratio) < 1 else math.inf
    return last * ratio / (1.0 - ratio)
