"""Permittivity models evaluated at imaginary (Matsubara) frequencies.

Every model returns real numbers: on the imaginary axis ``omega = i xi`` the
response functions of passive media are real. Gyrotropic media are described
by a tensor with the gyrotropy axis along z::

    eps = [[eps1,  g,    0],
           [-g,    eps1, 0],
           [0,     0,    eps2]]

Parameters may be scalars or numpy arrays; frequency arguments broadcast.
"""
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError, SingularMediumError
from .quantities import CONSTANTS

__all__ = [
    "PermittivityTensor",
    "SiliconParams",
    "MagnetoPlasmaParams",
    "WeylParams",
    "IsotropicParams",
    "IdealPlate",
    "invert_permittivity",
    "silicon_epsilon",
    "magneto_plasma_tensor",
    "weyl_tensor",
    "omega_b_from_node_separation",
]


def _positive_xi(xi):
    xi = np.asarray(xi, dtype=float)
    if np.any(~(xi > 0)):
        raise DomainError("imaginary frequency xi must be strictly positive")
    return xi


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def invert_permittivity(eps1, eps2, g):
    """Inverse-tensor coefficients ``(d1, d2, gprime)`` of the gyrotropic tensor.

    The inverse has the same block shape with d1 = eps1/(eps1^2+g^2),
    d2 = 1/eps2 and gprime = -g/(eps1^2+g^2).
    """
    eps1 = np.asarray(eps1, dtype=float)
    eps2 = np.asarray(eps2, dtype=float)
    g = np.asarray(g, dtype=float)
    if np.any(eps2 == 0):
        raise SingularMediumError("eps2 = 0: permittivity tensor is singular")
    den = eps1 * eps1 + g * g
    if np.any(den == 0):
        raise SingularMediumError("eps1 = g = 0: permittivity tensor is singular")
    return _scalar(eps1 / den), _scalar(1.0 / eps2), _scalar(-g / den)


@dataclass(frozen=True)
class PermittivityTensor:
    eps1: object
    eps2: object
    g: object
    d1: object = field(init=False)
    d2: object = field(init=False)
    gprime: object = field(init=False)

    def __post_init__(self):
        d1, d2, gp = invert_permittivity(self.eps1, self.eps2, self.g)
        object.__setattr__(self, "d1", d1)
        object.__setattr__(self, "d2", d2)
        object.__setattr__(self, "gprime", gp)

    @classmethod
    def isotropic(cls, eps):
        return cls(eps, eps, np.zeros_like(np.asarray(eps, dtype=float)))

    def flipped(self):
        """Same medium with the gyrotropy axis reversed (g -> -g)."""
        return PermittivityTensor(self.eps1, self.eps2, -np.asarray(self.g))

    def matrix(self):
        """3x3 (or ...x3x3) permittivity matrix."""
        return _block(self.eps1, self.eps2, self.g)

    def inverse_matrix(self):
        return _block(self.d1, self.d2, self.gprime)


def _block(a, b, g):
    a, b, g = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, g)))
    m = np.zeros(a.shape + (3, 3))
    m[..., 0, 0] = a
    m[..., 1, 1] = a
    m[..., 2, 2] = b
    m[..., 0, 1] = g
    m[..., 1, 0] = -g
    return m


@dataclass(frozen=True)
class SiliconParams:
    """Drude-Lorentz silicon; defaults are the values used for the Fig. 2 runs."""

    eps_inf: float = 1.035
    eps_0s: float = 11.87
    omega_0: float = 6.6e15
    omega_p: float = 3.6151e14
    gamma: float = 7.868e13

    def __post_init__(self):
        if not self.eps_0s > self.eps_inf >= 1:
            raise DomainError("silicon requires eps_0s > eps_inf >= 1")
        if not self.omega_0 > 0:
            raise DomainError("silicon resonance omega_0 must be positive")
        if self.omega_p < 0 or self.gamma < 0:
            raise DomainError("silicon omega_p and gamma must be non-negative")

    gyrotropic = False

    def epsilon(self, xi):
        return silicon_epsilon(self, xi)


def silicon_epsilon(p, xi):
    xi = _positive_xi(xi)
    lorentz = (p.eps_0s - p.eps_inf) * p.omega_0 ** 2 / (xi ** 2 + p.omega_0 ** 2)
    drude = p.omega_p ** 2 / (xi * (xi + p.gamma))
    return _scalar(p.eps_inf + lorentz + drude)


@dataclass(frozen=True)
class MagnetoPlasmaParams:
    """Magnetized free-carrier gas on a background eps_b."""

    eps_b: float
    omega_p: float
    omega_c: float
    gamma: float = 0.0

    def __post_init__(self):
        if self.omega_p < 0 or self.omega_c < 0 or self.gamma < 0:
            raise DomainError("magneto-plasma frequencies must be non-negative")
        if self.eps_b < 1:
            raise DomainError("background permittivity eps_b must be >= 1")

    gyrotropic = True

    def tensor(self, xi):
        return magneto_plasma_tensor(self, xi)


def magneto_plasma_tensor(p, xi):
    """Magneto-plasma tensor at imaginary frequency xi (s^-1).

    eps1 = eps_b + wp^2 (1 + G/xi) / ((xi+G)^2 + wc^2)
    eps2 = eps_b + wp^2 / (xi (xi+G))
    g    = -wp^2 (wc/xi) / ((xi+G)^2 + wc^2)
    """
    xi = _positive_xi(xi)
    wp2 = p.omega_p ** 2
    den = (xi + p.gamma) ** 2 + p.omega_c ** 2
    eps1 = p.eps_b + wp2 * (1.0 + p.gamma / xi) / den
    eps2 = p.eps_b + wp2 / (xi * (xi + p.gamma))
    g = -wp2 * (p.omega_c / xi) / den
    return PermittivityTensor(_scalar(eps1), _scalar(eps2), _scalar(g))


def omega_b_from_node_separation(b):
    """Anomalous-Hall frequency e^2 b / (2 pi^2 hbar eps0) for node separation b in m^-1."""
    if not b > 0:
        raise DomainError("Weyl node separation must be positive")
    return CONSTANTS.e ** 2 * b / (2.0 * math.pi ** 2 * CONSTANTS.hbar * CONSTANTS.eps0)


@dataclass(frozen=True)
class WeylParams:
    """Ideal Weyl semimetal with node separation along z (chiral magnetic term dropped)."""

    eps_w: float
    omega_b: float

    def __post_init__(self):
        if not self.omega_b > 0:
            raise DomainError("omega_b must be positive")
        if not self.eps_w > 0:
            raise DomainError("eps_w must be positive")

    gyrotropic = True

    @classmethod
    def from_node_separation(cls, eps_w, b):
        return cls(eps_w, omega_b_from_node_separation(b))

    def tensor(self, xi):
        return weyl_tensor(self, xi)


def weyl_tensor(p, xi):
    xi = _positive_xi(xi)
    g = p.omega_b / xi
    eps = np.full_like(xi, p.eps_w)
    return PermittivityTensor(_scalar(eps), _scalar(eps), _scalar(g))


@dataclass(frozen=True)
class IsotropicParams:
    """Frequency-independent isotropic dielectric."""

    eps: float

    def __post_init__(self):
        if not self.eps >= 1:
            raise DomainError("isotropic eps must be >= 1")

    gyrotropic = False

    def epsilon(self, xi):
        xi = _positive_xi(xi)
        return _scalar(np.full_like(xi, self.eps))


class IdealPlate(str, Enum):
    PERFECT_CONDUCTOR = "perfect_conductor"
    INFINITELY_PERMEABLE = "infinitely_permeable"
