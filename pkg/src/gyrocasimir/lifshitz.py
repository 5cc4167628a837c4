r"""Lifshitz free energy and pressure between two half-space plates.

The loop determinant :math:`L = \det(1 - R_1 R_2 e^{-2k_1 d})` is integrated
over the in-plane wavevector and summed over Matsubara frequencies:

.. math::

    P = k_B T {\sum_n}' \int \frac{k\,dk}{2\pi}\Big[-\frac{\partial \ln L}{\partial d}\Big],
    \qquad
    \frac{E}{A} = k_B T {\sum_n}' \int \frac{k\,dk}{2\pi} \ln L .

Positive pressure is repulsive. Both gyrotropy axes are normal to the plates,
so L depends on |k| only and the in-plane integral is radial.

The radial integral runs over :math:`s = 2(k_1 - \xi/c)d`, which turns the
vacuum factor into :math:`e^{-2\xi d/c}e^{-s}` and makes the panel layout
independent of frequency and distance.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConvergenceError, DomainError, ModeInstabilityError
from .quadrature import adaptive_gk15
from .quantities import CONSTANTS, DEFAULT_XI0_FRACTION, build_grid, geometric_tail
from .reflection import Axis, Face, Plate, plate_reflection

__all__ = [
    "PlateSystem",
    "LoopFactors",
    "PressureResult",
    "loop_factors",
    "log_det_derivative",
    "log_det",
    "pressure_integrand",
    "pressure",
    "free_energy",
    "zero_temperature_pressure",
    "zero_temperature_free_energy",
]

S_CUT = 50.0
S_BREAKS = (0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, S_CUT)
CHUNK = 64
N_CAP = 200_000
IMAG_RTOL = 1e-10
ABS_FLOOR = 1e-15


@dataclass(frozen=True)
class PlateSystem:
    """Lower plate (medium at z < 0), upper plate, temperature.

    The gap is not stored here; every calculation takes it as an argument so
    one system can be swept over distance.
    """

    plate1: Plate
    plate2: Plate
    temperature: float = 200.0
    xi0_fraction: float = DEFAULT_XI0_FRACTION
    n_cap: int = N_CAP

    def __post_init__(self):
        if not self.temperature > 0:
            raise DomainError(f"temperature must be positive, got {self.temperature!r}")

    @classmethod
    def from_materials(cls, material1, material2, orientation="parallel", **kwargs):
        """Build a system whose gyrotropy axes are parallel or antiparallel."""
        if orientation == "parallel":
            axis2 = Axis.PLUS_Z
        elif orientation == "antiparallel":
            axis2 = Axis.MINUS_Z
        else:
            raise DomainError(f"orientation must be parallel or antiparallel, got {orientation!r}")
        return cls(Plate(material1), Plate(material2, axis2), **kwargs)

    def reflections(self, k_x, xi):
        """(R1, R2) as seen from the gap."""
        return (plate_reflection(self.plate1, Face.LOWER, k_x, xi),
                plate_reflection(self.plate2, Face.UPPER, k_x, xi))


@dataclass(frozen=True)
class LoopFactors:
    D1: object
    D2: object
    D3: object
    D4: object
    L: object
    k1: object
    x: object


def loop_factors(R1, R2, k1, d):
    """Expand det(1 - R1 R2 x) with x = exp(-2 k1 d).

    Raises
    ------
    ModeInstabilityError
        if L is not positive somewhere (non-physical reflection input)
    """
    if not d > 0:
        raise DomainError(f"gap distance must be positive, got {d!r}")
    k1 = np.asarray(k1, dtype=float)
    if np.any(~(k1 > 0)):
        raise DomainError("k1 must be positive")
    D1 = np.asarray(R1.rss * R2.rss + R1.rsp * R2.rps, dtype=complex)
    D2 = np.asarray(R1.rss * R2.rsp + R1.rsp * R2.rpp, dtype=complex)
    D3 = np.asarray(R1.rps * R2.rss + R1.rpp * R2.rps, dtype=complex)
    D4 = np.asarray(R1.rps * R2.rsp + R1.rpp * R2.rpp, dtype=complex)
    x = np.exp(-2.0 * k1 * d)
    L = 1.0 - (D1 + D4) * x + (D1 * D4 - D2 * D3) * x * x
    if np.any(L.real <= 0):
        raise ModeInstabilityError("loop determinant L <= 0: reflection input is not passive")
    return LoopFactors(D1, D2, D3, D4, L, k1, x)


def _real(z, what):
    z = np.asarray(z)
    if np.iscomplexobj(z):
        if np.any(np.abs(z.imag) > IMAG_RTOL * np.maximum(np.abs(z), 1e-300)):
            raise ModeInstabilityError(f"{what} has a non-negligible imaginary part")
        z = z.real
    return z


def log_det_derivative(f):
    r"""Analytic :math:`-\partial_d \ln L`, in m^-1 (real part)."""
    trace = f.D1 + f.D4
    det = f.D1 * f.D4 - f.D2 * f.D3
    val = (-2.0 * f.k1 / f.L) * (trace * f.x - 2.0 * det * f.x * f.x)
    return _real(val, "-dlnL/dd")


def log_det(f):
    """ln L computed without cancellation for L close to 1."""
    trace = f.D1 + f.D4
    det = f.D1 * f.D4 - f.D2 * f.D3
    arg = _real(-trace * f.x + det * f.x * f.x, "L - 1")
    return np.log1p(arg)


def pressure_integrand(system, n, k_x, d, weighted=True):
    r"""Integrand of the radial integral at Matsubara index ``n``.

    Returns :math:`k_x[-\partial_d \ln L]` (``weighted=True``) or the bare
    :math:`-\partial_d \ln L`, in m^-2 or m^-1. The n = 0 term uses the
    system's regularized zero frequency.
    """
    if n < 0:
        raise DomainError(f"Matsubara index must be >= 0, got {n}")
    grid = build_grid(system.temperature, n_cap=max(n, 1), xi0_fraction=system.xi0_fraction)
    xi = grid.frequencies[n]
    kx = np.asarray(k_x, dtype=float)
    k1 = np.hypot(kx, xi / CONSTANTS.c)
    R1, R2 = system.reflections(kx, xi)
    val = log_det_derivative(loop_factors(R1, R2, k1, d))
    return kx * val if weighted else val


def _radial(system, kappa, d, rtol, energy):
    """Per-frequency radial integrals of k dk/(2pi) [-dlnL/dd] (and ln L).

    Returns value, error, abs_value with shape (C, nf), C = 1 or 2.
    """
    kappa = np.asarray(kappa, dtype=float)[:, None]
    xi = kappa * CONSTANTS.c

    def fun(s):
        t = s[None, :] / (2.0 * d)
        k1 = kappa + t
        kx = np.sqrt(t * (2.0 * kappa + t))
        R1, R2 = system.reflections(kx, xi)
        f = loop_factors(R1, R2, k1, d)
        jac = k1 / (2.0 * d) / (2.0 * math.pi)
        out = [jac * log_det_derivative(f)]
        if energy:
            out.append(jac * log_det(f))
        return np.stack(np.broadcast_arrays(*out))

    # noise floor on the scale of ideal-conductor integrals (1/d^3, 1/d^2)
    atol = ABS_FLOOR * np.array([d ** -3, d ** -2])[: 2 if energy else 1, None]
    return adaptive_gk15(fun, S_BREAKS, rtol, atol=atol)


def _radial_chunked(system, kappa, d, rtol, energy, workers):
    chunks = [kappa[i:i + CHUNK] for i in range(0, len(kappa), CHUNK)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _radial(system, c, d, rtol, energy), chunks))
    else:
        parts = [_radial(system, c, d, rtol, energy) for c in chunks]
    # results are concatenated in frequency order whatever the thread timing
    return tuple(np.concatenate([p[i] for p in parts], axis=-1) for i in range(3))


@dataclass(frozen=True)
class PressureResult:
    """Pressure (Pa) and free energy per area (J/m^2) at one gap distance.

    ``per_n_contributions`` holds the pressure terms k_B T w_n I_n in Pa.
    ``quadrature_error_estimate`` adds the summed quadrature error and the
    Matsubara tail magnitude.
    """

    distance: float
    pressure: float
    energy_per_area: float
    n_terms_used: int
    quadrature_error_estimate: float
    per_n_contributions: np.ndarray = field(repr=False)
    tail_estimate: float = 0.0
    abs_scale: float = 0.0
    converged: bool = True


def _thermal(system, d, tol, energy, workers):
    if not d > 0:
        raise DomainError(f"gap distance must be positive, got {d!r}")
    if not 0 < tol < 1:
        raise DomainError(f"tol must lie in (0, 1), got {tol!r}")
    T = system.temperature
    kT = CONSTANTS.k_B * T
    grid = build_grid(T, tol, system.n_cap, distance=d, xi0_fraction=system.xi0_fraction)
    qtol = tol / 10.0
    nq = 2 if energy else 1
    # absolute floor: ideal-conductor magnitudes at this gap times 1e-15, so
    # a sum of rounding noise (e.g. vacuum plates) still counts as converged
    ideal = CONSTANTS.hbar * CONSTANTS.c * math.pi ** 2 / 240.0 / d ** 4
    floor = ABS_FLOOR * np.array([ideal, ideal * d / 3.0])[:nq]
    vals = np.zeros((nq, 0))
    errs = np.zeros((nq, 0))
    absv = np.zeros((nq, 0))
    while True:
        start = vals.shape[1]
        kappa = grid.frequencies[start:] / CONSTANTS.c
        v, e, a = _radial_chunked(system, kappa, d, qtol, energy, workers)
        w = kT * grid.weights[start:]
        vals = np.concatenate([vals, v * w], axis=1)
        errs = np.concatenate([errs, e * w], axis=1)
        absv = np.concatenate([absv, a * w], axis=1)
        tails = np.array([geometric_tail(list(row[-2:])) for row in vals])
        scale = np.abs(vals).sum(axis=1)
        last = np.abs(vals[:, -1])
        limit = np.maximum(0.1 * tol * scale, floor)
        ok = (np.abs(tails) <= limit) & (last <= limit)
        done = bool(np.all(ok))
        if done or grid.n_max >= system.n_cap:
            break
        grid = grid.extended(min(2 * grid.n_max, system.n_cap))
    tails = np.where(np.isfinite(tails), tails, 0.0)
    result = PressureResult(
        distance=d,
        pressure=float(vals[0].sum() + tails[0]),
        energy_per_area=float(vals[1].sum() + tails[1]) if energy else math.nan,
        n_terms_used=vals.shape[1],
        quadrature_error_estimate=float(errs[0].sum() + abs(tails[0])),
        per_n_contributions=vals[0].copy(),
        tail_estimate=float(tails[0]),
        abs_scale=float(absv[0].sum()),
        converged=done,
    )
    if not done:
        raise ConvergenceError(
            f"Matsubara sum not converged at n_cap={system.n_cap} (d={d:.4g} m)",
            partial=result,
        )
    return result


def pressure(system, d, tol=1e-6, *, energy=True, workers=1):
    """Casimir pressure at gap ``d`` (m), positive when repulsive.

    Parameters
    ----------
    system : PlateSystem
    d : float
        gap distance, m
    tol : float
        relative tolerance; the quadrature error is held below ``tol/10`` of
        the integral of |integrand| and the Matsubara sum stops when both
        the last term and the geometric tail fall below ``tol/10`` of the
        summed |terms|
    energy : bool
        also compute the free energy per area on the same nodes
    workers : int
        threads used over frequency chunks; results do not depend on it

    Returns
    -------
    PressureResult

    Raises
    ------
    ConvergenceError
        with the partial :class:`PressureResult` attached as ``.partial``
    """
    return _thermal(system, d, tol, energy, workers)


def free_energy(system, d, tol=1e-6, *, workers=1):
    """Casimir free energy per unit area at gap ``d``, J/m^2."""
    return _thermal(system, d, tol, True, workers).energy_per_area


T_BREAKS = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, S_CUT)


def _zero_t(system, d, tol, energy, workers):
    if not d > 0:
        raise DomainError(f"gap distance must be positive, got {d!r}")
    flat = replace(system, temperature=1.0)  # temperature is unused below

    def fun(t):
        # t = 2 xi d / c
        kappa = t / (2.0 * d)
        v, _, _ = _radial_chunked(flat, kappa, d, tol / 100.0, energy, workers)
        return v

    v, e, _ = adaptive_gk15(fun, T_BREAKS, tol / 10.0)
    # (hbar / 2pi) dxi with dxi = c dt / (2d)
    pref = CONSTANTS.hbar / (2.0 * math.pi) * CONSTANTS.c / (2.0 * d)
    return pref * v, pref * e


def zero_temperature_pressure(system, d, tol=1e-6, *, workers=1):
    """Pressure at T = 0 with the Matsubara sum replaced by a frequency integral, Pa."""
    v, _ = _zero_t(system, d, tol, False, workers)
    return float(v[0])


def zero_temperature_free_energy(system, d, tol=1e-6, *, workers=1):
    """Free energy per unit area at T = 0, J/m^2."""
    v, _ = _zero_t(system, d, tol, True, workers)
    return float(v[1])
