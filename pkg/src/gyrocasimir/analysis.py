"""Benchmarks, repulsion diagnostics, distance sweeps and equilibrium search."""
import csv
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from . import lifshitz
from .errors import CasimirError, ConvergenceError, DomainError
from .quadrature import GK15_NODES, GK15_WEIGHTS
from .quantities import CONSTANTS, build_grid

__all__ = [
    "Stability",
    "Regime",
    "Equilibrium",
    "RepulsionDiagnostic",
    "PressureCurve",
    "IntegrandProfile",
    "ideal_benchmarks",
    "repulsion_diagnostic",
    "pressure_sweep",
    "find_equilibria",
    "integrand_profile",
    "sign_pattern",
    "dominance_window",
]

log = logging.getLogger(__name__)

CSV_COLUMNS = ("d_m", "pressure_Pa", "energy_J_per_m2", "n_terms", "err_estimate", "converged")
CSV_HEADER = ("# d_m: gap [m]; pressure_Pa: Casimir pressure [Pa], >0 repulsive; "
              "energy_J_per_m2: free energy per area [J/m^2]; n_terms: Matsubara terms; "
              "err_estimate: quadrature + tail error [Pa]; converged: 1 or 0")
ULTRA_STRONG_RATIO = 10.0


class Stability(str, Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"


class Regime(str, Enum):
    ULTRA_STRONG_GYRO = "ultra_strong_gyro"
    NON_GYRO = "non_gyro"
    MIXED = "mixed"


@dataclass(frozen=True)
class Equilibrium:
    """Zero of the pressure. Stable when P > 0 below d0 and P < 0 above."""

    d0: float
    stability: Stability
    bracket: tuple
    residual_pressure: float


@dataclass(frozen=True)
class RepulsionDiagnostic:
    cross_term_sum: float
    diag_term_sum: float
    regime: Regime
    offdiag_ratio: float


def ideal_benchmarks(d):
    """Zero-temperature pressures of conductor/conductor and conductor/permeable plates.

    Returns
    -------
    (float, float)
        ``(P_C, P_B)`` in Pa, with P_B = -7/8 P_C
    """
    if not d > 0:
        raise DomainError(f"gap distance must be positive, got {d!r}")
    p_c = -CONSTANTS.hbar * CONSTANTS.c * math.pi ** 2 / (240.0 * d ** 4)
    return p_c, -7.0 / 8.0 * p_c


def repulsion_diagnostic(system, d, grid=None, tol=1e-6):
    """Cross (polarization-converting) and diagonal parts of D1 + D4, weighted.

    Both sums use the pressure engine's Matsubara weights and the nodes of its
    initial radial panels, with the single-reflection weight 2 k1 exp(-2 k1 d)
    in place of the full 2 k1 x / L. The pressure is roughly
    ``-(cross + diag)``, so a negative total points to repulsion.

    Parameters
    ----------
    grid : MatsubaraGrid, optional
        defaults to the grid the pressure engine starts from at ``d``
    """
    if grid is None:
        grid = build_grid(system.temperature, tol, system.n_cap, distance=d,
                          xi0_fraction=system.xi0_fraction)
    edges = np.asarray(lifshitz.S_BREAKS)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    s = (mid[:, None] + half[:, None] * GK15_NODES).ravel()
    ws = (half[:, None] * GK15_WEIGHTS).ravel()
    kappa = (grid.frequencies / CONSTANTS.c)[:, None]
    t = s[None, :] / (2.0 * d)
    k1 = kappa + t
    kx = np.sqrt(t * (2.0 * kappa + t))
    R1, R2 = system.reflections(kx, kappa * CONSTANTS.c)
    weight = (CONSTANTS.k_B * system.temperature * grid.weights[:, None] * ws[None, :]
              * k1 / (2.0 * d) / (2.0 * math.pi) * 2.0 * k1 * np.exp(-2.0 * k1 * d))
    cross = np.real(R1.rsp * R2.rps + R1.rps * R2.rsp)
    diag = np.real(R1.rss * R2.rss + R1.rpp * R2.rpp)
    off_mag = sum(np.abs(np.broadcast_to(r, kx.shape)) for r in (R1.rsp, R1.rps, R2.rsp, R2.rps))
    diag_mag = sum(np.abs(np.broadcast_to(r, kx.shape)) for r in (R1.rss, R1.rpp, R2.rss, R2.rpp))
    off_total = float(np.sum(weight * off_mag))
    diag_total = float(np.sum(weight * diag_mag))
    ratio = off_total / diag_total if diag_total > 0 else math.inf
    if off_total == 0:
        regime = Regime.NON_GYRO
    elif ratio > ULTRA_STRONG_RATIO:
        regime = Regime.ULTRA_STRONG_GYRO
    else:
        regime = Regime.MIXED
    return RepulsionDiagnostic(
        cross_term_sum=float(np.sum(weight * cross)),
        diag_term_sum=float(np.sum(weight * diag)),
        regime=regime,
        offdiag_ratio=ratio,
    )


@dataclass
class PressureCurve:
    """Per-distance results of a sweep; failed points are kept in ``failures``."""

    results: list = field(default_factory=list)
    failures: dict = field(default_factory=dict)

    @property
    def distances(self):
        return np.array([r.distance for r in self.results])

    @property
    def pressures(self):
        return np.array([r.pressure for r in self.results])

    @property
    def converged(self):
        return not self.failures and all(r.converged for r in self.results)

    def rows(self):
        # energy is None when it was not computed
        for r in self.results:
            energy = r.energy_per_area if math.isfinite(r.energy_per_area) else None
            yield (r.distance, r.pressure, energy, r.n_terms_used,
                   r.quadrature_error_estimate, int(r.converged))

    def to_csv(self):
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows():
            energy = "nan" if row[2] is None else f"{row[2]:.10e}"
            writer.writerow([f"{row[0]:.10e}", f"{row[1]:.10e}", energy,
                             row[3], f"{row[4]:.3e}", row[5]])
        return buf.getvalue()

    def to_json(self):
        return json.dumps([dict(zip(CSV_COLUMNS, row)) for row in self.rows()], indent=2)


def _point(system, d, tol, energy):
    try:
        return lifshitz.pressure(system, d, tol, energy=energy), None
    except ConvergenceError as exc:
        if exc.partial is not None:
            return exc.partial, None
        return None, str(exc)
    except CasimirError as exc:
        return None, str(exc)


def pressure_sweep(system, d_values, tol=1e-6, *, energy=True, workers=1):
    """Pressure at every distance; errors are recorded and the sweep goes on."""
    d_values = [float(d) for d in d_values]
    if any(not d > 0 for d in d_values):
        raise DomainError("distances must be positive")
    if d_values != sorted(d_values):
        raise DomainError("distances must be sorted ascending")
    job = lambda d: _point(system, d, tol, energy)  # noqa: E731
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(job, d_values))
    else:
        outcomes = [job(d) for d in d_values]
    curve = PressureCurve()
    for d, (res, err) in zip(d_values, outcomes):
        if res is None:
            log.warning("pressure failed at d=%.4g m: %s", d, err)
            curve.failures[d] = err
        else:
            curve.results.append(res)
    return curve


def find_equilibria(system, d_range, tol=1e-6, *, points_per_decade=64, rtol=1e-4, workers=1):
    """Zeros of the pressure inside ``d_range``, classified by stability.

    The range is scanned on a log grid; each sign change is refined with
    Brent's method to relative width ``rtol``.

    Returns
    -------
    list of Equilibrium
        empty when the pressure keeps one sign
    """
    lo, hi = (float(v) for v in d_range)
    if not 0 < lo < hi:
        raise DomainError(f"d_range must satisfy 0 < min < max, got {d_range!r}")
    count = max(2, int(math.ceil(points_per_decade * math.log10(hi / lo))) + 1)
    grid = np.geomspace(lo, hi, count)
    curve = pressure_sweep(system, grid, tol, energy=False, workers=workers)
    if curve.failures:
        raise ConvergenceError(f"pressure scan failed at {len(curve.failures)} distances",
                               partial=curve)
    ds, ps = curve.distances, curve.pressures

    def p_of(d):
        return lifshitz.pressure(system, d, tol, energy=False).pressure

    found = []
    for a, b, pa, pb in zip(ds[:-1], ds[1:], ps[:-1], ps[1:]):
        if pa == 0 or np.sign(pa) == np.sign(pb):
            continue
        d0 = brentq(p_of, a, b, xtol=1e-18, rtol=rtol)
        stability = Stability.STABLE if pa > 0 > pb else Stability.UNSTABLE
        found.append(Equilibrium(d0, stability, (float(a), float(b)), p_of(d0)))
    return found


@dataclass(frozen=True)
class IntegrandProfile:
    """k_x-resolved integrand and reflection magnitudes at one Matsubara index."""

    n: int
    distance: float
    k_x: np.ndarray
    integrand: np.ndarray
    plate1: dict
    plate2: dict

    def columns(self):
        cols = {"k_x_per_m": self.k_x, "integrand_per_m2": self.integrand}
        for tag, mags in (("1", self.plate1), ("2", self.plate2)):
            for key, val in mags.items():
                cols[f"abs_{key}_{tag}"] = val
        return cols


def integrand_profile(system, n, d, k_x):
    """Weighted integrand k_x[-dlnL/dd] and |r_ij| of both plates along ``k_x``."""
    k_x = np.asarray(k_x, dtype=float)
    grid = build_grid(system.temperature, n_cap=max(n, 1), xi0_fraction=system.xi0_fraction)
    xi = grid.frequencies[n]
    R1, R2 = system.reflections(k_x, xi)
    mags = [{key: np.abs(np.broadcast_to(getattr(R, key), k_x.shape)).astype(float)
             for key in ("rss", "rsp", "rps", "rpp")} for R in (R1, R2)]
    values = lifshitz.pressure_integrand(system, n, k_x, d)
    return IntegrandProfile(n, d, k_x, values, mags[0], mags[1])


def sign_pattern(k_x, values, min_fraction=0.01):
    """Signs of the successive lobes of ``values``, e.g. ``['-', '+']``.

    Lobes whose area is below ``min_fraction`` of the total absolute area
    are ignored, so a sliver at the grid edge does not count as a lobe.
    """
    k_x = np.asarray(k_x, dtype=float)
    values = np.asarray(values, dtype=float)
    sgn = np.sign(values)
    cuts = np.flatnonzero(np.diff(sgn) != 0) + 1
    pieces = np.split(np.arange(len(values)), cuts)
    dk = np.gradient(k_x)
    total = np.sum(np.abs(values) * dk)
    pattern = []
    for idx in pieces:
        if sgn[idx[0]] == 0 or np.sum(np.abs(values[idx]) * dk[idx]) < min_fraction * total:
            continue
        sym = "+" if sgn[idx[0]] > 0 else "-"
        if not pattern or pattern[-1] != sym:
            pattern.append(sym)
    return pattern


def dominance_window(k_x, mags):
    """Total k_x width over which |r_sp| exceeds both |r_ss| and |r_pp|."""
    k_x = np.asarray(k_x, dtype=float)
    mask = mags["rsp"] > np.maximum(mags["rss"], mags["rpp"])
    dk = np.gradient(k_x)
    return float(np.sum(dk[mask]))
