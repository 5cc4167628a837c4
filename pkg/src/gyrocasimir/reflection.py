"""2x2 reflection matrices of a vacuum/medium interface on the Matsubara axis.

Basis: TE amplitude = E_y, TM amplitude = H_y, for both incident and
reflected waves, with the plane of incidence x-z. Entries follow
``r_ss = R_TE/A_TE``, ``r_sp = R_TM/A_TE``, ``r_ps = R_TE/A_TM`` and
``r_pp = R_TM/A_TM``.

The canonical frame is a half-space medium below the vacuum (z < 0), i.e.
the lower plate of a gap. An upper plate is its z-mirror image; the mirror
keeps E_y and flips H_y, so it conjugates R by S = diag(1, -1).
"""
import logging
import os
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import gyro_modes as gm
from .errors import DomainError, GrazingModeError, MatchingError
from .materials import IdealPlate, PermittivityTensor
from .quantities import CONSTANTS

__all__ = [
    "Face",
    "Axis",
    "ReflectionMatrix",
    "Plate",
    "reflect_ideal",
    "reflect_isotropic",
    "reflect_gyro",
    "orient_plate",
    "plate_reflection",
]

log = logging.getLogger(__name__)

# maxwell_residual is checked on every matched mode when this is set
CHECK_MODES = bool(os.environ.get("GYROCASIMIR_CHECK_MODES"))

DEGENERACY_RTOL = 1e-8
GYRO_RTOL = 1e-6
# relative k_x nudge off a grazing root (Im q = 0)
KX_PERTURBATION = 1e-9
# relative root gap below which the decaying subspace replaces the two eigenstates
EP_RTOL = 1e-3


class Face(str, Enum):
    LOWER = "lower"
    UPPER = "upper"


class Axis(str, Enum):
    PLUS_Z = "plus_z"
    MINUS_Z = "minus_z"


@dataclass(frozen=True)
class ReflectionMatrix:
    rss: object
    rsp: object
    rps: object
    rpp: object

    def matrix(self):
        """Complex array of shape (..., 2, 2) laid out as [[rss, rsp], [rps, rpp]]."""
        rss, rsp, rps, rpp = np.broadcast_arrays(
            *(np.asarray(v, dtype=complex) for v in (self.rss, self.rsp, self.rps, self.rpp))
        )
        return np.stack([np.stack([rss, rsp], -1), np.stack([rps, rpp], -1)], -2)

    @classmethod
    def from_matrix(cls, m):
        m = np.asarray(m)
        return cls(m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1])

    def mirrored(self):
        """S R S with S = diag(1, -1): off-diagonal entries change sign."""
        return ReflectionMatrix(self.rss, -np.asarray(self.rsp), -np.asarray(self.rps), self.rpp)

    def real(self):
        """Drop imaginary parts after checking they are round-off only."""
        m = self.matrix()
        imag = np.abs(m.imag)
        scale = np.abs(m).max(axis=(-2, -1), keepdims=True)
        if np.any(imag > 1e-10 * scale):
            log.warning("reflection matrix has imaginary residue up to %.3g", imag.max())
        return ReflectionMatrix.from_matrix(m.real)

    def check_passive(self):
        bad = (np.abs(self.rss) > 1 + 1e-12) | (np.abs(self.rpp) > 1 + 1e-12)
        if np.any(bad):
            log.warning("|r_ss| or |r_pp| exceeds 1 at %d points", int(np.sum(bad)))
        return not np.any(bad)


def reflect_ideal(kind):
    """Reflection of a perfect conductor (-1, +1) or an infinitely permeable plate (+1, -1)."""
    kind = IdealPlate(kind)
    if kind is IdealPlate.PERFECT_CONDUCTOR:
        return ReflectionMatrix(-1.0, 0.0, 0.0, 1.0)
    return ReflectionMatrix(1.0, 0.0, 0.0, -1.0)


def reflect_isotropic(eps, k_x, xi):
    """Closed-form Fresnel coefficients of an isotropic dielectric at imaginary frequency."""
    eps = np.asarray(eps, dtype=float)
    kx = np.asarray(k_x, dtype=float)
    kappa = np.asarray(xi, dtype=float) / CONSTANTS.c
    if np.any(kx < 0) or np.any(~(kappa > 0)):
        raise DomainError("reflect_isotropic needs k_x >= 0 and xi > 0")
    k1 = np.hypot(kx, kappa)
    q_i = np.sqrt(kx * kx + eps * kappa * kappa)
    rss = (k1 - q_i) / (k1 + q_i)
    rpp = (eps * k1 - q_i) / (eps * k1 + q_i)
    zero = np.zeros_like(rss)
    return ReflectionMatrix(rss, zero, zero, rpp)


def _gyro_fields(tensor, kx, kappa, degeneracy_rtol, gyro_rtol):
    """Field components (ex, ey, hx, hy) of the two transmitted modes.

    Inputs are already scaled so that k1 = 1. Returns two 4-tuples of arrays.
    """
    eps1, eps2, g, d1, d2, gp, kx, kappa = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in
          (tensor.eps1, tensor.eps2, tensor.g, tensor.d1, tensor.d2, tensor.gprime, kx, kappa))
    )
    shape = kx.shape
    # work on flat arrays so boolean masks also cover scalar input
    eps1, eps2, g, d1, d2, gp, kx, kappa = (
        np.ravel(v) for v in (eps1, eps2, g, d1, d2, gp, kx, kappa))
    xi = kappa * CONSTANTS.c
    q1s, q2s = (np.atleast_1d(v) for v in gm.dispersion_q_squared(d1, d2, gp, kx, xi))
    gap = np.abs(q1s - q2s)
    degenerate = gap <= degeneracy_rtol * np.maximum(np.abs(q1s), np.abs(q2s))
    weak = np.abs(g) <= gyro_rtol * np.abs(eps1)
    decoupled = degenerate & weak
    coupled = ~decoupled

    kx_used = np.array(kx, dtype=float, copy=True)
    near = coupled & (gap <= EP_RTOL * np.maximum(np.abs(q1s), np.abs(q2s)))
    far = coupled & ~near
    out = [np.zeros(kx.shape + (4,), dtype=complex) for _ in range(2)]
    for sel in (far, near):
        if not np.any(sel):
            continue
        try:
            pair = gm.select_modes((q1s[sel], q2s[sel]), gm.Direction.MINUS_Z)
        except GrazingModeError:
            kx_used[sel] *= 1.0 + KX_PERTURBATION
            qa, qb = gm.dispersion_q_squared(d1[sel], d2[sel], gp[sel], kx_used[sel], xi[sel])
            pair = gm.select_modes((qa, qb), gm.Direction.MINUS_Z)
        if sel is near:
            out[0][sel], out[1][sel] = _subspace_fields(
                pair.q1, pair.q2, eps1[sel], eps2[sel], g[sel], kx_used[sel], kappa[sel])
            continue
        for slot, q in zip(out, (pair.q1, pair.q2)):
            mode = gm.stable_eigenstate(q, eps1[sel], eps2[sel], g[sel], kx_used[sel], xi[sel])
            if CHECK_MODES:
                _assert_residual(mode, PermittivityTensor(eps1[sel], eps2[sel], g[sel]),
                                 kx_used[sel], xi[sel])
            slot[sel] = _components(mode)
    if np.any(decoupled):
        sel = decoupled
        tm, te = gm.decoupled_eigenstates(eps1[sel], eps2[sel], kx[sel], xi[sel])
        out[0][sel] = _components(tm)
        out[1][sel] = _components(te)
    return tuple(tuple(v.reshape(shape) for v in np.moveaxis(o, -1, 0)) for o in out)


def _subspace_fields(q1, q2, eps1, eps2, g, kx, kappa):
    """Basis of the decaying two-mode subspace for nearly coincident roots.

    With v = (e_x, e_y, h_x, h_y) the fields obey q v = B v, B = [[0, X], [Y, 0]].
    (B + q1)(B + q2) annihilates the two growing modes, so its range is the
    decaying subspace; it depends on q1 + q2 and q1 q2 only, which stay well
    conditioned as the roots coalesce (exceptional points, or weak gyrotropy
    with eps1 close to eps2). Applied to unit e_x and e_y it gives the basis.
    """
    k2 = kappa * kappa
    kx2 = kx * kx
    s = q1 + q2
    p = q1 * q2
    y00, y01 = 1j * kappa * g, -1j * (kx2 / kappa + kappa * eps1)
    y10, y11 = 1j * kappa * eps1, 1j * kappa * g
    # Y maps (e_x, e_y) to q (h_x, h_y); XY is written out directly
    tm = k2 + kx2 / eps2
    # columns of XY + p and s Y for unit e_x and unit e_y
    col_x = np.stack([p - tm * eps1, k2 * g, s * y00, s * y10], axis=-1)
    col_y = np.stack([-tm * g, p - (kx2 + k2 * eps1), s * y01, s * y11], axis=-1)
    return tuple(f / np.max(np.abs(f), axis=-1, keepdims=True) for f in (col_x, col_y))


def _components(mode):
    e, h = mode.e_field, mode.h_field
    return np.stack([e[..., 0], e[..., 1], h[..., 0], h[..., 1]], axis=-1)


def _assert_residual(mode, tensor, kx, xi):
    res = gm.maxwell_residual(mode, tensor, kx, xi)
    if np.any(res > 1e-9):
        raise AssertionError(f"eigenmode residual {np.max(res):.3g} exceeds 1e-9")


def _match_ratios(a, m1, m2):
    """Interface matching via the two-amplitude ratio formulas."""
    ex1, ey1, hx1, hy1 = m1
    ex2, ey2, hx2, hy2 = m2
    # TM incidence: [(a) e_y1 - h_x1] A1 = A2 [h_x2 - (a) e_y2]
    a1 = hx2 - a * ey2
    a2 = a * ey1 - hx1
    den_p = a1 * (a * hy1 + ex1) + a2 * (a * hy2 + ex2)
    # TE incidence: [(a) h_y1 + e_x1] C1 = -C2 [(a) h_y2 + e_x2]
    c1 = -(a * hy2 + ex2)
    c2 = a * hy1 + ex1
    den_s = c1 * (a * ey1 - hx1) + c2 * (a * ey2 - hx2)
    scale_p = np.abs(a1 * (a * hy1)) + np.abs(a1 * ex1) + np.abs(a2 * (a * hy2)) + np.abs(a2 * ex2)
    scale_s = np.abs(c1 * (a * ey1)) + np.abs(c1 * hx1) + np.abs(c2 * (a * ey2)) + np.abs(c2 * hx2)
    bad = (np.abs(den_p) <= 1e-300 * scale_p) | (np.abs(den_s) <= 1e-300 * scale_s)
    if np.any(bad) or np.any(den_p == 0) or np.any(den_s == 0):
        raise MatchingError(
            "interface matching is singular",
            {"den_p": den_p[bad] if np.ndim(bad) else den_p,
             "den_s": den_s[bad] if np.ndim(bad) else den_s},
        )
    rpp = (a1 * (a * hy1 - ex1) + a2 * (a * hy2 - ex2)) / den_p
    rps = 2.0 * (a1 * hx1 + a2 * hx2) / den_p
    rss = (c1 * (a * ey1 + hx1) + c2 * (a * ey2 + hx2)) / den_s
    rsp = -2.0 * (c1 * ex1 + c2 * ex2) / den_s
    return rss, rsp, rps, rpp


def _match_generic(a, m1, m2):
    """Same boundary conditions solved as a 4x4 system per point (cross-check)."""
    ex1, ey1, hx1, hy1 = m1
    ex2, ey2, hx2, hy2 = m2
    a, ex1, ey1, hx1, hy1, ex2, ey2, hx2, hy2 = np.broadcast_arrays(
        a + 0j, ex1, ey1, hx1, hy1, ex2, ey2, hx2, hy2)
    zero = np.zeros_like(a)
    one = np.ones_like(a)
    # unknowns: R_TE, R_TM, A1, A2
    rows = [
        [zero, a, ex1, ex2],
        [-one, zero, ey1, ey2],
        [-a, zero, hx1, hx2],
        [zero, -one, hy1, hy2],
    ]
    mat = np.stack([np.stack(r, -1) for r in rows], -2)
    # right-hand sides for (A_TE, A_TM) = (1, 0) and (0, 1)
    rhs = np.stack([np.stack([zero, one, -a, zero], -1),
                    np.stack([a, zero, zero, one], -1)], -1)
    sol = np.linalg.solve(mat, rhs)
    return sol[..., 0, 0], sol[..., 1, 0], sol[..., 0, 1], sol[..., 1, 1]


def reflect_gyro(tensor, k_x, xi, *, degeneracy_rtol=DEGENERACY_RTOL,
                 gyro_rtol=GYRO_RTOL, method="ratio"):
    """Reflection matrix of a gyroelectric half-space by eigenmode matching.

    Parameters
    ----------
    tensor : PermittivityTensor
        medium response at ``xi`` (gyrotropy axis +z)
    k_x : float or ndarray
        in-plane wavevector, m^-1
    xi : float or ndarray
        imaginary frequency, s^-1
    degeneracy_rtol : float
        relative gap between the two q^2 roots below which they count as equal
    gyro_rtol : float
        |g|/eps1 below which degenerate roots are matched with decoupled TE/TM modes
    method : {"ratio", "generic"}
        closed ratio formulas, or a full 4x4 solve of the same boundary conditions

    Returns
    -------
    ReflectionMatrix
        computed in the canonical frame (medium below the vacuum)
    """
    kx = np.asarray(k_x, dtype=float)
    kappa = np.asarray(xi, dtype=float) / CONSTANTS.c
    if np.any(kx < 0) or np.any(~(kappa > 0)):
        raise DomainError("reflect_gyro needs k_x >= 0 and xi > 0")
    k1 = np.hypot(kx, kappa)
    kx_s = kx / k1
    kappa_s = kappa / k1
    m1, m2 = _gyro_fields(tensor, kx_s, kappa_s, degeneracy_rtol, gyro_rtol)
    # k_z/omega with the incident k_z = -i k1 and omega = i xi
    a = -1.0 / kappa_s
    if method == "ratio":
        rss, rsp, rps, rpp = _match_ratios(a, m1, m2)
    elif method == "generic":
        rss, rsp, rps, rpp = _match_generic(a, m1, m2)
    else:
        raise ValueError(f"unknown matching method {method!r}")
    return ReflectionMatrix(rss, rsp, rps, rpp)


def orient_plate(R, face, axis=Axis.PLUS_Z):
    """Express a canonical-frame matrix for a plate at ``face`` with gyrotropy ``axis``.

    Each of the z-mirror (upper face) and the axis reversal conjugates R by
    diag(1, -1); the two together cancel.
    """
    flips = (Face(face) is Face.UPPER) + (Axis(axis) is Axis.MINUS_Z)
    return R.mirrored() if flips % 2 else R


@dataclass(frozen=True)
class Plate:
    """A half-space plate: a material model plus its gyrotropy-axis direction.

    ``material`` is an :class:`IdealPlate` member or any parameter record from
    :mod:`gyrocasimir.materials`. Ideal and isotropic plates ignore ``axis``.
    """

    material: object
    axis: Axis = Axis.PLUS_Z

    @property
    def gyrotropic(self):
        return getattr(self.material, "gyrotropic", False)


def plate_reflection(plate, face, k_x, xi):
    """Reflection matrix of ``plate`` as seen from the gap, for waves at (k_x, xi)."""
    mat = plate.material
    if isinstance(mat, IdealPlate):
        return reflect_ideal(mat)
    if plate.gyrotropic:
        tensor = mat.tensor(xi)
        if Axis(plate.axis) is Axis.MINUS_Z:
            tensor = tensor.flipped()
        R = reflect_gyro(tensor, k_x, xi).real()
        return orient_plate(R, face)
    return reflect_isotropic(mat.epsilon(xi), k_x, xi)
