r"""Plane-wave eigenmodes of a gyroelectric medium on the Matsubara axis.

For a wave :math:`e^{i(k_x x + q z) - i\omega t}` with :math:`\omega = i\xi`
the longitudinal momentum solves a quadratic in :math:`q^2`; the six-component
state :math:`\psi = (E, H)` then follows in closed form. Frequencies enter
only as :math:`\kappa = \xi/c`.

The formulas are homogeneous in :math:`(k_x, q, \kappa)`, so callers may pass
wavevectors and frequencies rescaled by a common factor (``reflection`` does
this to keep the field components of order one).

All functions accept numpy arrays and broadcast.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateModeError, GrazingModeError, SingularMediumError
from .quantities import CONSTANTS

__all__ = [
    "Direction",
    "ModePair",
    "EigenMode",
    "SPIN1",
    "dispersion_q_squared",
    "forward_frequency_squared",
    "select_modes",
    "eigenstate",
    "wave_operator_state",
    "stable_eigenstate",
    "decoupled_eigenstates",
    "maxwell_hamiltonian",
    "maxwell_residual",
]

CLOSED_FORM_MIN_QUALITY = 1e-6
# cross-product score below which the null vector comes from an SVD
SVD_FALLBACK = 1e-8
# Maxwell residual regarded as rounding level
RESIDUAL_OK = 1e-12

SPIN1 = np.array(
    [
        [[0, 0, 0], [0, 0, -1j], [0, 1j, 0]],
        [[0, 0, 1j], [0, 0, 0], [-1j, 0, 0]],
        [[0, -1j, 0], [1j, 0, 0], [0, 0, 0]],
    ]
)


class Direction(str, Enum):
    PLUS_Z = "plus_z"
    MINUS_Z = "minus_z"


@dataclass(frozen=True)
class ModePair:
    q1: object
    q2: object
    direction: Direction


@dataclass(frozen=True)
class EigenMode:
    """Eigenstate with fields stacked along the last axis (length 3 each)."""

    q: object
    e_field: np.ndarray
    h_field: np.ndarray
    norm_scale: object

    @property
    def psi(self):
        return np.concatenate([self.e_field, self.h_field], axis=-1)

    def with_q(self, q):
        return EigenMode(q, self.e_field, self.h_field, self.norm_scale)


def dispersion_q_squared(d1, d2, gprime, k_x, xi):
    """The two roots q^2 of the gyroelectric dispersion relation.

    Parameters
    ----------
    d1, d2, gprime : float or ndarray
        coefficients of the inverse permittivity tensor
    k_x : float or ndarray
        in-plane wavevector, m^-1
    xi : float or ndarray
        imaginary frequency, s^-1

    Returns
    -------
    (complex ndarray, complex ndarray)
        roots taken with ``+sqrt(Delta)`` and ``-sqrt(Delta)`` respectively
    """
    d1, d2, gp, kx = (np.asarray(v, dtype=float) for v in (d1, d2, gprime, k_x))
    kappa = np.asarray(xi, dtype=float) / CONSTANTS.c
    s = d1 * d1 + gp * gp
    if np.any(s == 0):
        raise SingularMediumError("d1^2 + g'^2 = 0: no propagating solution")
    kx2 = kx * kx
    k2 = kappa * kappa
    delta = (d1 * (d1 - d2) + gp * gp) ** 2 * kx2 * kx2 - 4.0 * gp * gp * k2 * (k2 + d2 * kx2)
    b = -d1 * ((d1 + d2) * kx2 + 2.0 * k2) - kx2 * gp * gp
    root = np.sqrt(delta.astype(complex))
    # larger root from the non-cancelling sign, smaller one from the product
    # of roots (k2 + d1 kx2)(k2 + d2 kx2)/s
    sign = np.where((b * root.conjugate()).real >= 0, 1.0, -1.0)
    big = (b + sign * root) / (2.0 * s)
    prod = (k2 + d1 * kx2) * (k2 + d2 * kx2) / s
    with np.errstate(divide="ignore", invalid="ignore"):
        small = np.where(big == 0, 0.0, prod / big)
    plus = np.where(sign > 0, big, small)
    minus = np.where(sign > 0, small, big)
    if plus.ndim == 0:
        return complex(plus), complex(minus)
    return plus, minus


def forward_frequency_squared(d1, d2, gprime, k_x, q):
    r"""Both branches of :math:`(\xi/c)^2` for given (k_x, q); inverse of the dispersion solve."""
    d1, d2, gp, kx = (np.asarray(v, dtype=float) for v in (d1, d2, gprime, k_x))
    q = np.asarray(q, dtype=complex)
    kx2 = kx * kx
    q2 = q * q
    p = kx2 * kx2 * (d1 - d2) ** 2 - 4.0 * (kx2 + q2) * q2 * gp * gp
    root = np.sqrt(p)
    base = (d1 + d2) * kx2 + 2.0 * d1 * q2
    return -(base - root) / 2.0, -(base + root) / 2.0


def select_modes(q_sq_pair, direction=Direction.MINUS_Z, grazing_rtol=1e-12):
    """Pick the decaying square root of each q^2.

    ``plus_z`` keeps Im(q) > 0, ``minus_z`` keeps Im(q) < 0; the real part is
    left free.
    """
    direction = Direction(direction)
    qs = []
    for q_sq in q_sq_pair:
        q = np.sqrt(np.asarray(q_sq, dtype=complex))
        if np.any(np.abs(q.imag) <= grazing_rtol * np.abs(q)):
            raise GrazingModeError("mode with Im(q) ~ 0 does not decay along z")
        if direction is Direction.PLUS_Z:
            q = np.where(q.imag < 0, -q, q)
        else:
            q = np.where(q.imag > 0, -q, q)
        qs.append(q if q.ndim else complex(q))
    return ModePair(qs[0], qs[1], direction)


def _normalized(q, e, h, reference):
    """Rescale to unit max-norm; ``reference`` is the size of the uncancelled terms."""
    norm = np.maximum(np.max(np.abs(e), axis=-1), np.max(np.abs(h), axis=-1))
    if np.any(norm <= 1e-10 * reference):
        raise DegenerateModeError("eigenstate vanishes; the two modes are degenerate")
    n = norm[..., None]
    q = q if np.ndim(q) else complex(q)
    return EigenMode(q, e / n, h / n, norm if norm.ndim else float(norm))


def _closed_form(q, d1, d2, gprime, k_x, xi):
    """Unnormalized closed-form fields and the size of their uncancelled terms."""
    q = np.asarray(q, dtype=complex)
    d1, d2, gp, kx = (np.asarray(v, dtype=float) for v in (d1, d2, gprime, k_x))
    kappa = np.asarray(xi, dtype=float) / CONSTANTS.c
    q, d1, d2, gp, kx, kappa = np.broadcast_arrays(q, d1, d2, gp, kx, kappa)
    k2 = kappa * kappa
    q2 = q * q
    s = d1 * d1 + gp * gp
    common = d1 * kx * kx + d1 * q2 + k2
    e = np.stack(
        [q * (s * (kx * kx + q2) + d1 * k2), -gp * q * k2, -d2 * kx * common], axis=-1
    )
    h = 1j * kappa[..., None] * np.stack([-gp * q2, common, gp * kx * q], axis=-1)
    aq = np.abs(q)
    agp = np.abs(gp)
    terms = d1 * kx * kx + d1 * aq * aq + k2
    reference = np.maximum.reduce([
        aq * (s * (kx * kx + aq * aq) + d1 * k2),
        agp * aq * k2,
        d2 * kx * terms,
        kappa * agp * aq * aq,
        kappa * terms,
    ])
    return q, e, h, reference


def eigenstate(q, d1, d2, gprime, k_x, xi):
    """Closed-form (E, H) eigenstate for longitudinal momentum q.

    The raw components grow like q^3; the state is returned rescaled to unit
    max-norm with the factor kept in ``norm_scale``.
    """
    q, e, h, reference = _closed_form(q, d1, d2, gprime, k_x, xi)
    return _normalized(q, e, h, reference)


def _null_vector(q, eps1, eps2, g, k_x, xi):
    """Unnormalized null-vector fields and their conditioning score in [0, 1]."""
    q = np.asarray(q, dtype=complex)
    eps1, eps2, g, kx = (np.asarray(v, dtype=float) for v in (eps1, eps2, g, k_x))
    kappa = np.asarray(xi, dtype=float) / CONSTANTS.c
    q, eps1, eps2, g, kx, kappa = np.broadcast_arrays(q, eps1, eps2, g, kx, kappa)
    k2 = kappa * kappa
    zero = np.zeros_like(q)
    rows = (
        np.stack([q * q + k2 * eps1, k2 * g + zero, -kx * q], axis=-1),
        np.stack([-k2 * g + zero, kx * kx + q * q + k2 * eps1, zero], axis=-1),
        np.stack([-kx * q, zero, kx * kx + k2 * eps2 + zero], axis=-1),
    )
    # normalize by the largest row so that a row which is rounding noise
    # (e.g. the TE row on the ordinary root) never wins
    scale = np.max([np.linalg.norm(r, axis=-1) for r in rows], axis=0)
    e = np.zeros(q.shape + (3,), dtype=complex)
    best = np.full(q.shape, -1.0)
    for i, j in ((0, 1), (0, 2), (1, 2)):
        v = np.cross(rows[i], rows[j])
        with np.errstate(divide="ignore", invalid="ignore"):
            score = np.nan_to_num(np.linalg.norm(v, axis=-1) / (scale * scale), nan=0.0)
        take = score > best
        best = np.where(take, score, best)
        e = np.where(take[..., None], v, e)
    # near coalescence every cross product is rounding noise; the smallest
    # right singular vector still minimizes |M e| there
    weak = best < SVD_FALLBACK
    if np.any(weak):
        m = np.stack([r[weak] for r in rows], axis=-2)
        vh = np.linalg.svd(m)[2]
        e[weak] = np.conj(vh[..., -1, :])
        # backward stable: |M e| is at rounding level whatever the spectrum
        best[weak] = 1.0
    h = np.stack([-q * e[..., 1], q * e[..., 0] - kx * e[..., 2], kx * e[..., 1]], axis=-1)
    # k x E cancels for nearly longitudinal E (small kappa)
    aq, ae = np.abs(q), np.abs(e)
    h_terms = np.maximum.reduce([aq * ae[..., 1], aq * ae[..., 0] + kx * ae[..., 2], kx * ae[..., 1]])
    with np.errstate(divide="ignore", invalid="ignore"):
        h_quality = np.nan_to_num(np.max(np.abs(h), axis=-1) / h_terms, nan=0.0)
    h = h / (1j * kappa[..., None])
    return q, e, h, np.minimum(best, h_quality)


def wave_operator_state(q, eps1, eps2, g, k_x, xi):
    r"""Eigenstate as the best-conditioned null vector of the wave operator.

    :math:`M = (k\cdot k)I - kk^T + (\xi/c)^2\epsilon` has rank 2 on a
    root; its null vector is the cross product of two rows, and the pair
    with the largest cross product (relative to the largest row) is used.
    Same state as :func:`eigenstate` up to scale, but free of the
    cancellation that the closed form suffers when a mode is nearly TE.
    When the two roots (nearly) coincide the null space is two-dimensional;
    the smallest right singular vector is then returned, which is one member
    of that eigenspace and still solves the wave equation to rounding.
    """
    q, e, h, _ = _null_vector(q, eps1, eps2, g, k_x, xi)
    return _normalized(q, e, h, 0.0)


def _field_residual(q, e, h, eps1, eps2, g, k_x, kappa):
    """Relative residual of i k x H = kappa eps E and i k x E = -kappa H."""
    kx = np.asarray(k_x, dtype=float)

    def ik_cross(v):
        return 1j * np.stack([-q * v[..., 1], q * v[..., 0] - kx * v[..., 2], kx * v[..., 1]], axis=-1)

    eps_e = np.stack([eps1 * e[..., 0] + g * e[..., 1], eps1 * e[..., 1] - g * e[..., 0],
                      eps2 * e[..., 2]], axis=-1)
    k = kappa[..., None]

    def size(v):
        return np.sqrt(np.sum(v.real ** 2 + v.imag ** 2, axis=-1))

    res = size(k * eps_e - ik_cross(h)) + size(k * h + ik_cross(e))
    knorm = np.sqrt(kx * kx + np.abs(q) ** 2 + kappa ** 2)
    scale = knorm * np.maximum(size(e) * np.maximum(np.abs(eps1), np.abs(eps2)), size(h))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(scale > 0, res / scale, np.inf)


def stable_eigenstate(q, eps1, eps2, g, k_x, xi):
    """Pointwise the better of :func:`eigenstate` and :func:`wave_operator_state`.

    The closed form loses accuracy when its terms cancel (weak gyrotropy, or
    two nearly coincident roots); the null vector loses it when the rows of
    the wave operator nearly cancel (strong gyrotropy at small frequency).
    The closed form is kept while its Maxwell residual is at rounding level
    (``RESIDUAL_OK``) and its own measure of surviving digits stays above
    ``CLOSED_FORM_MIN_QUALITY``; otherwise the construction with the smaller
    residual wins.
    """
    eps1, eps2, g = (np.asarray(v, dtype=float) for v in (eps1, eps2, g))
    det = eps1 * eps1 + g * g
    d1, gp = eps1 / det, -g / det
    q, e_c, h_c, reference = _closed_form(q, d1, 1.0 / eps2, gp, k_x, xi)
    norm_c = np.maximum(np.max(np.abs(e_c), axis=-1), np.max(np.abs(h_c), axis=-1))
    with np.errstate(divide="ignore", invalid="ignore"):
        quality_c = np.nan_to_num(norm_c / reference, nan=0.0)
    xi = np.broadcast_to(np.asarray(xi, dtype=float), q.shape)
    kappa = xi / CONSTANTS.c
    kx, eps1, eps2, g = (np.broadcast_to(v, q.shape) for v in (np.asarray(k_x, dtype=float), eps1, eps2, g))
    res_c = _field_residual(q, e_c, h_c, eps1, eps2, g, kx, kappa)
    e, h = e_c.copy(), h_c.copy()
    # the null vector is only built where the closed form is in doubt
    doubt = (res_c > RESIDUAL_OK) | (quality_c < CLOSED_FORM_MIN_QUALITY)
    if np.any(doubt):
        sub = [v[doubt] for v in (q, eps1, eps2, g, kx)]
        _, e_n, h_n, quality_n = _null_vector(*sub, xi[doubt])
        res_n = _field_residual(sub[0], e_n, h_n, *sub[1:], kappa[doubt])
        rc, qc = res_c[doubt], quality_c[doubt]
        use_n = np.where((rc <= RESIDUAL_OK) & (res_n <= RESIDUAL_OK), quality_n > qc, res_n < rc)
        e[doubt] = np.where(use_n[..., None], e_n, e_c[doubt])
        h[doubt] = np.where(use_n[..., None], h_n, h_c[doubt])
    return _normalized(q, e, h, 0.0)


def decoupled_eigenstates(eps1, eps2, k_x, xi, direction=Direction.MINUS_Z):
    """TM (extraordinary) and TE (ordinary) states of a non-gyrotropic uniaxial medium.

    Used where the gyrotropic closed form collapses because the two roots
    coincide. Returns ``(tm, te)``.
    """
    eps1, eps2, kx = (np.asarray(v, dtype=float) for v in (eps1, eps2, k_x))
    kappa = np.asarray(xi, dtype=float) / CONSTANTS.c
    eps1, eps2, kx, kappa = np.broadcast_arrays(eps1, eps2, kx, kappa)
    omega = 1j * kappa
    q_te_sq = -(kx * kx + eps1 * kappa * kappa)
    q_tm_sq = -(eps1 / eps2 * kx * kx + eps1 * kappa * kappa)
    pair = select_modes((q_tm_sq, q_te_sq), direction)
    q_tm, q_te = np.asarray(pair.q1), np.asarray(pair.q2)
    zero = np.zeros_like(q_te)
    one = np.ones_like(q_te)
    te_e = np.stack([zero, one, zero], axis=-1)
    te_h = np.stack([-q_te, zero, kx + 0j], axis=-1) / omega[..., None]
    tm_h = np.stack([zero, one, zero], axis=-1)
    tm_e = np.stack([q_tm / eps1, zero, -kx / eps2 + 0j], axis=-1) / omega[..., None]
    return _normalized(q_tm, tm_e, tm_h, 1.0), _normalized(q_te, te_e, te_h, 1.0)


def maxwell_hamiltonian(tensor, k_x, q):
    """6x6 block matrix [[0, eps^-1 S.k], [-S.k, 0]] with k = (k_x, 0, q), mu = 1."""
    kx = np.asarray(k_x, dtype=complex)
    q = np.asarray(q, dtype=complex)
    kx, q = np.broadcast_arrays(kx, q)
    sk = kx[..., None, None] * SPIN1[0] + q[..., None, None] * SPIN1[2]
    inv = tensor.inverse_matrix()
    shape = np.broadcast_shapes(sk.shape[:-2], inv.shape[:-2])
    ham = np.zeros(shape + (6, 6), dtype=complex)
    ham[..., :3, 3:] = inv @ sk
    ham[..., 3:, :3] = -sk
    return ham


def maxwell_residual(mode, tensor, k_x, xi):
    r"""Relative residual of the Maxwell eigen-equation for ``mode``.

    With the convention :math:`H = k\times E/\omega` and :math:`\omega = i\xi`
    the closed-form states satisfy :math:`H_{Max}\psi = (\xi/c)\psi`. The
    residual is normalised by :math:`|k|\,\|\psi\|` so that it is dimensionless.
    """
    kappa = np.asarray(xi, dtype=float) / CONSTANTS.c
    ham = maxwell_hamiltonian(tensor, k_x, mode.q)
    psi = mode.psi
    lhs = np.einsum("...ij,...j->...i", ham, psi)
    res = np.linalg.norm(lhs - kappa[..., None] * psi, axis=-1)
    knorm = np.sqrt(np.abs(np.asarray(k_x)) ** 2 + np.abs(mode.q) ** 2 + kappa ** 2)
    out = res / (knorm * np.linalg.norm(psi, axis=-1))
    return out if np.ndim(out) else float(out)
