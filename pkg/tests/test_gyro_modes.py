import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from gyrocasimir import gyro_modes as gm
from gyrocasimir.errors import DegenerateModeError, GrazingModeError, SingularMediumError
from gyrocasimir.materials import PermittivityTensor, WeylParams
from gyrocasimir.quantities import CONSTANTS, first_matsubara_frequency

C = CONSTANTS.c
XI1 = first_matsubara_frequency(200.0)


def _quartic_q2(d1, d2, gp, kx, kappa):
    """q^2 roots from the forward relation squared out into a quartic in q."""
    A = 2 * kappa ** 2 + (d1 + d2) * kx ** 2
    s = d1 * d1 + gp * gp
    coeffs = [4 * s, 0, 4 * A * d1 + 4 * gp * gp * kx ** 2, 0, A * A - kx ** 4 * (d1 - d2) ** 2]
    return np.sort_complex(np.unique(np.round(np.roots(coeffs) ** 2, 3)))


def test_isotropic_roots():
    eps, kx, xi = 4.0, 2e6, 3e14
    q1, q2 = gm.dispersion_q_squared(1 / eps, 1 / eps, 0.0, kx, xi)
    expected = -(kx ** 2 + eps * (xi / C) ** 2)
    assert q1 == pytest.approx(expected, rel=1e-14)
    assert q2 == pytest.approx(expected, rel=1e-14)


def test_vacuum_light_cone():
    xi = 3e14
    q1, q2 = gm.dispersion_q_squared(1.0, 1.0, 0.0, 0.0, xi)
    assert q1 == pytest.approx(-(xi / C) ** 2) and q2 == pytest.approx(-(xi / C) ** 2)


def test_roots_against_quartic_oracle():
    kx, kappa = 1e6, 1e6
    q1, q2 = gm.dispersion_q_squared(0.5, 0.5, -0.5, kx, kappa * C)
    scale = 1e12
    got = np.sort_complex(np.round(np.array([q1, q2]) / scale, 9))
    ref = _quartic_q2(0.5, 0.5, -0.5, kx / 1e6, kappa / 1e6)
    assert np.allclose(got, ref, atol=1e-3)


def test_singular_medium():
    with pytest.raises(SingularMediumError):
        gm.dispersion_q_squared(0.0, 1.0, 0.0, 1e6, 1e14)


@given(
    st.floats(1e-3, 2.0), st.floats(1e-4, 2.0), st.floats(-2.0, 2.0),
    st.floats(0.0, 50.0), st.floats(1e12, 1e16),
)
def test_round_trip_forward_relation(d1, d2, gp, kx_ratio, xi):
    kappa = xi / C
    kx = kx_ratio * kappa
    for q_sq in gm.dispersion_q_squared(d1, d2, gp, kx, xi):
        q = np.sqrt(complex(q_sq))
        branches = gm.forward_frequency_squared(d1, d2, gp, kx, q)
        err = min(abs(b - kappa ** 2) for b in branches) / kappa ** 2
        assert err < 1e-10


def test_select_modes_examples():
    pair = gm.select_modes((-4.0, 3 + 4j), gm.Direction.PLUS_Z)
    assert pair.q1 == pytest.approx(2j)
    assert pair.q2 == pytest.approx(2 + 1j)
    low = gm.select_modes((-4.0, 3 + 4j), gm.Direction.MINUS_Z)
    assert low.q1 == pytest.approx(-2j) and low.q2 == pytest.approx(-2 - 1j)


def test_select_modes_conjugate_pair():
    z = -3 + 2j
    pair = gm.select_modes((z, np.conj(z)), gm.Direction.PLUS_Z)
    assert pair.q1 == pytest.approx(-np.conj(pair.q2), rel=1e-14)


def test_grazing_mode():
    with pytest.raises(GrazingModeError):
        gm.select_modes((4.0, -1.0))


def test_decoupled_when_gprime_zero():
    d1, d2 = 0.25, 0.5
    kx, xi = 1e6, 3e14
    kappa = xi / C
    q_tm = -1j * np.sqrt(d2 / d1 * kx ** 2 + kappa ** 2 / d1)
    mode = gm.eigenstate(q_tm, d1, d2, 0.0, kx, xi)
    assert mode.e_field[1] == 0
    assert mode.h_field[0] == 0 and mode.h_field[2] == 0
    # the closed form collapses on the ordinary (TE) root
    q_te = -1j * np.sqrt(kx ** 2 + kappa ** 2 / d1)
    with pytest.raises(DegenerateModeError):
        gm.eigenstate(q_te, d1, d2, 0.0, kx, xi)


def test_normal_incidence_transverse():
    tm, te = gm.decoupled_eigenstates(4.0, 2.0, 0.0, 3e14)
    for mode in (tm, te):
        assert mode.e_field[2] == 0 and mode.h_field[2] == 0


def _table1_weyl_modes(kx_ratio=1.0):
    tensor = WeylParams(1.0, 1e15).tensor(XI1)
    kx = kx_ratio * XI1 / C
    q1s, q2s = gm.dispersion_q_squared(tensor.d1, tensor.d2, tensor.gprime, kx, XI1)
    pair = gm.select_modes((q1s, q2s))
    modes = [gm.eigenstate(q, tensor.d1, tensor.d2, tensor.gprime, kx, XI1)
             for q in (pair.q1, pair.q2)]
    return tensor, kx, pair, modes


def test_weyl_residual():
    tensor, kx, pair, modes = _table1_weyl_modes()
    for mode in modes:
        assert gm.maxwell_residual(mode, tensor, kx, XI1) < 1e-9
    assert pair.q1 == pytest.approx(-np.conj(pair.q2), rel=1e-12)


def test_perturbed_mode_fails_residual():
    tensor, kx, _, modes = _table1_weyl_modes()
    bad = modes[0].with_q(modes[0].q * 1.01)
    assert gm.maxwell_residual(bad, tensor, kx, XI1) > 1e-6


def test_vacuum_plane_wave_residual():
    kx, xi = 2e6, 3e14
    tm, te = gm.decoupled_eigenstates(1.0, 1.0, kx, xi)
    vac = PermittivityTensor.isotropic(1.0)
    for mode in (tm, te):
        assert mode.q == pytest.approx(-1j * np.hypot(kx, xi / C))
        assert gm.maxwell_residual(mode, vac, kx, xi) < 1e-12


@given(
    st.floats(1.0, 30.0), st.floats(1.0, 1e4), st.floats(1e-3, 30.0),
    st.floats(0.0, 100.0), st.floats(1e12, 1e16), st.booleans(),
)
def test_residual_property(eps1, eps2, g, kx_ratio, xi, flip):
    tensor = PermittivityTensor(eps1, eps2, -g if flip else g)
    kx = kx_ratio * xi / C
    q1s, q2s = gm.dispersion_q_squared(tensor.d1, tensor.d2, tensor.gprime, kx, xi)
    assume(abs(q1s - q2s) > 1e-6 * max(abs(q1s), abs(q2s)))
    pair = gm.select_modes((q1s, q2s))
    for q in (pair.q1, pair.q2):
        mode = gm.eigenstate(q, tensor.d1, tensor.d2, tensor.gprime, kx, xi)
        assert gm.maxwell_residual(mode, tensor, kx, xi) < 1e-9
    if abs(q1s.imag) > 1e-12 * abs(q1s):
        # complex-conjugate q^2 pair
        assert abs(pair.q1 + np.conj(pair.q2)) <= 1e-10 * abs(pair.q1)
    else:
        # two real negative q^2: both modes purely evanescent
        assert abs(pair.q1.real) <= 1e-12 * abs(pair.q1)
        assert abs(pair.q2.real) <= 1e-12 * abs(pair.q2)


@given(st.floats(1.0, 30.0), st.floats(1e-3, 1e3), st.floats(0.0, 100.0), st.floats(1e12, 1e16))
def test_weyl_pairs_always_conjugate(eps, g, kx_ratio, xi):
    t = PermittivityTensor(eps, eps, g)
    kx = kx_ratio * xi / C
    pair = gm.select_modes(gm.dispersion_q_squared(t.d1, t.d2, t.gprime, kx, xi))
    assert abs(pair.q1 + np.conj(pair.q2)) <= 1e-10 * abs(pair.q1)


def test_gyro_roots_approach_isotropic():
    kx, xi = 1e6, 3e14
    gaps = []
    for g in (1e-1, 1e-3, 1e-5):
        t = PermittivityTensor(3.0, 3.0, g)
        a, b = gm.dispersion_q_squared(t.d1, t.d2, t.gprime, kx, xi)
        gaps.append(abs(a - b) / abs(a))
    assert gaps[0] > gaps[1] > gaps[2]


def test_broadcasting():
    t = WeylParams(1.0, 1e15).tensor(np.array([XI1, 2 * XI1]))
    kx = np.array([1.0, 2.0]) * XI1 / C
    a, b = gm.dispersion_q_squared(t.d1, t.d2, t.gprime, kx, np.array([XI1, 2 * XI1]))
    assert a.shape == (2,) and b.shape == (2,)


@pytest.mark.parametrize("eps2_shift, g", [(1e-14, 2e-9), (3e-9, 4e-7), (0.0, 0.0)])
def test_stable_eigenstate_near_coincident_roots(eps2_shift, g):
    # weak gyrotropy with eps1 ~ eps2: the roots nearly coincide and the
    # closed form cancels, yet a state with rounding-level residual exists
    t = PermittivityTensor(5.0, 5.0 + eps2_shift, g)
    xi = 100 * XI1
    kx = 20 * xi / C
    pair = gm.select_modes(gm.dispersion_q_squared(t.d1, t.d2, t.gprime, kx, xi))
    for q in (pair.q1, pair.q2):
        mode = gm.stable_eigenstate(q, t.eps1, t.eps2, t.g, kx, xi)
        assert gm.maxwell_residual(mode, t, kx, xi) < 1e-12
    if g == 0.0:
        with pytest.raises(DegenerateModeError):
            gm.eigenstate(pair.q1, t.d1, t.d2, t.gprime, kx, xi)
