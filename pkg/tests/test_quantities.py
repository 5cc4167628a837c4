import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gyrocasimir.errors import DomainError
from gyrocasimir.quantities import (CONSTANTS, DEFAULT_XI0_FRACTION, build_grid,
                                    first_matsubara_frequency, geometric_tail,
                                    matsubara_frequency, thz, vacuum_decay)


def test_constants_positive_and_codata():
    for name in ("hbar", "k_B", "c", "eps0", "e"):
        assert getattr(CONSTANTS, name) > 0
    assert CONSTANTS.c == 299792458.0
    with pytest.raises(AttributeError):
        CONSTANTS.c = 3e8


def test_first_matsubara_200K():
    # 2 pi k_B T / hbar with the exact SI values of k_B and h
    ref = 2 * math.pi * 1.380649e-23 * 200 / (6.62607015e-34 / (2 * math.pi))
    assert matsubara_frequency(1, 200.0) == pytest.approx(ref, rel=1e-12)
    assert matsubara_frequency(1, 200.0) == pytest.approx(1.6452e14, rel=1e-4)


def test_linear_in_n_and_T():
    assert matsubara_frequency(2, 200.0) == pytest.approx(2 * matsubara_frequency(1, 200.0), rel=1e-15)
    assert first_matsubara_frequency(300.0) / first_matsubara_frequency(200.0) == pytest.approx(1.5)


def test_weyl_g_from_first_frequency():
    assert 1e15 / matsubara_frequency(1, 200.0) == pytest.approx(6.0778, rel=1e-4)


def test_zero_frequency_is_regularized():
    xi1 = first_matsubara_frequency(200.0)
    assert matsubara_frequency(0, 200.0) == pytest.approx(DEFAULT_XI0_FRACTION * xi1)
    assert matsubara_frequency(0, 200.0, xi0_regularization=3.0) == 3.0


@pytest.mark.parametrize("T", [0.0, -1.0])
def test_bad_temperature(T):
    with pytest.raises(DomainError):
        matsubara_frequency(1, T)
    with pytest.raises(DomainError):
        build_grid(T)


def test_grid_invariants():
    grid = build_grid(200.0, 1e-6, 10000)
    assert grid.weights[0] == 0.5
    assert np.all(grid.weights[1:] == 1.0)
    assert grid.frequencies[0] == grid.xi0_regularization > 0
    n = np.arange(1, grid.n_max + 1)
    assert np.allclose(grid.frequencies[1:] / grid.xi1, n, rtol=1e-14, atol=0)
    assert np.sum(grid.weights) == grid.n_max + 0.5


def test_grid_cap_binds():
    grid = build_grid(200.0, 1e-6, 1)
    assert grid.n_max == 1
    assert len(grid.frequencies) == 2


def test_grid_sized_by_distance():
    d = 0.2e-6
    grid = build_grid(200.0, 1e-6, distance=d)
    step = 2 * grid.xi1 * d / CONSTANTS.c
    # exp(-2 xi_nmax d / c) already below the tolerance
    assert math.exp(-step * (grid.n_max - 1)) <= 1e-6
    assert grid.extended(grid.n_max + 5).n_max == grid.n_max + 5


def test_grid_arrays_readonly():
    grid = build_grid(200.0, n_cap=4)
    with pytest.raises(ValueError):
        grid.frequencies[1] = 0.0


@pytest.mark.parametrize("k, xi, expected", [
    (0.0, CONSTANTS.c * 1e6, 1e6),
    (3.0, 4.0 * CONSTANTS.c, 5.0),
    (1e7, 0.0, 1e7),
])
def test_vacuum_decay_examples(k, xi, expected):
    assert vacuum_decay(k, xi) == pytest.approx(expected, rel=1e-14)


def test_vacuum_decay_origin():
    with pytest.raises(DomainError):
        vacuum_decay(0.0, 0.0)


@given(st.floats(0, 1e9), st.floats(1e8, 1e17), st.floats(1e-3, 1.0))
def test_vacuum_decay_monotone(k, xi, bump):
    base = vacuum_decay(k, xi)
    assert vacuum_decay(k * (1 + bump) + bump, xi) >= base
    assert vacuum_decay(k, xi * (1 + bump)) >= base


def test_geometric_tail():
    terms = [0.5 ** n for n in range(10)]
    assert geometric_tail(terms) == pytest.approx(sum(0.5 ** n for n in range(10, 200)))
    assert geometric_tail([1.0]) == math.inf
    assert geometric_tail([1.0, 0.0]) == 0.0


def test_thz():
    assert thz(120) == 1.2e14
