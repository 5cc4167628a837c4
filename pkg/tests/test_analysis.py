import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gyrocasimir import analysis as an
from gyrocasimir.analysis import Regime, Stability
from gyrocasimir.config import config_from_preset
from gyrocasimir.errors import DomainError
from gyrocasimir.lifshitz import PlateSystem
from gyrocasimir.materials import IdealPlate, IsotropicParams, SiliconParams, WeylParams
from gyrocasimir.quantities import CONSTANTS, first_matsubara_frequency

UNIT = first_matsubara_frequency(200.0) / CONSTANTS.c


def test_ideal_benchmarks_closed_form():
    p_c, p_b = an.ideal_benchmarks(0.2e-6)
    assert p_c == pytest.approx(-0.8125, rel=2e-3)
    assert p_b / p_c == -0.875
    with pytest.raises(DomainError):
        an.ideal_benchmarks(0.0)


def test_diagnostic_isotropic_is_non_gyro():
    system = PlateSystem.from_materials(IsotropicParams(4.0), IsotropicParams(3.0))
    diag = an.repulsion_diagnostic(system, 0.6e-6)
    assert diag.cross_term_sum == 0.0
    assert diag.diag_term_sum > 0
    assert diag.regime is Regime.NON_GYRO and diag.offdiag_ratio == 0.0


def test_diagnostic_weyl_orientations():
    grey = WeylParams(1.1, 1e15)
    par = an.repulsion_diagnostic(PlateSystem.from_materials(grey, grey), 0.6e-6)
    anti = an.repulsion_diagnostic(PlateSystem.from_materials(grey, grey, "antiparallel"), 0.6e-6)
    assert par.cross_term_sum < 0 < anti.cross_term_sum
    assert par.cross_term_sum == pytest.approx(-anti.cross_term_sum, rel=1e-12)
    assert par.diag_term_sum == pytest.approx(anti.diag_term_sum, rel=1e-12)
    assert par.regime is Regime.MIXED


@pytest.mark.parametrize("d", [0.2e-6, 0.6e-6])
def test_diagnostic_sign_tracks_pressure(weyl_black, d):
    from gyrocasimir.lifshitz import pressure
    diag = an.repulsion_diagnostic(weyl_black, d)
    p = pressure(weyl_black, d).pressure
    assert np.sign(-(diag.cross_term_sum + diag.diag_term_sum)) == np.sign(p)


def test_diagnostic_ultra_strong(monkeypatch):
    monkeypatch.setattr(an, "ULTRA_STRONG_RATIO", 0.5)
    w = WeylParams(1.0, 3e15)
    assert an.repulsion_diagnostic(PlateSystem.from_materials(w, w), 0.2e-6).regime \
        is Regime.ULTRA_STRONG_GYRO


def test_sweep_keeps_partial_sums():
    system = PlateSystem.from_materials(SiliconParams(), SiliconParams(), n_cap=2)
    curve = an.pressure_sweep(system, [0.05e-6, 0.5e-6])
    # an exhausted Matsubara cap still returns the partial sums
    assert len(curve.results) == 2 and not curve.failures and not curve.converged
    assert not any(r.converged for r in curve.results)


def test_sweep_records_failures_and_continues(monkeypatch):
    from gyrocasimir import lifshitz
    from gyrocasimir.errors import ModeInstabilityError
    real = lifshitz.pressure

    def flaky(system, d, tol, energy=True):
        if d > 0.15e-6:
            raise ModeInstabilityError("synthetic")
        return real(system, d, tol, energy=energy)

    monkeypatch.setattr(lifshitz, "pressure", flaky)
    system = PlateSystem.from_materials(SiliconParams(), SiliconParams())
    curve = an.pressure_sweep(system, [0.1e-6, 0.2e-6, 0.3e-6])
    assert [r.distance for r in curve.results] == [0.1e-6]
    assert set(curve.failures) == {0.2e-6, 0.3e-6} and not curve.converged


def test_sweep_validates_distances():
    system = PlateSystem.from_materials(SiliconParams(), SiliconParams())
    with pytest.raises(DomainError):
        an.pressure_sweep(system, [0.2e-6, 0.1e-6])
    with pytest.raises(DomainError):
        an.pressure_sweep(system, [0.0])


def test_sweep_outputs():
    system = PlateSystem.from_materials(SiliconParams(), SiliconParams())
    curve = an.pressure_sweep(system, [0.1e-6, 0.2e-6], workers=2)
    lines = curve.to_csv().splitlines()
    assert lines[0].startswith("# ")
    assert lines[1] == ",".join(an.CSV_COLUMNS)
    assert len(lines) == 4 and lines[2].endswith(",1")
    rows = json.loads(curve.to_json())
    assert [r["d_m"] for r in rows] == [0.1e-6, 0.2e-6]
    assert set(rows[0]) == set(an.CSV_COLUMNS)
    assert all(p < 0 for p in curve.pressures)


def test_no_equilibrium_for_conductors():
    system = PlateSystem.from_materials(IdealPlate.PERFECT_CONDUCTOR, IdealPlate.PERFECT_CONDUCTOR)
    assert an.find_equilibria(system, (0.05e-6, 1e-6), points_per_decade=8) == []


def test_black_equilibrium_stable():
    system = config_from_preset("fig3-black").system()
    eqs = an.find_equilibria(system, (0.2e-6, 0.6e-6), points_per_decade=16)
    assert len(eqs) == 1
    eq = eqs[0]
    assert eq.stability is Stability.STABLE
    assert eq.bracket[0] < eq.d0 < eq.bracket[1]
    assert eq.d0 == pytest.approx(0.39987e-6, rel=1e-3)
    # |P| at the root is tiny compared with the pressure at the bracket ends
    assert abs(eq.residual_pressure) < 1e-3 * 8.4e-5


def test_grey_has_second_root_beyond_figure_range():
    system = config_from_preset("fig3-grey").system()
    eqs = an.find_equilibria(system, (0.5e-6, 3e-6), points_per_decade=16)
    assert [e.stability for e in eqs] == [Stability.STABLE]
    assert eqs[0].d0 == pytest.approx(1.055e-6, rel=1e-3)


def test_find_equilibria_range_checks(weyl_black):
    with pytest.raises(DomainError):
        an.find_equilibria(weyl_black, (1e-6, 0.5e-6))


def test_integrand_profile_columns(weyl_black):
    k = np.linspace(1, 100, 50) * UNIT
    prof = an.integrand_profile(weyl_black, 1, 0.41e-6, k)
    cols = prof.columns()
    assert list(cols)[:2] == ["k_x_per_m", "integrand_per_m2"]
    assert {f"abs_r{a}{b}_{p}" for a in "sp" for b in "sp" for p in "12"} <= set(cols)
    # parallel identical plates: |r_sp1| = |r_ps2|
    assert np.allclose(prof.plate1["rsp"], prof.plate2["rps"], rtol=1e-10)


def test_integrand_isotropic_no_cross():
    system = PlateSystem.from_materials(SiliconParams(), SiliconParams())
    prof = an.integrand_profile(system, 1, 0.1e-6, np.linspace(1, 50, 20) * UNIT)
    assert np.all(prof.plate1["rsp"] == 0) and np.all(prof.plate2["rps"] == 0)
    assert np.all(prof.integrand < 0)


@pytest.mark.parametrize("values, expected", [
    ([-1, -2, -1, 1, 3, 1], ["-", "+"]),
    ([2, 1, -1, -2], ["+", "-"]),
    ([1, 1, 1], ["+"]),
    ([-5, -5, 1e-6, -5, -5], ["-"]),
    ([0, 0, -1, 1], ["-", "+"]),
])
def test_sign_pattern_examples(values, expected):
    assert an.sign_pattern(np.arange(len(values), dtype=float), values) == expected


@given(st.lists(st.floats(-10, 10, allow_nan=False).filter(lambda v: abs(v) > 1e-3),
                min_size=2, max_size=40))
def test_sign_pattern_alternates(values):
    pat = an.sign_pattern(np.arange(len(values), dtype=float), values)
    assert all(a != b for a, b in zip(pat, pat[1:]))
    assert len(pat) >= 1


def test_dominance_window_example():
    k = np.linspace(0, 10, 11)
    mags = {"rsp": np.where((k >= 3) & (k <= 5), 1.0, 0.0), "rss": np.full(11, 0.5),
            "rpp": np.full(11, 0.2)}
    assert an.dominance_window(k, mags) == pytest.approx(3.0)
    mags["rsp"][:] = 0
    assert an.dominance_window(k, mags) == 0.0


def test_curve_json_handles_missing_energy():
    system = PlateSystem.from_materials(SiliconParams(), SiliconParams())
    curve = an.pressure_sweep(system, [0.2e-6], energy=False)
    assert math.isnan(curve.results[0].energy_per_area)
    assert json.loads(curve.to_json())[0]["energy_J_per_m2"] is None
    assert curve.to_csv().splitlines()[2].split(",")[2] == "nan"
