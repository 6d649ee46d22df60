import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sympcool.trap import (
    PRESET_TRAPS,
    EnergyGrid,
    TrapSpec,
    critical_temperature,
    degeneracy,
    density_of_states,
    fermi_level,
    tau0,
)


def test_degeneracy_first_levels():
    assert [degeneracy(n) for n in (1, 2, 3, 4)] == [1, 3, 6, 10]
    with pytest.raises(ValueError):
        degeneracy(0)


def test_grid_energies_and_capacity():
    grid = EnergyGrid(6)
    assert np.array_equal(grid.energies, np.arange(6.0))
    assert np.array_equal(grid.degeneracies, [1, 3, 6, 10, 15, 21])
    assert grid.capacity == sum([1, 3, 6, 10, 15, 21])


@given(st.integers(min_value=1, max_value=2000))
def test_capacity_matches_cumulative_count(n):
    grid = EnergyGrid(n)
    assert grid.capacity == pytest.approx(float(np.sum(grid.degeneracies)), rel=1e-12)


def test_density_of_states_quadratic():
    assert density_of_states(10.0) == 50.0
    assert density_of_states(0.0) == 0.0
    with pytest.raises(ValueError):
        density_of_states(-1.0)


def test_fermi_level_continuum():
    assert fermi_level(1e4, "continuum") == pytest.approx((6e4) ** (1 / 3), rel=1e-12)


def test_fermi_level_discrete_quoted_values():
    assert fermi_level(1e3) == pytest.approx(16.36, abs=0.1)
    assert fermi_level(1e4) == pytest.approx(37.2, abs=0.2)
    assert fermi_level(1e5) == pytest.approx(82.0, abs=0.5)


def test_fermi_level_discrete_inverts_cubic():
    for n in (10.0, 1e3, 2.5e6):
        e = fermi_level(n)
        assert e**3 / 6 + e**2 == pytest.approx(n, rel=1e-9)


def test_critical_temperature_quoted_values():
    assert critical_temperature(1e5) == pytest.approx(43.7, abs=0.05)
    assert critical_temperature(1e6) == pytest.approx(94.1, abs=0.05)


def test_potassium_timescale():
    spec = PRESET_TRAPS["K40-K39"]
    assert tau0(spec) == pytest.approx(1254.0, rel=0.01)


def test_potassium_cross_section_ratio():
    spec = PRESET_TRAPS["K40-K39"]
    assert spec.alpha_b == pytest.approx(2 * (4.3 / 2.5) ** 2, rel=1e-12)


def test_sigma_convention_scales_tau0_by_pi():
    std = PRESET_TRAPS["K40-K39"]
    lit = TrapSpec(mass=std.mass, omega=std.omega, a_b=std.a_b, a_bf=std.a_bf,
                   sigma_convention="paper-literal")
    assert tau0(std) / tau0(lit) == pytest.approx(math.pi, rel=1e-12)
    with pytest.raises(ValueError):
        TrapSpec(mass=1.0, omega=1.0, a_b=1e-9, a_bf=1e-9, sigma_convention="odd")


def test_trap_spec_validation():
    with pytest.raises(ValueError):
        TrapSpec(mass=-1.0, omega=400.0, a_b=1e-9, a_bf=1e-9)
    with pytest.raises(ValueError):
        EnergyGrid(0)


def test_oscillator_length_positive():
    spec = PRESET_TRAPS["K40-K39"]
    assert spec.osc_length > 0
    assert spec.hbar_omega == pytest.approx(1.054571817e-34 * 400.0, rel=1e-12)
