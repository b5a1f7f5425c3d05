import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lattice_qnd.angular_momentum import HalfInt
from lattice_qnd.atomic_structure import (HyperfineLine, PopulationDistribution, ProbeGeometry,
                                          TransitionManifold, atomic_phase_shift,
                                          differential_phase, dispersive_factor,
                                          effective_cross_section, line_strength,
                                          population_preset, single_line_manifold)

from .conftest import OMEGA_90

GAMMA = 2 * math.pi * 30e6


def two_level_phase(N, S, detuning_hz, wavelength=461e-9, gamma=GAMMA):
    """J=0 -> J'=1: all angular factors multiply to one."""
    d = 2 * math.pi * detuning_hz
    return 3 * wavelength**2 * N / (4 * math.pi * S) * (gamma / 2) * d / (d**2 + gamma**2 / 4)


# -- cross section ------------------------------------------------------------

def test_cross_section_default_geometry(geometry):
    S = effective_cross_section(geometry)
    assert S * 1e12 == pytest.approx(2.7787e3, rel=1e-4)
    assert S * 1e12 == pytest.approx(2.8e3, rel=0.02)


def test_cross_section_limits():
    assert effective_cross_section(ProbeGeometry(0, 2.0)) == pytest.approx(2 * math.pi)
    assert effective_cross_section(ProbeGeometry(0, 1e-12)) < 1e-23
    with pytest.raises(ValueError):
        ProbeGeometry(1e-6, 0)


# -- dispersive factor --------------------------------------------------------

def test_dispersive_factor_basics():
    assert dispersive_factor(0.0, GAMMA) == 0.0
    half_width_hz = GAMMA / 2 / (2 * math.pi)
    assert dispersive_factor(half_width_hz, GAMMA) == pytest.approx(0.5, abs=1e-15)
    grid = np.linspace(-5, 5, 20001) * GAMMA / (2 * math.pi)
    assert np.max(dispersive_factor(grid, GAMMA)) <= 0.5 + 1e-15


@given(st.floats(-1e10, 1e10, allow_nan=False))
def test_dispersive_factor_odd(det):
    assert dispersive_factor(-det, GAMMA) == -dispersive_factor(det, GAMMA)


# -- manifold -----------------------------------------------------------------

def test_sr_default_lines(sr_manifold):
    offsets = {str(ln.F_excited): ln.detuning_offset / 1e6 for ln in sr_manifold.lines}
    assert offsets["7/2"] == pytest.approx(36.575)
    assert offsets["9/2"] == pytest.approx(-22.6)
    assert offsets["11/2"] == pytest.approx(-5.55)
    span = max(offsets.values()) - min(offsets.values())
    assert 55 < span < 65
    assert abs(sr_manifold.reference_offset) < 1e-3


def test_manifold_validation():
    with pytest.raises(ValueError):
        HyperfineLine(0, 2, 0.0)
    line = HyperfineLine(0, 1, 0.0)
    with pytest.raises(ValueError):
        TransitionManifold(461e-9, GAMMA, 0, 1, 0, (line, line))
    with pytest.raises(ValueError):
        TransitionManifold(-1, GAMMA, 0, 1, 0, (line,))


def test_population_presets():
    u = population_preset("sr87_blue_unpolarized", 1e4)
    assert len(u.counts) == 10 and u.total == pytest.approx(1e4)
    s = population_preset("sr87_blue_stretched", 1e4)
    assert s.counts == {HalfInt(9): 1e4}
    with pytest.raises(ValueError):
        PopulationDistribution("9/2", {"11/2": 1.0})


# -- phase shift --------------------------------------------------------------

def test_two_level_closed_form(line_manifold, geometry):
    pop = PopulationDistribution.unpolarized(0, 1e4)
    S = effective_cross_section(geometry)
    for det in (-200e6, -15e6, 3e6, 90e6):
        assert atomic_phase_shift(line_manifold, pop, geometry, 0, det) == pytest.approx(
            two_level_phase(1e4, S, det), rel=1e-12)


def test_far_detuned_sr_matches_two_level(sr_manifold, line_manifold, geometry, unpolarized):
    # total oscillator strength summed over F' equals the I = 0 case
    for det in (20e9, -20e9):
        sr = atomic_phase_shift(sr_manifold, unpolarized, geometry, 0, det)
        two = atomic_phase_shift(line_manifold, PopulationDistribution.unpolarized(0, 1e4),
                                 geometry, 0, det)
        assert sr == pytest.approx(two, rel=1e-4)


def test_phase_at_90_MHz_few_tens_of_mrad(sr_manifold, geometry):
    for preset in ("sr87_blue_unpolarized", "sr87_blue_stretched"):
        phi = atomic_phase_shift(sr_manifold, population_preset(preset, 1e4), geometry, 0, 90e6)
        assert 10e-3 <= phi <= 60e-3


def test_zero_population_and_resonance(sr_manifold, line_manifold, geometry):
    empty = PopulationDistribution.unpolarized("9/2", 0.0)
    assert atomic_phase_shift(sr_manifold, empty, geometry, 0, 90e6) == 0.0
    pop = PopulationDistribution.unpolarized(0, 1e4)
    assert atomic_phase_shift(line_manifold, pop, geometry, 0, 0.0) == 0.0
    shifted = single_line_manifold(offset_hz=0.0)
    assert atomic_phase_shift(shifted, pop, geometry, 0, 0.0) == 0.0


def test_population_without_line(sr_manifold, geometry):
    with pytest.raises(ValueError):
        atomic_phase_shift(sr_manifold, PopulationDistribution.unpolarized(0, 1.0), geometry, 0, 0)


def test_linearity(sr_manifold, geometry):
    rng = np.random.default_rng(0)
    counts = {HalfInt(m): float(x) for m, x in zip(range(-9, 10, 2), rng.uniform(0, 1e3, 10))}
    pop = PopulationDistribution("9/2", counts)
    base = atomic_phase_shift(sr_manifold, pop, geometry, 0, 70e6)
    assert atomic_phase_shift(sr_manifold, pop.scaled(3.5), geometry, 0, 70e6) == pytest.approx(
        3.5 * base, rel=1e-12)
    # additive over substates
    parts = sum(atomic_phase_shift(sr_manifold, PopulationDistribution("9/2", {m: n}), geometry, 0, 70e6)
                for m, n in counts.items())
    assert parts == pytest.approx(base, rel=1e-12)
    # 1/S: scale both lengths by sqrt(2) -> S doubles
    g2 = ProbeGeometry(geometry.cloud_radius * math.sqrt(2), geometry.beam_waist * math.sqrt(2))
    assert atomic_phase_shift(sr_manifold, pop, g2, 0, 70e6) == pytest.approx(base / 2, rel=1e-12)


def test_single_line_odd_symmetry(geometry):
    m = single_line_manifold(offset_hz=0.0)
    pop = PopulationDistribution.unpolarized(0, 1e4)
    det = np.linspace(1e5, 3e8, 500)
    plus = atomic_phase_shift(m, pop, geometry, 0, det)
    minus = atomic_phase_shift(m, pop, geometry, 0, -det)
    np.testing.assert_allclose(minus, -plus, rtol=1e-12)


def test_sum_rule_independent_of_q(sr_manifold):
    for line in sr_manifold.lines:
        sums = [sum(line_strength(sr_manifold, line, HalfInt(m), q) for m in range(-9, 10, 2))
                for q in (-1, 0, 1)]
        assert sums[0] == sums[1] == sums[2]
        assert isinstance(sums[0], Fraction)


def test_stretched_states(sr_manifold, geometry):
    det = np.linspace(-150e6, 150e6, 301)
    up = PopulationDistribution.stretched("9/2", 1e4, +1)
    down = PopulationDistribution.stretched("9/2", 1e4, -1)
    a = atomic_phase_shift(sr_manifold, up, geometry, 0, det)
    b = atomic_phase_shift(sr_manifold, down, geometry, 0, det)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=0)
    for q in (-1, 1):
        np.testing.assert_allclose(atomic_phase_shift(sr_manifold, up, geometry, q, det),
                                   atomic_phase_shift(sr_manifold, down, geometry, -q, det),
                                   rtol=1e-12)


def test_differential_phase(line_manifold, sr_manifold, geometry, unpolarized):
    pop = PopulationDistribution.unpolarized(0, 1e4)
    w = OMEGA_90
    assert differential_phase(line_manifold, pop, geometry, 0, w) == pytest.approx(
        2 * atomic_phase_shift(line_manifold, pop, geometry, 0, w / (2 * math.pi)), rel=1e-14)
    empty = PopulationDistribution.unpolarized("9/2", 0)
    assert differential_phase(sr_manifold, empty, geometry, 0, w) == 0.0
    diff = differential_phase(sr_manifold, unpolarized, geometry, 0, w)
    single = atomic_phase_shift(sr_manifold, unpolarized, geometry, 0, 90e6)
    assert 10e-3 < diff < 100e-3 and 1 < diff / single < 3
    with pytest.raises(ValueError):
        differential_phase(sr_manifold, unpolarized, geometry, 0, -1.0)
