import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.optimize import brentq

from lattice_qnd.atomic_structure import PopulationDistribution, differential_phase
from lattice_qnd.heating_retention import absorbed_photons
from lattice_qnd.modulation_signal import ModulationSettings
from lattice_qnd.noise_shot import DetectionSettings, shot_noise_variance
from lattice_qnd.snr_optimizer import (BudgetError, SnrBudget, linewidth_sensitivity,
                                       optimize_modulation, pulse_energy_for_budget,
                                       sideband_loss_fraction, snr)

from .conftest import OMEGA_90

MHZ = 2 * math.pi * 1e6


@pytest.fixture(scope="module")
def budget(sr_manifold, unpolarized, geometry):
    return SnrBudget(80.0, sr_manifold, unpolarized, geometry)


def test_snr_matches_independent_route(budget):
    """Solve n_gamma(P) = target by root finding, then build the SNR from the noise module."""
    mod, T = ModulationSettings(2.4, OMEGA_90), 3e-3
    P = brentq(lambda p: absorbed_photons(p, T, mod, budget.manifold) - 80.0, 1e-12, 1e-3,
               xtol=1e-20, rtol=1e-13)
    det = DetectionSettings(probe_power=P, pulse_duration=T)
    var = shot_noise_variance(2.4, det, budget.manifold.wavelength)
    phase = differential_phase(budget.manifold, budget.populations, budget.geometry, 0, OMEGA_90)
    assert snr(OMEGA_90, 2.4, budget) == pytest.approx(phase / math.sqrt(2 * var), rel=1e-9)
    assert pulse_energy_for_budget(OMEGA_90, 2.4, budget) == pytest.approx(P * T, rel=1e-9)


def test_snr_independent_of_pulse_split(budget):
    # only P T enters; the detection settings' P and T are irrelevant
    other = replace(budget, detection=DetectionSettings(probe_power=50e-9, pulse_duration=1e-3))
    assert snr(OMEGA_90, 2.4, other) == snr(OMEGA_90, 2.4, budget)


def test_snr_scalings(budget):
    base = snr(OMEGA_90, 2.4, budget)
    assert snr(OMEGA_90, 2.4, replace(budget, target_n_gamma=320.0)) == pytest.approx(2 * base, rel=1e-12)
    more = replace(budget, populations=budget.populations.scaled(3.0))
    assert snr(OMEGA_90, 2.4, more) == pytest.approx(3 * base, rel=1e-12)


def test_snr_errors(budget):
    with pytest.raises(ValueError):
        snr(-1.0, 2.4, budget)
    with pytest.raises(BudgetError):
        snr(OMEGA_90, 0.0, budget)
    with pytest.raises(ValueError):
        SnrBudget(0.0, budget.manifold, budget.populations, budget.geometry)


def test_single_line_snr_rises_beyond_linewidth(line_manifold, geometry):
    b = SnrBudget(80.0, line_manifold, PopulationDistribution.unpolarized(0, 1e4), geometry)
    gamma = line_manifold.linewidth
    values = [snr(x * gamma, 2.4, b) for x in np.linspace(1.0, 3.0, 21)]
    assert np.all(np.diff(values) > 0)


def test_optimizer_agrees_with_fine_grid(budget):
    w_rng, a_rng = (10 * MHZ, 300 * MHZ), (1.5, 3.2)
    res = optimize_modulation(budget, w_rng, a_rng)
    assert not res.on_boundary
    assert 2.35 <= res.depth <= 2.45
    # brute-force oracle on a fine local grid around the optimum
    ws = np.linspace(res.omega - 10 * MHZ, res.omega + 10 * MHZ, 81)
    aa = np.linspace(res.depth - 0.1, res.depth + 0.1, 81)
    brute = max(snr(w, a, budget) for w in ws for a in aa)
    assert res.snr >= brute * (1 - 1e-3)
    assert res.snr == pytest.approx(snr(res.omega, res.depth, budget), rel=1e-12)


def test_optimizer_stable_under_grid_refinement(budget):
    w_rng, a_rng = (10 * MHZ, 300 * MHZ), (1.5, 3.2)
    coarse = optimize_modulation(budget, w_rng, a_rng, grid=30)
    fine = optimize_modulation(budget, w_rng, a_rng, grid=60)
    assert fine.snr == pytest.approx(coarse.snr, rel=1e-3)
    assert fine.depth == pytest.approx(coarse.depth, abs=0.02)


def test_optimizer_warns_on_boundary(budget):
    with pytest.warns(RuntimeWarning, match="boundary"):
        res = optimize_modulation(budget, (10 * MHZ, 300 * MHZ), (1.0, 1.6), grid=15)
    assert res.on_boundary and res.depth == pytest.approx(1.6)


def test_sideband_loss(budget):
    assert sideband_loss_fraction(OMEGA_90, 0.0, budget) == 0.0
    # grows with depth while the carrier still dominates the |n| <= 1 heating
    loss = [sideband_loss_fraction(OMEGA_90, a, budget) for a in np.linspace(0.1, 2.2, 15)]
    assert np.all(np.diff(loss) > 0)
    assert 0.07 < sideband_loss_fraction(OMEGA_90, 2.4, budget) < 0.10


def test_linewidth_sensitivity(budget):
    gammas = [2 * math.pi * 28e6, 2 * math.pi * 32e6]
    out = linewidth_sensitivity(OMEGA_90, 2.4, budget, gammas)
    assert list(out) == gammas
    assert out[gammas[0]] < sideband_loss_fraction(OMEGA_90, 2.4, budget) < out[gammas[1]]
