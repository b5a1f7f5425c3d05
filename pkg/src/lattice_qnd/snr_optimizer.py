"""Detection SNR at a fixed heating budget and its optimization over (omega, a).

At fixed photons absorbed per atom the pulse energy ``P T`` is set by the
scattering weight of the modulated spectrum, so only ``P T`` (not P or T on
their own) enters the SNR.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import jv

from . import constants as const
from .atomic_structure import (PopulationDistribution, ProbeGeometry, TransitionManifold,
                               differential_phase)
from .heating_retention import scattering_weight
from .noise_shot import DetectionSettings
from .search import golden_section

__all__ = [
    "SnrBudget",
    "BudgetError",
    "OptimizationResult",
    "pulse_energy_for_budget",
    "snr",
    "optimize_modulation",
    "sideband_loss_fraction",
    "linewidth_sensitivity",
]


class BudgetError(ValueError):
    """The requested heating budget cannot be realized with signal in the +-1 sidebands."""


@dataclass(frozen=True)
class SnrBudget:
    target_n_gamma: float
    manifold: TransitionManifold
    populations: PopulationDistribution
    geometry: ProbeGeometry
    detection: DetectionSettings = field(default_factory=DetectionSettings)
    polarization: int = 0
    max_order: int = 8

    def __post_init__(self):
        if self.target_n_gamma <= 0:
            raise ValueError("target_n_gamma must be positive")


def _orders(max_order):
    return np.arange(-max_order, max_order + 1)


def pulse_energy_for_budget(omega: float, a: float, budget: SnrBudget,
                            max_order: int | None = None) -> float:
    """``P T`` (J) that makes each atom absorb ``target_n_gamma`` photons."""
    m = budget.manifold
    weight = scattering_weight(a, omega, m.linewidth, _orders(max_order or budget.max_order))
    if weight <= 0:
        raise BudgetError("modulated spectrum does not scatter")
    return budget.target_n_gamma * 2 * m.saturation_power / (m.linewidth * weight)


def snr(omega: float, a: float, budget: SnrBudget, max_order: int | None = None) -> float:
    """Differential sideband phase over the rms shot noise at fixed ``n_gamma``."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    j1 = float(jv(1, a))
    if j1 == 0.0:
        raise BudgetError("J_1(a) = 0: no signal in the first-order sidebands")
    m = budget.manifold
    PT = pulse_energy_for_budget(omega, a, budget, max_order)
    var = const.h * const.c / (4 * m.wavelength * j1**2 * budget.detection.efficiency * PT)
    signal = differential_phase(m, budget.populations, budget.geometry,
                                budget.polarization, omega)
    return signal / math.sqrt(2 * var)


def sideband_loss_fraction(omega: float, a: float, budget: SnrBudget) -> float:
    """SNR lost to heating by orders ``|n| >= 2``, relative to keeping only ``|n| <= 1``."""
    if a == 0:
        return 0.0
    return 1 - snr(omega, a, budget) / snr(omega, a, budget, max_order=1)


def linewidth_sensitivity(omega: float, a: float, budget: SnrBudget, linewidths) -> dict:
    """Sideband loss fraction for each alternative linewidth (rad/s)."""
    out = {}
    for gamma in linewidths:
        b = replace(budget, manifold=replace(budget.manifold, linewidth=float(gamma)))
        out[float(gamma)] = sideband_loss_fraction(omega, a, b)
    return out


@dataclass
class OptimizationResult:
    omega: float
    depth: float
    snr: float
    omega_grid: np.ndarray
    depth_grid: np.ndarray
    snr_grid: np.ndarray  # shape (len(omega_grid), len(depth_grid))
    on_boundary: bool
    budget: SnrBudget | None = None

    def flatness(self, delta_a: float) -> tuple[float, float]:
        """Relative SNR change at ``depth -+ delta_a`` for the optimal omega."""
        return self._ratio(-delta_a), self._ratio(+delta_a)

    def _ratio(self, da):
        return snr(self.omega, self.depth + da, self.budget) / self.snr - 1


def optimize_modulation(budget: SnrBudget, omega_range, a_range, grid: int = 50,
                        rounds: int = 2, tol: float = 1e-6) -> OptimizationResult:
    """Coarse grid search, then golden-section refinement one axis at a time.

    Ties on the grid go to the lowest omega, then the lowest a. Warns when the
    optimum lies on a range boundary.
    """
    omegas = np.linspace(*omega_range, grid)
    depths = np.linspace(*a_range, grid)

    def objective(w, a):
        try:
            return snr(w, a, budget)
        except BudgetError:
            return -math.inf

    table = np.array([[objective(w, a) for a in depths] for w in omegas])
    i, j = np.unravel_index(int(np.argmax(table)), table.shape)  # C order -> lowest omega first
    w_best, a_best = omegas[i], depths[j]
    dw = omegas[1] - omegas[0]
    da = depths[1] - depths[0]
    w_lo, w_hi = max(w_best - dw, omega_range[0]), min(w_best + dw, omega_range[1])
    a_lo, a_hi = max(a_best - da, a_range[0]), min(a_best + da, a_range[1])
    for _ in range(rounds):
        w_best, _ = golden_section(lambda w: -objective(w, a_best), w_lo, w_hi, tol=tol)
        a_best, _ = golden_section(lambda a: -objective(w_best, a), a_lo, a_hi, tol=tol)
    # golden-section never evaluates the end points
    for w in (omega_range[0], omega_range[1]):
        if w_lo <= w <= w_hi and objective(w, a_best) > objective(w_best, a_best):
            w_best = w
    best = objective(w_best, a_best)

    rel = 1e-3
    on_edge = (abs(w_best - omega_range[0]) <= rel * dw or abs(w_best - omega_range[1]) <= rel * dw
               or abs(a_best - a_range[0]) <= rel * da or abs(a_best - a_range[1]) <= rel * da)
    if on_edge:
        warnings.warn(f"SNR optimum at the range boundary (omega={w_best:.6g}, a={a_best:.6g})",
                      RuntimeWarning, stacklevel=2)
    return OptimizationResult(float(w_best), float(a_best), float(best), omegas, depths, table,
                              bool(on_edge), budget)
