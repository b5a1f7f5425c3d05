"""Photon absorption during probing and the resulting lattice losses."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import jv

from . import constants as const
from .search import golden_section

__all__ = [
    "recoil_energy",
    "LatticeSettings",
    "RetentionPoint",
    "FitResult",
    "NonIdentifiableError",
    "absorbed_photons",
    "scattering_weight",
    "retention_fraction",
    "fit_photon_number",
    "read_retention_csv",
    "write_retention_csv",
]

RETENTION_CSV_HEADER = ("depth_Er", "retained_fraction", "uncertainty")


def recoil_energy(wavelength: float = const.SR_BLUE_WAVELENGTH,
                  mass: float = const.SR87_MASS) -> float:
    """``h^2 / (2 m lambda^2)`` in J."""
    if wavelength <= 0 or mass <= 0:
        raise ValueError("wavelength and mass must be positive")
    return const.h**2 / (2 * mass * wavelength**2)


@dataclass(frozen=True)
class LatticeSettings:
    """Lattice depth given in recoils (``"Er"``), kelvin (``"K"``) or hertz (``"Hz"``)."""

    depth: float
    unit: str = "Er"
    wavelength: float = const.SR_BLUE_WAVELENGTH  # probe wavelength defining E_R
    mass: float = const.SR87_MASS

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("lattice depth must be non-negative")
        if self.unit not in ("Er", "K", "Hz"):
            raise ValueError(f"unknown depth unit {self.unit!r}")

    @property
    def depth_joule(self) -> float:
        if self.unit == "Er":
            return self.depth * recoil_energy(self.wavelength, self.mass)
        if self.unit == "K":
            return self.depth * const.k_B
        return self.depth * const.h

    @property
    def depth_recoils(self) -> float:
        if self.unit == "Er":
            return self.depth
        return self.depth_joule / recoil_energy(self.wavelength, self.mass)

    @property
    def depth_kelvin(self) -> float:
        return self.depth_joule / const.k_B


def scattering_weight(depth: float, omega: float, linewidth: float, orders) -> float:
    """``sum_n J_n(a)^2 / (1 + 4 (n omega)^2 / Gamma^2)`` over ``orders``."""
    n = np.asarray(orders)
    return float(np.sum(jv(n, depth) ** 2 / (1 + 4 * (n * omega) ** 2 / linewidth**2)))


def absorbed_photons(P: float, T: float, mod, manifold, max_order: int | None = None) -> float:
    """Photons absorbed per atom for a pulse of power ``P`` (W) and length ``T`` (s).

    The carrier sits on resonance; sideband ``n`` is detuned by ``n omega``.
    ``max_order`` overrides the truncation of ``mod``.
    """
    if P < 0 or T < 0:
        raise ValueError("P and T must be non-negative")
    n_max = mod.max_order if max_order is None else max_order
    weight = scattering_weight(mod.depth, mod.angular_frequency, manifold.linewidth,
                               np.arange(-n_max, n_max + 1))
    return P * T * manifold.linewidth / (2 * manifold.saturation_power) * weight


def retention_fraction(depth_recoils, n_gamma):
    """Fraction of atoms left in a lattice of depth ``U0/E_R`` after ``n_gamma`` absorptions.

    ``n_gamma = 0`` means no heating and returns 1.
    """
    u = np.asarray(depth_recoils, dtype=float)
    n = np.asarray(n_gamma, dtype=float)
    if np.any(u < 0) or np.any(n < 0):
        raise ValueError("depth and photon number must be non-negative")
    with np.errstate(divide="ignore"):
        beta = np.where(n > 0, -np.expm1(-u / (2 * np.where(n > 0, n, 1.0) / 3)), 1.0)
    return float(beta) if beta.ndim == 0 else beta


@dataclass(frozen=True)
class RetentionPoint:
    depth: float  # E_R
    retained_fraction: float
    uncertainty: float = 0.0

    def __post_init__(self):
        if not 0 <= self.retained_fraction <= 1:
            raise ValueError("retained fraction must lie in [0, 1]")
        if self.depth < 0 or self.uncertainty < 0:
            raise ValueError("depth and uncertainty must be non-negative")


@dataclass(frozen=True)
class FitResult:
    n_gamma: float
    stderr: float
    chi2: float
    n_points: int


class NonIdentifiableError(ValueError):
    """Every point sits near full retention; the photon number is unconstrained."""


def fit_photon_number(data: Sequence[RetentionPoint], bounds=(1e-2, 1e5)) -> FitResult:
    """Weighted least-squares fit of the retention model in ``n_gamma``.

    Points with zero uncertainty are fitted unweighted and the standard error
    is then rescaled by the residual variance.
    """
    data = list(data)
    if len(data) < 3:
        raise ValueError("need at least 3 retention points")
    depths = np.array([p.depth for p in data])
    if depths.min() <= 0 or depths.max() / depths.min() < 3:
        raise ValueError("depths must span at least a factor 3")
    beta = np.array([p.retained_fraction for p in data])
    if np.all(beta > 0.99):
        raise NonIdentifiableError("all points have retention > 0.99")
    sig = np.array([p.uncertainty for p in data])
    weighted = bool(np.all(sig > 0))
    w = 1 / sig**2 if weighted else np.ones_like(beta)

    def chi2(log_n):
        r = beta - retention_fraction(depths, math.exp(log_n))
        return float(np.sum(w * r * r))

    grid = np.linspace(math.log(bounds[0]), math.log(bounds[1]), 400)
    values = [chi2(x) for x in grid]
    k = int(np.argmin(values))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    log_best, chi_min = golden_section(chi2, lo, hi, tol=1e-12)
    n_best = math.exp(log_best)

    # curvature of chi2 in n itself; chi2 = -2 log L
    h = 1e-4 * n_best
    curv = (chi2(math.log(n_best + h)) - 2 * chi_min + chi2(math.log(n_best - h))) / h**2
    var = 2 / curv if curv > 0 else math.inf
    if not weighted:
        dof = max(len(data) - 1, 1)
        var *= chi_min / dof
    return FitResult(n_best, math.sqrt(var), chi_min, len(data))


def read_retention_csv(path) -> list[RetentionPoint]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != RETENTION_CSV_HEADER:
            raise ValueError(f"expected header {','.join(RETENTION_CSV_HEADER)}")
        points = []
        for lineno, row in enumerate(reader, start=2):
            if not row or not "".join(row).strip():
                continue
            if len(row) != 3:
                raise ValueError(f"line {lineno}: expected 3 fields, got {len(row)}")
            try:
                points.append(RetentionPoint(*(float(x) for x in row)))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
    return points


def write_retention_csv(path, points: Iterable[RetentionPoint]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(RETENTION_CSV_HEADER) + "\n")
        for p in points:
            fh.write(",".join(repr(float(x)) for x in (p.depth, p.retained_fraction, p.uncertainty)) + "\n")
