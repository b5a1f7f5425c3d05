"""Dispersive phase shift of a weak probe crossing an atomic cloud.

Frequency convention: every detuning crossing this module's API is in Hz
(ordinary frequency). The natural linewidth is an angular frequency in rad/s,
as is customary. Conversion to angular units happens once, inside
:func:`dispersive_factor`.

Sign convention: a probe tuned above a line (positive detuning) acquires a
positive phase for positive populations.

Line offsets in a :class:`TransitionManifold` are measured from the manifold
reference frequency, the (2F'+1)-weighted mean of the line positions. The
probe detuning passed to :func:`atomic_phase_shift` is measured from that
reference as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from . import constants as const
from .angular_momentum import HalfInt, wigner3j, wigner6j

__all__ = [
    "HyperfineLine",
    "TransitionManifold",
    "PopulationDistribution",
    "ProbeGeometry",
    "hyperfine_shift",
    "sr87_blue_manifold",
    "single_line_manifold",
    "effective_cross_section",
    "dispersive_factor",
    "line_strength",
    "atomic_phase_shift",
    "differential_phase",
    "phase_per_atom",
    "phase_spectrum",
    "POPULATION_PRESETS",
    "population_preset",
]


@dataclass(frozen=True)
class HyperfineLine:
    F_ground: HalfInt
    F_excited: HalfInt
    detuning_offset: float  # Hz, relative to the manifold reference

    def __post_init__(self):
        object.__setattr__(self, "F_ground", HalfInt.of(self.F_ground))
        object.__setattr__(self, "F_excited", HalfInt.of(self.F_excited))
        dF = abs(self.F_ground.twice_value - self.F_excited.twice_value)
        if dF > 2:
            raise ValueError(f"|F - F'| > 1 for line {self.F_ground} -> {self.F_excited}")
        if self.F_ground.twice_value == 0 and self.F_excited.twice_value == 0:
            raise ValueError("F = 0 -> F' = 0 is dipole forbidden")


@dataclass(frozen=True)
class TransitionManifold:
    """A probed J -> J' transition with its resolved hyperfine lines."""

    wavelength: float  # m
    linewidth: float  # rad/s
    J_ground: HalfInt
    J_excited: HalfInt
    nuclear_spin: HalfInt
    lines: tuple[HyperfineLine, ...]
    saturation_power: float = const.SR_BLUE_PSAT  # W

    def __post_init__(self):
        for name in ("J_ground", "J_excited", "nuclear_spin"):
            object.__setattr__(self, name, HalfInt.of(getattr(self, name)))
        object.__setattr__(self, "lines", tuple(self.lines))
        if self.wavelength <= 0 or self.linewidth <= 0 or self.saturation_power <= 0:
            raise ValueError("wavelength, linewidth and saturation_power must be positive")
        pairs = [(ln.F_ground, ln.F_excited) for ln in self.lines]
        if len(set(pairs)) != len(pairs):
            raise ValueError("duplicate (F, F') line in manifold")
        for F, Fp in pairs:
            if not (_coupled(self.J_ground, self.nuclear_spin, F)
                    and _coupled(self.J_excited, self.nuclear_spin, Fp)):
                raise ValueError(f"line {F} -> {Fp} not reachable from J, J', I")

    @property
    def ground_levels(self) -> set[HalfInt]:
        return {ln.F_ground for ln in self.lines}

    @property
    def reference_offset(self) -> float:
        """(2F'+1)-weighted mean line position, Hz."""
        w = np.array([ln.F_excited.twice_value + 1 for ln in self.lines], dtype=float)
        x = np.array([ln.detuning_offset for ln in self.lines])
        return float(np.sum(w * x) / np.sum(w))

    @property
    def prefactor_wavelength(self) -> float:
        """``3 lambda^2 (2J'+1) / (4 pi)``; divide by S to get rad per unit weight."""
        return 3 * self.wavelength**2 * (self.J_excited.twice_value + 1) / (4 * math.pi)


def _coupled(J: HalfInt, I: HalfInt, F: HalfInt) -> bool:
    a, b, c = J.twice_value, I.twice_value, F.twice_value
    return abs(a - b) <= c <= a + b and (a + b + c) % 2 == 0


def hyperfine_shift(F, J, I, A: float, B: float) -> float:
    """Magnetic-dipole plus electric-quadrupole hyperfine energy (units of A, B)."""
    F, J, I = (float(HalfInt.of(x)) for x in (F, J, I))
    K = F * (F + 1) - I * (I + 1) - J * (J + 1)
    shift = A * K / 2
    if I > 0.5 and J > 0.5:
        shift += B * (1.5 * K * (K + 1) - 2 * I * (I + 1) * J * (J + 1)) / (
            4 * I * (2 * I - 1) * J * (2 * J - 1))
    return shift


def sr87_blue_manifold(
    linewidth: float = const.SR_BLUE_LINEWIDTH,
    line_offsets_hz: Mapping[str, float] | None = None,
    saturation_power: float = const.SR_BLUE_PSAT,
    wavelength: float = const.SR_BLUE_WAVELENGTH,
) -> TransitionManifold:
    """87Sr 1S0 (F=9/2) -> 1P1 (F'=7/2, 9/2, 11/2).

    Default line positions come from the 1P1 hyperfine constants
    A = -3.4 MHz, B = 39 MHz; they span about 59 MHz and their (2F'+1)-weighted
    centroid is zero. ``line_offsets_hz`` maps ``"7/2"`` etc. to replacement
    positions in Hz.
    """
    I, J = HalfInt.of("9/2"), HalfInt.of(1)
    lines = []
    for Fp in ("7/2", "9/2", "11/2"):
        if line_offsets_hz is not None:
            offset = float(line_offsets_hz[Fp])
        else:
            offset = 1e6 * hyperfine_shift(Fp, J, I, const.SR87_1P1_A, const.SR87_1P1_B)
        lines.append(HyperfineLine(I, HalfInt.of(Fp), offset))
    return TransitionManifold(wavelength, linewidth, HalfInt.of(0), J, I, tuple(lines),
                              saturation_power)


def single_line_manifold(
    linewidth: float = const.SR_BLUE_LINEWIDTH,
    wavelength: float = const.SR_BLUE_WAVELENGTH,
    saturation_power: float = const.SR_BLUE_PSAT,
    offset_hz: float = 0.0,
) -> TransitionManifold:
    """Isolated J=0 -> J'=1 line with no nuclear spin (e.g. 88Sr)."""
    line = HyperfineLine(HalfInt.of(0), HalfInt.of(1), offset_hz)
    return TransitionManifold(wavelength, linewidth, 0, 1, 0, (line,), saturation_power)


@dataclass(frozen=True)
class PopulationDistribution:
    """Atom number per ground-state Zeeman substate, keyed by m_F."""

    F: HalfInt
    counts: Mapping[HalfInt, float] = field(default_factory=dict)

    def __post_init__(self):
        F = HalfInt.of(self.F)
        object.__setattr__(self, "F", F)
        counts = {}
        for m, n in dict(self.counts).items():
            m = HalfInt.of(m)
            if abs(m.twice_value) > F.twice_value or (F.twice_value + m.twice_value) % 2:
                raise ValueError(f"m_F={m} invalid for F={F}")
            if n < 0:
                raise ValueError("populations must be non-negative")
            counts[m] = float(n)
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> float:
        return float(sum(self.counts.values()))

    @classmethod
    def unpolarized(cls, F, N: float) -> "PopulationDistribution":
        F = HalfInt.of(F)
        ms = range(-F.twice_value, F.twice_value + 1, 2)
        return cls(F, {HalfInt(m): N / (F.twice_value + 1) for m in ms})

    @classmethod
    def stretched(cls, F, N: float, sign: int = +1) -> "PopulationDistribution":
        F = HalfInt.of(F)
        return cls(F, {HalfInt(sign * F.twice_value): N})

    def scaled(self, factor: float) -> "PopulationDistribution":
        return PopulationDistribution(self.F, {m: factor * n for m, n in self.counts.items()})


POPULATION_PRESETS = ("sr87_blue_unpolarized", "sr87_blue_stretched")


def population_preset(name: str, N: float) -> PopulationDistribution:
    if name == "sr87_blue_unpolarized":
        return PopulationDistribution.unpolarized("9/2", N)
    if name == "sr87_blue_stretched":
        return PopulationDistribution.stretched("9/2", N, +1)
    raise KeyError(f"unknown population preset {name!r}; choose from {POPULATION_PRESETS}")


@dataclass(frozen=True)
class ProbeGeometry:
    cloud_radius: float  # m, rms radius r0
    beam_waist: float  # m, 1/e^2 radius w

    def __post_init__(self):
        if self.cloud_radius < 0 or self.beam_waist <= 0:
            raise ValueError("need cloud_radius >= 0 and beam_waist > 0")


def effective_cross_section(geometry: ProbeGeometry) -> float:
    """Gaussian beam / Gaussian cloud overlap area ``2 pi (r0^2 + w^2 / 4)`` in m^2."""
    return 2 * math.pi * (geometry.cloud_radius**2 + geometry.beam_waist**2 / 4)


def dispersive_factor(detuning, linewidth):
    """``(G/2) D / (D^2 + (G/2)^2)`` with D = 2 pi * detuning (Hz), G in rad/s.

    Odd in the detuning, with extrema of +-1/2 at D = +-G/2.
    """
    delta = 2 * np.pi * np.asarray(detuning, dtype=float)
    hg = linewidth / 2
    out = hg * delta / (delta**2 + hg**2)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=4096)
def _line_strength(tJ, tJp, tI, tF, tFp, tm, tq) -> Fraction:
    # m'_F is fixed by the 3j selection m' + q - m = 0
    tmp = tm - tq
    if abs(tmp) > tFp:
        return Fraction(0)
    three = wigner3j(HalfInt(tFp), 1, HalfInt(tF), HalfInt(tmp), HalfInt(tq), HalfInt(-tm))
    six = wigner6j(HalfInt(tJ), HalfInt(tJp), 1, HalfInt(tFp), HalfInt(tF), HalfInt(tI))
    return (tFp + 1) * (tF + 1) * three.squared() * six.squared()


def line_strength(manifold: TransitionManifold, line: HyperfineLine, m_F, q) -> Fraction:
    """Exact angular weight ``(2F'+1)(2F+1) 3j^2 6j^2`` of one substate on one line."""
    return _line_strength(
        manifold.J_ground.twice_value, manifold.J_excited.twice_value,
        manifold.nuclear_spin.twice_value, line.F_ground.twice_value,
        line.F_excited.twice_value, HalfInt.of(m_F).twice_value, HalfInt.of(q).twice_value)


def _line_weights(manifold, populations, q) -> list[tuple[float, float]]:
    """(position relative to reference in Hz, population-weighted strength) per line."""
    if populations.counts and populations.F not in manifold.ground_levels:
        raise ValueError(f"population F={populations.F} has no line in the manifold")
    q = HalfInt.of(q)
    if q.twice_value not in (-2, 0, 2):
        raise ValueError("polarization q must be -1, 0 or +1")
    ref = manifold.reference_offset
    out = []
    for line in manifold.lines:
        if line.F_ground != populations.F:
            continue
        w = sum(n * float(line_strength(manifold, line, m, q))
                for m, n in populations.counts.items())
        out.append((line.detuning_offset - ref, w))
    return out


def atomic_phase_shift(manifold: TransitionManifold, populations: PopulationDistribution,
                       geometry: ProbeGeometry, q, detuning):
    """Phase (rad) imprinted on a probe at ``detuning`` Hz from the manifold reference.

    ``detuning`` may be a scalar or an array.
    """
    S = effective_cross_section(geometry)
    pref = manifold.prefactor_wavelength / S
    det = np.asarray(detuning, dtype=float)
    total = np.zeros_like(det)
    for position, weight in _line_weights(manifold, populations, q):
        total = total + weight * dispersive_factor(det - position, manifold.linewidth)
    total = pref * total
    return float(total) if total.ndim == 0 else total


def differential_phase(manifold, populations, geometry, q, omega):
    """``phi(+omega) - phi(-omega)`` for sidebands at +-omega (rad/s) around the reference."""
    if np.any(np.asarray(omega) <= 0):
        raise ValueError("omega must be positive")
    f = np.asarray(omega, dtype=float) / (2 * np.pi)
    out = (atomic_phase_shift(manifold, populations, geometry, q, f)
           - atomic_phase_shift(manifold, populations, geometry, q, -f))
    return float(out) if np.ndim(out) == 0 else out


def phase_per_atom(manifold, populations, geometry, q, omega) -> float:
    """Differential phase per atom for the shape of ``populations`` (rad/atom)."""
    N = populations.total
    if N <= 0:
        raise ValueError("need a non-empty population to normalize")
    return differential_phase(manifold, populations.scaled(1 / N), geometry, q, omega)


def phase_spectrum(manifold, populations, geometry, q, detunings: Sequence[float]) -> np.ndarray:
    """Convenience wrapper returning ``phi * S / N`` (m^2) over an array of detunings."""
    S = effective_cross_section(geometry)
    N = populations.total
    phi = atomic_phase_shift(manifold, populations, geometry, q, np.asarray(detunings))
    return phi * S / N if N > 0 else np.zeros_like(phi)
