"""Shot noise and electronic noise on the sideband phases.

PSD normalization: all spectral densities are one-sided, in rad^2/Hz. For a
white series of one-sided PSD ``S`` the variance of its mean over a window
``T`` is ``S / (2 T)``.

``PhaseNoiseModel.level`` is the PSD of the detection-noise quantity
``(dphi_1 - dphi_-1) / 2`` (half the differential sideband phase). Each
sideband's own noise series therefore carries twice that PSD, which makes its
pulse-averaged variance equal to :func:`shot_noise_variance`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import jv

from . import constants as const

__all__ = [
    "DetectionSettings",
    "DivergentNoiseError",
    "PhaseNoiseModel",
    "NoiseSample",
    "shot_noise_variance",
    "phase_noise_psd",
    "shot_noise_crossover",
    "generate_noise",
]


class DivergentNoiseError(ValueError):
    """No photons reach the measured sidebands, so the phase noise is unbounded."""


@dataclass(frozen=True)
class DetectionSettings:
    probe_power: float = 12e-9  # W, total power seen by the atoms
    pulse_duration: float = 3e-3  # s
    efficiency: float = 0.43
    sampling_rate: float = 500e3  # Hz
    electronic_floor: float = 1e-11  # rad^2/Hz
    flicker_corner: float = 0.0  # Hz; 0 disables the 1/f term

    def __post_init__(self):
        if self.probe_power < 0 or self.pulse_duration <= 0:
            raise ValueError("need probe_power >= 0 and pulse_duration > 0")
        if not 0 < self.efficiency <= 1:
            raise ValueError("efficiency must lie in (0, 1]")
        if self.sampling_rate <= 0 or self.electronic_floor < 0 or self.flicker_corner < 0:
            raise ValueError("sampling_rate must be positive, floor and corner non-negative")

    @property
    def detected_power(self) -> float:
        return self.efficiency * self.probe_power

    def with_detected_power(self, detected: float) -> "DetectionSettings":
        return replace(self, probe_power=detected / self.efficiency)


def shot_noise_variance(a: float, settings: DetectionSettings,
                        wavelength: float = const.SR_BLUE_WAVELENGTH) -> float:
    """Per-sideband, per-pulse phase variance ``h c / (4 lambda J_1(a)^2 eta P T)``."""
    j1 = float(jv(1, a))
    photons = 4 * wavelength * j1**2 * settings.detected_power * settings.pulse_duration
    if photons <= 0 or j1 == 0.0:
        raise DivergentNoiseError("J_1(a) = 0 or zero probe power: phase noise diverges")
    return const.h * const.c / photons


@dataclass(frozen=True)
class PhaseNoiseModel:
    white_level: float  # rad^2/Hz, shot noise
    electronic_floor: float = 0.0  # rad^2/Hz
    flicker_corner: float = 0.0  # Hz

    @property
    def level(self) -> float:
        """White PSD (shot + electronic)."""
        return self.white_level + self.electronic_floor

    def psd(self, f):
        """Model PSD at Fourier frequency ``f`` (Hz)."""
        f = np.asarray(f, dtype=float)
        out = np.full_like(f, self.level)
        if self.flicker_corner > 0:
            with np.errstate(divide="ignore"):
                out = out * (1 + self.flicker_corner / np.abs(f))
        return out

    def sideband_psd(self, f):
        return 2 * self.psd(f)


def phase_noise_psd(settings: DetectionSettings, a: float,
                    wavelength: float = const.SR_BLUE_WAVELENGTH) -> PhaseNoiseModel:
    """White shot-noise level ``sigma^2 T`` plus the electronic floor.

    ``sigma^2`` is :func:`shot_noise_variance`; with the ``S / (2 T)``
    averaging rule this is the PSD of half the differential phase.
    """
    var = shot_noise_variance(a, settings, wavelength)
    return PhaseNoiseModel(var * settings.pulse_duration, settings.electronic_floor,
                           settings.flicker_corner)


def shot_noise_crossover(a: float, settings: DetectionSettings,
                         wavelength: float = const.SR_BLUE_WAVELENGTH) -> float:
    """Detected power (W) at which the shot-noise level equals the electronic floor."""
    if settings.electronic_floor <= 0:
        return math.inf
    # white level * detected power is independent of power
    ref = settings.with_detected_power(1.0)
    return phase_noise_psd(ref, a, wavelength).white_level / settings.electronic_floor


@dataclass(frozen=True)
class NoiseSample:
    plus: np.ndarray  # dphi_(+1), rad
    minus: np.ndarray  # dphi_(-1), rad
    seed: int
    rate: float

    @property
    def differential(self) -> np.ndarray:
        return self.plus - self.minus


def generate_noise(model: PhaseNoiseModel, duration: float, rate: float,
                   seed) -> NoiseSample:
    """Independent Gaussian phase-noise series for the +1 and -1 sidebands.

    Each series has one-sided PSD ``model.sideband_psd``. The optional 1/f
    component is imposed by spectral shaping of the white draw.
    """
    n = int(round(duration * rate))
    if n < 2:
        raise ValueError("need rate * duration >= 2")
    rng = np.random.default_rng(seed)
    sigma = math.sqrt(model.level * rate)  # per sideband: 2 * level * rate / 2
    white = rng.standard_normal((2, n))
    if model.flicker_corner > 0:
        f = np.fft.rfftfreq(n, 1 / rate)
        gain = np.ones_like(f)
        gain[1:] = np.sqrt(1 + model.flicker_corner / f[1:])
        white = np.fft.irfft(np.fft.rfft(white, axis=1) * gain, n=n, axis=1)
    series = sigma * white
    return NoiseSample(series[0], series[1], int(seed) if np.isscalar(seed) else -1, rate)
