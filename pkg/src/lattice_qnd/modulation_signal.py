"""EOM sidebands, homodyne RF signal, I/Q demodulation and the 2f piezo lock.

The RF difference photocurrent is synthesized directly from its harmonic
decomposition (unit overall gain)::

    s(t) = sum_{n>=1} J_n(a) g(phi0 - (phi_n + phi_-n)/2) g(n w t + (phi_n - phi_-n)/2)

with ``g = sin`` for odd n and ``g = cos`` for even n. The band-pass filter
and mixer are modelled as ideal harmonic selection over an integer number of
modulation periods.

Demodulation convention: the first-harmonic phase is reported as
``(phi_1 - phi_-1) / 2`` folded into (-pi/2, pi/2]; the sign ambiguity is
moved into the (signed) amplitude ``J_1 sin(phi0 - (phi_1 + phi_-1)/2)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy.special import jv

__all__ = [
    "ModulationSettings",
    "InterferometerState",
    "SidebandPhases",
    "sideband_amplitudes",
    "sideband_power",
    "rf_signal",
    "sample_times",
    "demodulate_first_harmonic",
    "demodulate_second_harmonic",
    "LockResult",
    "simulate_lock",
]

MIN_PERIODS = 10
TRUNCATION_POWER = 0.999


def sideband_amplitudes(a: float, n_max: int) -> dict[int, float]:
    """``{n: J_n(a)}`` for ``-n_max <= n <= n_max``."""
    if a < 0:
        raise ValueError("modulation depth must be non-negative")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    n = np.arange(-n_max, n_max + 1)
    return dict(zip(n.tolist(), jv(n, a).tolist()))


def sideband_power(a: float, orders) -> float:
    """Fraction of optical power carried by the listed sideband orders."""
    return float(np.sum(jv(np.asarray(orders), a) ** 2))


@dataclass(frozen=True)
class ModulationSettings:
    depth: float = 2.4  # rad
    angular_frequency: float = 2 * math.pi * 90e6  # rad/s
    max_order: int = 8

    def __post_init__(self):
        if self.depth < 0 or self.angular_frequency <= 0 or self.max_order < 1:
            raise ValueError("need depth >= 0, angular_frequency > 0, max_order >= 1")
        captured = sideband_power(self.depth, np.arange(-self.max_order, self.max_order + 1))
        if captured < TRUNCATION_POWER:
            raise ValueError(
                f"max_order={self.max_order} keeps only {captured:.4f} of the power at a={self.depth}")

    @property
    def frequency(self) -> float:
        return self.angular_frequency / (2 * math.pi)

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-self.max_order, self.max_order + 1)

    def amplitudes(self) -> dict[int, float]:
        return sideband_amplitudes(self.depth, self.max_order)


@dataclass(frozen=True)
class InterferometerState:
    lo_phase: float = math.pi / 2  # phi0
    global_phase: float = 0.0  # phi_s, common to every sideband
    lock_bandwidth: float = 10e3  # Hz
    pzt_gain: float = 1.0  # rad per control unit

    def __post_init__(self):
        if self.lock_bandwidth <= 0:
            raise ValueError("lock_bandwidth must be positive")


@dataclass(frozen=True)
class SidebandPhases:
    """Per-sideband phases ``phi_n = atomic_n + noise_n + phi_s``.

    Missing orders are zero. ``phi_s`` comes from :class:`InterferometerState`.
    """

    atomic: Mapping[int, float] = field(default_factory=dict)
    noise: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        for part in (self.atomic, self.noise):
            if not all(np.isfinite(v) for v in part.values()):
                raise ValueError("sideband phases must be finite")

    def total(self, n: int, global_phase: float = 0.0) -> float:
        return self.atomic.get(n, 0.0) + self.noise.get(n, 0.0) + global_phase

    @classmethod
    def antisymmetric(cls, phi_1: float, n_max: int = 1) -> "SidebandPhases":
        """Atomic phase +phi_1 on every positive order and -phi_1 on the negative ones."""
        return cls({n: phi_1 * (1 if n > 0 else -1) for n in range(-n_max, n_max + 1) if n})

    @classmethod
    def from_function(cls, phase_of_detuning: Callable[[float], float], omega: float,
                      n_max: int) -> "SidebandPhases":
        """Atomic phases from a detuning (Hz) -> phase callable, e.g. a partial of
        :func:`~lattice_qnd.atomic_structure.atomic_phase_shift`."""
        f = omega / (2 * math.pi)
        return cls({n: float(phase_of_detuning(n * f)) for n in range(-n_max, n_max + 1) if n})


def rf_signal(t, mod: ModulationSettings, state: InterferometerState,
              phases: SidebandPhases):
    """Homodyne RF output at times ``t`` (s)."""
    t = np.asarray(t, dtype=float)
    amps = mod.amplitudes()
    s = np.zeros_like(t)
    for n in range(1, mod.max_order + 1):
        p_plus = phases.total(n, state.global_phase)
        p_minus = phases.total(-n, state.global_phase)
        g = np.sin if n % 2 else np.cos
        s = s + amps[n] * g(state.lo_phase - (p_plus + p_minus) / 2) * g(
            n * mod.angular_frequency * t + (p_plus - p_minus) / 2)
    return s


def sample_times(n_samples: int, rate: float, t0: float = 0.0) -> np.ndarray:
    return t0 + np.arange(n_samples) / rate


def _integer_periods(samples, omega, rate):
    samples = np.asarray(samples, dtype=float)
    if rate <= omega / math.pi:
        raise ValueError("sampling rate below Nyquist for the modulation frequency")
    f = omega / (2 * math.pi)
    periods = math.floor(len(samples) * f / rate + 1e-9)
    if periods < MIN_PERIODS:
        raise ValueError(f"{periods} modulation periods supplied, need at least {MIN_PERIODS}")
    n_use = min(len(samples), int(round(periods * rate / f)))
    return samples[:n_use], np.arange(n_use) / rate


def demodulate_first_harmonic(samples, omega: float, rate: float) -> tuple[float, float]:
    """I/Q demodulation at ``omega``. Returns ``(amplitude, phase)``."""
    s, t = _integer_periods(samples, omega, rate)
    in_phase = 2 * np.mean(s * np.sin(omega * t))
    quadrature = 2 * np.mean(s * np.cos(omega * t))
    amplitude = math.hypot(in_phase, quadrature)
    phase = math.atan2(quadrature, in_phase)
    if phase > math.pi / 2:
        phase, amplitude = phase - math.pi, -amplitude
    elif phase <= -math.pi / 2:
        phase, amplitude = phase + math.pi, -amplitude
    return amplitude, phase


def demodulate_second_harmonic(samples, omega: float, rate: float) -> float:
    """In-phase component at ``2 omega``; the lock error signal."""
    s, t = _integer_periods(samples, 2 * omega, rate)
    return float(2 * np.mean(s * np.cos(2 * omega * t)))


@dataclass
class LockResult:
    t: np.ndarray
    lo_phase: np.ndarray  # phi0 seen by the interferometer, drift plus correction
    correction: np.ndarray
    error: np.ndarray  # 2f error signal
    lock_point: float
    lost_lock_at: float | None = None

    @property
    def residual(self) -> np.ndarray:
        """Departure of phi0 from the lock point, wrapped to [-pi, pi)."""
        return (self.lo_phase - self.lock_point + math.pi) % (2 * math.pi) - math.pi

    def first_harmonic_fraction(self) -> np.ndarray:
        """First-harmonic amplitude relative to its maximum J_1(a)."""
        return np.cos(self.residual)


def simulate_lock(drift: Callable[[np.ndarray], np.ndarray], mod: ModulationSettings,
                  state: InterferometerState, duration: float, step: float,
                  seed: int | None = None, phases: SidebandPhases | None = None,
                  error_noise: float = 0.0) -> LockResult:
    """Integrator servo holding the 2f error signal at zero.

    ``drift(t)`` is the free-running phi0 disturbance added to
    ``state.lo_phase``. The integrator gain gives a unity-gain bandwidth of
    ``state.lock_bandwidth``. ``error_noise`` is a white rms added to each
    error sample, drawn from ``np.random.default_rng(seed)``.
    """
    if step * state.lock_bandwidth > 0.05:
        raise ValueError("step must be much shorter than 1 / lock_bandwidth")
    phases = phases or SidebandPhases()
    j2 = float(jv(2, mod.depth))
    if abs(j2) < 1e-9:
        raise ValueError("no second-harmonic signal at this modulation depth")
    mean_2 = (phases.total(2, state.global_phase) + phases.total(-2, state.global_phase)) / 2
    lock_point = mean_2 + math.pi / 2
    k_int = 2 * math.pi * state.lock_bandwidth / (j2 * state.pzt_gain)

    n = int(round(duration / step))
    t = np.arange(n) * step
    disturbance = state.lo_phase + np.asarray(drift(t), dtype=float) * np.ones(n)
    rng = np.random.default_rng(seed)
    noise = error_noise * rng.standard_normal(n) if error_noise else np.zeros(n)

    control = 0.0
    phi0 = np.empty(n)
    corr = np.empty(n)
    err = np.empty(n)
    lost_at = None
    outside = 0
    for k in range(n):
        corr[k] = state.pzt_gain * control
        phi0[k] = disturbance[k] + corr[k]
        err[k] = j2 * math.cos(phi0[k] - mean_2) + noise[k]
        # monotonic capture range: |phi0 - lock_point| < pi/2 (wrapped)
        offset = (phi0[k] - lock_point + math.pi) % (2 * math.pi) - math.pi
        outside = outside + 1 if abs(offset) >= math.pi / 2 else 0
        if outside > 10 and lost_at is None:
            lost_at = float(t[k])
        control += k_int * err[k] * step
    if lost_at is not None:
        warnings.warn(f"phase lock lost at t = {lost_at:.6g} s", RuntimeWarning, stacklevel=2)
    return LockResult(t, phi0, corr, err, lock_point, lost_at)
