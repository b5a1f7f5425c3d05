"""Monte Carlo of the two- and three-pulse non-destructive detection sequences.

Phases reported here are differential sideband phases ``phi_(+1) - phi_(-1)``
averaged over each probe pulse (twice the demodulated first-harmonic phase).
The demodulated phase stream is modelled at the sampling rate directly; the
RF carrier itself is handled by :mod:`lattice_qnd.modulation_signal`.

Pulse ``k`` of a sequence starts at ``k * (T + gap)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .atomic_structure import (PopulationDistribution, ProbeGeometry, TransitionManifold,
                               differential_phase, sr87_blue_manifold)
from .modulation_signal import ModulationSettings
from .noise_shot import DetectionSettings, generate_noise, phase_noise_psd

__all__ = [
    "SequenceConfig",
    "CycleResult",
    "UndefinedProbabilityError",
    "simulate_population_measurement",
    "simulate_transition_probability",
    "DutyCycle",
    "duty_cycle_projection",
    "trial_seeds",
    "run_batch",
    "batch_csv",
    "summarize",
    "scaling_slope",
    "BATCH_CSV_HEADER",
]

BATCH_CSV_HEADER = "seed,N_true,p_true,phase_ground_mrad,phase_total_mrad,phase_ref_mrad,p_est,N_est"


class UndefinedProbabilityError(ValueError):
    """The total-atom pulse carries no significant signal, so p is undefined."""


@dataclass(frozen=True)
class SequenceConfig:
    detection: DetectionSettings = field(default_factory=DetectionSettings)
    modulation: ModulationSettings = field(default_factory=ModulationSettings)
    manifold: TransitionManifold = field(default_factory=sr87_blue_manifold)
    geometry: ProbeGeometry = field(default_factory=lambda: ProbeGeometry(10e-6, 37e-6))
    inter_pulse_gap: float = 7e-3  # s
    polarization: int = 0
    transfer_efficiency: float = 1.0  # shelving and repumping
    projection_noise: bool = False
    drift_rate: float = 0.0  # rad/s, linear ramp of the differential phase
    phase_offset: float = 0.0  # rad, constant offset on every pulse
    noiseless: bool = False
    seed: int | None = None

    def __post_init__(self):
        if self.detection.pulse_duration * self.detection.sampling_rate < 100:
            raise ValueError("need at least 100 samples per pulse")
        if self.inter_pulse_gap < 0:
            raise ValueError("inter_pulse_gap must be non-negative")
        if not 0 <= self.transfer_efficiency <= 1:
            raise ValueError("transfer_efficiency must lie in [0, 1]")

    @property
    def pulse_duration(self) -> float:
        return self.detection.pulse_duration

    @property
    def sampling_rate(self) -> float:
        return self.detection.sampling_rate

    def phase_per_atom(self) -> float:
        """Differential phase per unpolarized ground-state atom (rad)."""
        pop = PopulationDistribution.unpolarized(min(self.manifold.ground_levels), 1.0)
        return differential_phase(self.manifold, pop, self.geometry, self.polarization,
                                  self.modulation.angular_frequency)


@dataclass(frozen=True)
class CycleResult:
    phase_ground: float  # rad, pulse A minus reference
    phase_total: float  # rad, pulse B minus reference (nan for two-pulse sequences)
    phase_reference: float  # rad, raw reference pulse
    estimated_N: float
    estimated_p: float  # clamped to [0, 1]; nan for two-pulse sequences
    estimated_p_raw: float
    per_pulse_rms: float  # rad, from the reference pulse samples
    seed: int | None = None
    N_true: float = math.nan
    p_true: float = math.nan


class _PulseTrain:
    """Samples pulses of the differential phase stream for one cycle."""

    def __init__(self, config: SequenceConfig, seed):
        self.config = config
        self.seeds = np.random.SeedSequence(seed)
        d = config.detection
        self.n = int(round(d.pulse_duration * d.sampling_rate))
        self.model = None if config.noiseless else phase_noise_psd(
            d, config.modulation.depth, config.manifold.wavelength)
        self.index = 0
        self.rms = 0.0

    def pulse(self, atomic_phase: float) -> float:
        c = self.config
        d = c.detection
        t0 = self.index * (d.pulse_duration + c.inter_pulse_gap)
        child = self.seeds.spawn(1)[0]
        self.index += 1
        t = t0 + np.arange(self.n) / d.sampling_rate
        phase = atomic_phase + c.phase_offset + c.drift_rate * t
        if self.model is not None:
            seed = int(child.generate_state(1)[0])
            noise = generate_noise(self.model, d.pulse_duration, d.sampling_rate, seed)
            delta = noise.differential
            phase = phase + delta
            self.rms = float(np.std(delta, ddof=1) / math.sqrt(self.n))
        return float(np.mean(phase))


def simulate_population_measurement(N: float, config: SequenceConfig,
                                    seed=None) -> CycleResult:
    """Probe pulse on the ground-state atoms, then a reference pulse after shelving."""
    if N < 0:
        raise ValueError("N must be non-negative")
    seed = config.seed if seed is None else seed
    k = config.phase_per_atom()
    train = _PulseTrain(config, seed)
    eff = config.transfer_efficiency
    a = train.pulse(k * N)
    ref = train.pulse(k * N * (1 - eff))
    phase = a - ref
    return CycleResult(phase, math.nan, ref, phase / k, math.nan, math.nan, train.rms,
                       seed, N, math.nan)


def simulate_transition_probability(N: float, p_true: float, config: SequenceConfig,
                                    seed=None) -> CycleResult:
    """Ground-state pulse, total-atom pulse after repumping, then the dark reference."""
    if N < 0:
        raise ValueError("N must be non-negative")
    if not 0 <= p_true <= 1:
        raise ValueError("p_true must lie in [0, 1]")
    seed = config.seed if seed is None else seed
    k = config.phase_per_atom()
    train = _PulseTrain(config, seed)
    eff = config.transfer_efficiency

    if config.projection_noise:
        rng = np.random.default_rng(train.seeds.spawn(1)[0])
        excited = float(rng.binomial(int(round(N)), p_true))
    else:
        excited = p_true * N
    ground = N - excited

    a = train.pulse(k * ground)
    total = ground + eff * excited
    b = train.pulse(k * total)
    c = train.pulse(k * total * (1 - eff))

    signal_a = a - c
    signal_b = b - c
    threshold = 0.0 if config.noiseless else 3 * math.sqrt(2) * train.rms
    if abs(signal_b) <= threshold:
        raise UndefinedProbabilityError(
            f"total-atom signal {signal_b:.3g} rad is consistent with zero")
    p_raw = 1 - signal_a / signal_b
    return CycleResult(signal_a, signal_b, c, signal_b / k, min(max(p_raw, 0.0), 1.0), p_raw,
                       train.rms, seed, N, p_true)


@dataclass(frozen=True)
class DutyCycle:
    duty_cycle: float
    cycles_until_reload: float  # math.inf when nothing is lost
    amortized_load_time: float


def duty_cycle_projection(load_time: float, interrogation_time: float,
                          detection_dead_time: float, retention: float, min_atoms: float,
                          initial_atoms: float) -> DutyCycle:
    """Clock duty cycle when atoms are recycled until fewer than ``min_atoms`` remain."""
    if min(load_time, interrogation_time, detection_dead_time) < 0:
        raise ValueError("times must be non-negative")
    if not 0 < retention <= 1:
        raise ValueError("retention must lie in (0, 1]")
    if retention == 1 or min_atoms <= 0:
        cycles = math.inf
    elif min_atoms >= initial_atoms:
        cycles = 0
    else:
        cycles = math.floor(math.log(min_atoms / initial_atoms) / math.log(retention))
    load = load_time / max(cycles, 1) if math.isfinite(cycles) else 0.0
    total = interrogation_time + load + detection_dead_time
    duty = interrogation_time / total if total > 0 else 0.0
    return DutyCycle(duty, cycles, load)


def trial_seeds(seed: int, count: int) -> list[int]:
    """Per-trial integer seeds, independent of how trials are scheduled."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(s.generate_state(1)[0]) for s in children]


def _run_one(args):
    kind, N, p, config, seed = args
    if kind == "population":
        return simulate_population_measurement(N, config, seed)
    return simulate_transition_probability(N, p, config, seed)


def run_batch(N_values: Sequence[float], p_values: Sequence[float] | None, trials: int,
              config: SequenceConfig, seed: int, jobs: int = 1) -> list[CycleResult]:
    """Run ``trials`` cycles for every (N, p) pair.

    ``p_values=None`` runs the two-pulse population measurement. Results come
    back in (N, p, trial) order whatever ``jobs`` is.
    """
    tasks = []
    cells = [(N, p) for N in N_values for p in (p_values if p_values is not None else [None])]
    seeds = trial_seeds(seed, len(cells) * trials)
    for c, (N, p) in enumerate(cells):
        kind = "population" if p is None else "transition"
        for t in range(trials):
            tasks.append((kind, N, p, config, seeds[c * trials + t]))
    if jobs <= 1:
        return [_run_one(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, tasks))


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else repr(float(x))


def batch_csv(results: Iterable[CycleResult]) -> str:
    lines = [BATCH_CSV_HEADER]
    for r in results:
        lines.append(",".join([
            str(r.seed), _fmt(r.N_true), _fmt(r.p_true), _fmt(1e3 * r.phase_ground),
            _fmt(1e3 * r.phase_total), _fmt(1e3 * r.phase_reference), _fmt(r.estimated_p),
            _fmt(r.estimated_N)]))
    return "\n".join(lines) + "\n"


def summarize(results: Sequence[CycleResult]) -> list[dict]:
    """RMS error of estimated p (or N) for each (N_true, p_true) cell, in input order."""
    cells: dict[tuple, list[CycleResult]] = {}
    for r in results:
        cells.setdefault((r.N_true, r.p_true), []).append(r)
    rows = []
    for (N, p), rs in cells.items():
        if math.isnan(p):
            est = np.array([r.estimated_N for r in rs])
            phases = np.array([r.phase_ground for r in rs])
            rows.append({"N_true": N, "p_true": p, "trials": len(rs),
                         "mean_phase": float(phases.mean()),
                         "rms_phase": float(phases.std(ddof=1)),
                         "mean_N": float(est.mean()), "rms_N": float(est.std(ddof=1))})
        else:
            err = np.array([r.estimated_p_raw for r in rs]) - p
            rows.append({"N_true": N, "p_true": p, "trials": len(rs),
                         "bias_p": float(err.mean()),
                         "rms_p": float(np.sqrt(np.mean(err**2)))})
    return rows


def scaling_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log y against log x."""
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])
