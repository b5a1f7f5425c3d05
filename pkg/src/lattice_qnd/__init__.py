"""Dispersive non-destructive detection of atoms in an optical lattice clock.

Submodules:

- ``angular_momentum``: exact Wigner 3j/6j symbols
- ``atomic_structure``: probed transition manifold and the atomic phase shift
- ``modulation_signal``: EOM sidebands, homodyne RF signal, demodulation, lock
- ``noise_shot``: shot noise, electronic floor, noise series
- ``snr_optimizer``: SNR at fixed heating and modulation optimization
- ``heating_retention``: absorbed photons, lattice retention, n_gamma fit
- ``cycle_simulator``: Monte Carlo of the detection sequences
- ``config`` / ``cli``: configuration file and command line
"""

from .angular_momentum import HalfInt, SqrtRational, wigner3j, wigner6j
from .atomic_structure import (HyperfineLine, PopulationDistribution, ProbeGeometry,
                               TransitionManifold, atomic_phase_shift, differential_phase,
                               dispersive_factor, effective_cross_section, population_preset,
                               single_line_manifold, sr87_blue_manifold)
from .cycle_simulator import (CycleResult, SequenceConfig, duty_cycle_projection,
                              simulate_population_measurement, simulate_transition_probability)
from .heating_retention import (LatticeSettings, RetentionPoint, absorbed_photons,
                                fit_photon_number, recoil_energy, retention_fraction)
from .modulation_signal import (InterferometerState, ModulationSettings, SidebandPhases,
                                demodulate_first_harmonic, demodulate_second_harmonic, rf_signal,
                                sideband_amplitudes, simulate_lock)
from .noise_shot import (DetectionSettings, generate_noise, phase_noise_psd,
                         shot_noise_variance)
from .snr_optimizer import SnrBudget, optimize_modulation, sideband_loss_fraction, snr

__version__ = "0.1.0"
