"""Recovering the sideband phase from the RF beat, and keeping the
interferometer on the right quadrature with the 2f piezo lock."""

import math

import numpy as np

from lattice_qnd.modulation_signal import (InterferometerState, ModulationSettings,
                                           SidebandPhases, demodulate_first_harmonic,
                                           demodulate_second_harmonic, rf_signal, sample_times,
                                           simulate_lock)

mod = ModulationSettings(depth=2.4, angular_frequency=2 * math.pi * 90e6)
rate = 40 * mod.frequency
t = sample_times(2000, rate)

# atoms shift the +1 sideband by +20 mrad and the -1 sideband by -20 mrad
phases = SidebandPhases.antisymmetric(0.020, n_max=mod.max_order)
for lo, common in [(math.pi / 2, 0.0), (math.pi / 2 + 0.3, 0.0), (math.pi / 2, 1.0)]:
    s = rf_signal(t, mod, InterferometerState(lo_phase=lo, global_phase=common), phases)
    amp, phase = demodulate_first_harmonic(s, mod.angular_frequency, rate)
    err = demodulate_second_harmonic(s, mod.angular_frequency, rate)
    print(f"phi0 = {lo:.3f}, phi_s = {common:.1f}: phase {phase * 1e3:.3f} mrad, "
          f"1f amplitude {amp:+.3f}, 2f error {err:+.3f}")

# slow interferometer drift: 0.1 rad at 100 Hz, then a 1.2 rad jump
drift = lambda t: 0.1 * np.sin(2 * math.pi * 100 * t) + np.where(t > 15e-3, 1.2, 0.0)
res = simulate_lock(drift, mod, InterferometerState(), duration=30e-3, step=1e-6)
late = res.t > 20e-3
print(f"\nresidual after the jump: {np.max(np.abs(res.residual[late])) * 1e3:.2f} mrad peak")
print(f"worst first-harmonic fraction after relock: {np.min(res.first_harmonic_fraction()[late]):.5f}")
