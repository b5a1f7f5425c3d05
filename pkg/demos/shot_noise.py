"""Phase noise of the homodyne detector against detected power.

Below about 40 nW the shot noise exceeds the 1e-11 rad^2/Hz electronic floor;
the per-pulse RMS of phi(+1) - phi(-1) follows 1/sqrt(P) there and flattens above.
"""

import math

import numpy as np

from lattice_qnd.noise_shot import (DetectionSettings, generate_noise, phase_noise_psd,
                                    shot_noise_crossover, shot_noise_variance)

base = DetectionSettings()
a = 2.4
print(f"shot-noise / floor crossover: {shot_noise_crossover(a, base) * 1e9:.1f} nW detected\n")
print("eta P [nW]   white PSD [rad^2/Hz]   rms, shot only [mrad]   Monte Carlo with floor [mrad]")
for p in (1, 2, 5, 10, 20, 50, 100):
    d = base.with_detected_power(p * 1e-9)
    model = phase_noise_psd(d, a)
    shot = math.sqrt(2 * shot_noise_variance(a, d))
    means = [generate_noise(model, d.pulse_duration, d.sampling_rate, s).differential.mean()
             for s in range(400)]
    mc = np.std(means, ddof=1)
    print(f"{p:>10}   {model.white_level:>20.2e}   {shot * 1e3:>21.3f}   {mc * 1e3:>29.3f}")
