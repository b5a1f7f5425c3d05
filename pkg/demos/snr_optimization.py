"""Which modulation frequency and depth give the best SNR for a fixed
number of photons scattered per atom?"""

import math
import warnings

from lattice_qnd.config import RunConfig
from lattice_qnd.snr_optimizer import optimize_modulation, sideband_loss_fraction, snr

budget = RunConfig().snr_budget()  # 80 photons per atom, 10^4 unpolarized atoms
MHz = 2 * math.pi * 1e6

with warnings.catch_warnings():
    warnings.simplefilter("error")
    best = optimize_modulation(budget, (10 * MHz, 300 * MHz), (1.5, 3.2))
print(f"optimum: f = {best.omega / MHz:.1f} MHz, a = {best.depth:.3f} rad, SNR = {best.snr:.0f}")

gamma = budget.manifold.linewidth
print("\nSNR against frequency at the optimal depth (saturates after a few linewidths):")
for k in (0.5, 1, 2, 3, 5, 10):
    print(f"  omega = {k:>4} Gamma: {snr(k * gamma, best.depth, budget):6.0f}")

print("\nSNR against depth at 90 MHz (peaked at the carrier null):")
for a in (1.8, 2.0, 2.2, 2.4, 2.6, 2.8):
    print(f"  a = {a:.1f}: {snr(90 * MHz, a, budget):6.0f}")

print(f"\nSNR lost to |n| >= 2 sidebands at 90 MHz, a = 2.4: "
      f"{100 * sideband_loss_fraction(90 * MHz, 2.4, budget):.1f} %")
