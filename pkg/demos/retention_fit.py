"""Atom loss from probe heating, and recovering the photon number from a
retention-versus-depth scan."""

import numpy as np

from lattice_qnd import (LatticeSettings, ModulationSettings, RetentionPoint, absorbed_photons,
                         fit_photon_number, retention_fraction, sr87_blue_manifold)

manifold = sr87_blue_manifold()
n = absorbed_photons(14e-9, 3e-3, ModulationSettings(), manifold)
print(f"photons absorbed per atom for a 14 nW, 3 ms pulse: {n:.1f}")

for mK in (0.02, 0.05, 0.1, 0.2):
    depth = LatticeSettings(mK * 1e-3, "K").depth_recoils
    print(f"  U0 = {mK:.2f} mK = {depth:6.1f} E_R: retention {retention_fraction(depth, 103):.3f}")

# synthetic scan with 2 % error bars
rng = np.random.default_rng(1)
depths = np.geomspace(15, 400, 8)
beta = np.clip(retention_fraction(depths, 103) + 0.02 * rng.standard_normal(8), 0, 1)
fit = fit_photon_number([RetentionPoint(d, b, 0.02) for d, b in zip(depths, beta)])
print(f"\nfitted n_gamma = {fit.n_gamma:.1f} +- {fit.stderr:.1f} (true 103), chi2 = {fit.chi2:.1f}")
