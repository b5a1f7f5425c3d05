"""Physical constants shared by every module (SI units, CODATA 2018 exact values)."""

from scipy import constants as _c

h = _c.h  # 6.62607015e-34 J s
c = _c.c  # 299792458 m/s
k_B = _c.k  # 1.380649e-23 J/K
amu = _c.atomic_mass

SR87_MASS_U = 86.9089
SR87_MASS = SR87_MASS_U * amu

# 1S0 - 1P1 line of Sr
SR_BLUE_WAVELENGTH = 461e-9
SR_BLUE_LINEWIDTH = 2 * _c.pi * 30e6  # rad/s, set from omega = 2 pi 90 MHz ~ 3 Gamma
SR_BLUE_PSAT = 1.2e-6  # W, averaged over the cloud

# 87Sr 1P1 hyperfine constants (MHz)
SR87_1P1_A = -3.4
SR87_1P1_B = 39.0
SR87_NUCLEAR_SPIN = 9 / 2
