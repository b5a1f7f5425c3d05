"""Dispersive phase of the 87Sr 461 nm line seen by 10^4 atoms.

Prints the phase against probe detuning for an unpolarized and a fully
stretched ground state, then the differential phase picked up by a pair of
sidebands at +-90 MHz.
"""

import math

import numpy as np

from lattice_qnd import (ProbeGeometry, atomic_phase_shift, differential_phase,
                         effective_cross_section, population_preset, sr87_blue_manifold)

manifold = sr87_blue_manifold()
geometry = ProbeGeometry(cloud_radius=10e-6, beam_waist=37e-6)
print(f"effective area S = {effective_cross_section(geometry) * 1e12:.0f} um^2")
for line in manifold.lines:
    print(f"  F' = {line.F_excited}: offset {line.detuning_offset / 1e6:+.2f} MHz")

unpolarized = population_preset("sr87_blue_unpolarized", 1e4)
stretched = population_preset("sr87_blue_stretched", 1e4)

print("\ndetuning [MHz]   unpolarized [mrad]   stretched [mrad]")
for det in np.arange(-150, 151, 25):
    a = atomic_phase_shift(manifold, unpolarized, geometry, 0, det * 1e6)
    b = atomic_phase_shift(manifold, stretched, geometry, 0, det * 1e6)
    print(f"{det:>14.0f}   {a * 1e3:>18.2f}   {b * 1e3:>16.2f}")

# the +1 and -1 sidebands sit on opposite sides of the line
omega = 2 * math.pi * 90e6
print(f"\nphi(+1) - phi(-1) at 90 MHz: {differential_phase(manifold, unpolarized, geometry, 0, omega) * 1e3:.1f} mrad")
