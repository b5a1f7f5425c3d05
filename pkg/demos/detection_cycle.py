"""Full detection cycles: atom number from two pulses, excitation
probability from three, and how the latter improves with more atoms."""

from dataclasses import replace

from lattice_qnd.config import RunConfig
from lattice_qnd.cycle_simulator import (duty_cycle_projection, run_batch, scaling_slope,
                                         summarize)

config = RunConfig().sequence_model()

pop = summarize(run_batch([1e4], None, 500, config, seed=1))[0]
print(f"N = 1e4: signal {pop['mean_phase'] * 1e3:.1f} mrad, noise {pop['rms_phase'] * 1e3:.3f} mrad, "
      f"SNR {pop['mean_phase'] / pop['rms_phase']:.0f}, N estimate {pop['mean_N']:.0f} +- {pop['rms_N']:.0f}")

Ns = [1e3, 3e3, 1e4]
for label, cfg in [("detection only", config),
                   ("with projection noise", replace(config, projection_noise=True))]:
    rows = summarize(run_batch(Ns, [0.5], 500, cfg, seed=2))
    rms = [r["rms_p"] for r in rows]
    text = ", ".join(f"{r:.4f}" for r in rms)
    print(f"p = 0.5 RMS error at N = 1e3, 3e3, 1e4 ({label}): {text}; "
          f"slope {scaling_slope(Ns, rms):.2f}")

# keep atoms for the next cycle while at least 10 % of them are left
d = duty_cycle_projection(load_time=1.0, interrogation_time=0.4, detection_dead_time=0.1,
                          retention=0.95, min_atoms=1e3, initial_atoms=1e4)
print(f"\nrecycling at 95 % retention: {d.cycles_until_reload} cycles per load, "
      f"duty cycle {100 * d.duty_cycle:.0f} %")
