"""Command-line entry point: ``lattice-qnd <command> [options]``.

Data go to ``--out`` (standard output by default) as CSV. Summary lines are
written to standard error prefixed with ``#``. Exit codes: 0 success,
2 usage, 3 configuration, 4 runtime.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings

import numpy as np

from .atomic_structure import atomic_phase_shift
from .config import ConfigError, RunConfig, apply_overrides, load_config
from .cycle_simulator import batch_csv, run_batch, scaling_slope, summarize
from .heating_retention import (LatticeSettings, fit_photon_number, read_retention_csv,
                                recoil_energy, retention_fraction)
from .noise_shot import generate_noise, phase_noise_psd, shot_noise_crossover, shot_noise_variance
from .snr_optimizer import linewidth_sensitivity, optimize_modulation, sideband_loss_fraction, snr

EXIT_USAGE, EXIT_CONFIG, EXIT_RUNTIME = 2, 3, 4


def _num(x: float) -> str:
    """Shortest round-trip decimal."""
    x = float(x)
    if x == 0:
        return "0.0"
    return repr(x)


def _csv(header: str, rows) -> str:
    lines = [header]
    lines.extend(",".join(_num(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _range(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected start:stop:count, got {text!r}")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:count, got {text!r}")


def _note(msg: str) -> None:
    print(f"# {msg}", file=sys.stderr)


def _grid(start: float, stop: float, step: float) -> np.ndarray:
    count = math.floor((stop - start) / step + 1e-9) + 1
    return np.round(start + step * np.arange(count), 9)


# commands ------------------------------------------------------------------

def cmd_phase_spectrum(cfg: RunConfig, args) -> str:
    manifold, geometry = cfg.manifold_model(), cfg.geometry_model()
    q = cfg.populations.polarization
    det = _grid(-args.span_MHz, args.span_MHz, args.step_MHz)
    cols = [atomic_phase_shift(manifold, cfg.populations_model(p), geometry, q, det * 1e6)
            for p in ("sr87_blue_unpolarized", "sr87_blue_stretched")]
    rows = zip(det, 1e3 * cols[0], 1e3 * cols[1])
    return _csv("detuning_MHz,phase_unpolarized_mrad,phase_stretched_mrad", rows)


def cmd_noise_psd(cfg: RunConfig, args) -> str:
    base = cfg.detection_model()
    a = cfg.modulation.depth_rad
    lam = cfg.manifold.wavelength_nm * 1e-9
    seeds = np.random.SeedSequence(args.seed).spawn(len(args.powers))
    rows = []
    for power, ss in zip(args.powers, seeds):
        d = base.with_detected_power(power * 1e-9)
        model = phase_noise_psd(d, a, lam)
        rms_model = math.sqrt(2 * shot_noise_variance(a, d, lam))
        pulse_seeds = ss.generate_state(args.trials)
        means = [generate_noise(model, d.pulse_duration, d.sampling_rate, int(s)).differential.mean()
                 for s in pulse_seeds]
        rows.append((power, model.white_level, 1e3 * rms_model, 1e3 * float(np.std(means, ddof=1))))
    cross = shot_noise_crossover(a, base, lam)
    _note(f"shot_noise_crossover_detected_nW={_num(cross * 1e9)}")
    return _csv("detected_power_nW,white_level_rad2_per_Hz,rms_mrad_per_pulse,rms_mrad_mc", rows)


def cmd_retention(cfg: RunConfig, args) -> str:
    lat = cfg.lattice_model()
    er = recoil_energy(lat.wavelength, lat.mass)
    depths_mK = _grid(0.0, args.max_mK, args.step_mK)
    depths_er = np.array([LatticeSettings(x * 1e-3, "K", lat.wavelength, lat.mass).depth_recoils
                          for x in depths_mK])
    beta = retention_fraction(depths_er, cfg.lattice.n_gamma)
    _note(f"recoil_energy_J={_num(er)}")
    if args.fit:
        result = fit_photon_number(read_retention_csv(args.fit))
        _note(f"n_gamma_fit={_num(result.n_gamma)} stderr={_num(result.stderr)}")
    return _csv("depth_Er,depth_mK,beta_model", zip(depths_er, depths_mK, beta))


def cmd_snr_map(cfg: RunConfig, args) -> str:
    budget = cfg.snr_budget()
    w0, w1, nw = args.omega_MHz
    a0, a1, na = args.depth
    to_w = 2 * math.pi * 1e6
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = optimize_modulation(budget, (w0 * to_w, w1 * to_w), (a0, a1), grid=max(nw, na))
    omegas = np.linspace(w0, w1, nw)
    depths = np.linspace(a0, a1, na)
    rows = [(w, a, snr(w * to_w, a, budget)) for w in omegas for a in depths]
    gamma = budget.manifold.linewidth
    w_op = 2 * math.pi * 90e6
    _note(f"optimum frequency_MHz={_num(res.omega / to_w)} depth_rad={_num(res.depth)} "
          f"snr={_num(res.snr)} on_boundary={res.on_boundary}")
    _note(f"sideband_loss_90MHz_2.4rad={_num(sideband_loss_fraction(w_op, 2.4, budget))}")
    sens = linewidth_sensitivity(w_op, 2.4, budget, [2 * math.pi * 28e6, 2 * math.pi * 32e6])
    _note("sideband_loss_vs_linewidth " + " ".join(
        f"{_num(g / to_w)}MHz={_num(v)}" for g, v in sens.items()))
    _note(f"snr_3Gamma_over_10Gamma={_num(snr(3 * gamma, res.depth, budget) / snr(10 * gamma, res.depth, budget))}")
    for w in caught:
        _note(f"warning: {w.message}")
    return _csv("frequency_MHz,depth_rad,snr", rows)


def cmd_cycle(cfg: RunConfig, args) -> str:
    config = cfg.sequence_model(args.seed)
    results = run_batch(args.N, args.p, args.trials, config, args.seed, args.jobs)
    summary = summarize(results)
    for row in summary:
        _note(" ".join(f"{k}={_num(v) if isinstance(v, float) else v}" for k, v in row.items()))
    if args.p is not None and len(args.N) > 1:
        for p in args.p:
            cells = [r for r in summary if r["p_true"] == p]
            slope = scaling_slope([r["N_true"] for r in cells], [r["rms_p"] for r in cells])
            _note(f"rms_p_vs_N_slope p={_num(p)} slope={_num(slope)}")
    return batch_csv(results)


COMMANDS = {
    "phase-spectrum": cmd_phase_spectrum,
    "noise-psd": cmd_noise_psd,
    "retention": cmd_retention,
    "snr-map": cmd_snr_map,
    "cycle": cmd_cycle,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI configuration file")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VAL",
                        help="override, e.g. --set detection.probe_power_nW=14")
    common.add_argument("--seed", type=int, help="RNG seed (required for Monte Carlo commands)")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for batch runs")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")

    parser = argparse.ArgumentParser(prog="lattice-qnd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phase-spectrum", parents=[common], help="phase shift vs probe detuning")
    p.add_argument("--span-MHz", dest="span_MHz", type=float, default=150.0)
    p.add_argument("--step-MHz", dest="step_MHz", type=float, default=0.5)

    p = sub.add_parser("noise-psd", parents=[common], help="phase noise vs detected power")
    p.add_argument("--powers", type=_float_list, default=[1, 2, 5, 10, 20, 40, 100],
                   help="detected powers in nW, comma separated")
    p.add_argument("--trials", type=int, default=500)

    p = sub.add_parser("retention", parents=[common], help="retention vs lattice depth")
    p.add_argument("--max-mK", dest="max_mK", type=float, default=0.2)
    p.add_argument("--step-mK", dest="step_mK", type=float, default=0.005)
    p.add_argument("--fit", metavar="CSV", help="fit n_gamma to depth_Er,retained_fraction,uncertainty data")

    p = sub.add_parser("snr-map", parents=[common], help="SNR over modulation frequency and depth")
    p.add_argument("--omega-MHz", dest="omega_MHz", type=_range, default=(10.0, 300.0, 30),
                   help="modulation frequency f = omega / 2 pi grid, start:stop:count")
    p.add_argument("--depth", type=_range, default=(1.5, 3.2, 35), help="start:stop:count")

    p = sub.add_parser("cycle", parents=[common], help="Monte Carlo detection cycles")
    p.add_argument("--N", type=_float_list, default=[1e4], help="atom numbers")
    p.add_argument("--p", type=_float_list, default=None,
                   help="transition probabilities (omit for the two-pulse sequence)")
    p.add_argument("--trials", type=int, default=500)
    return parser


MONTE_CARLO = {"noise-psd", "cycle"}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on usage errors
    if args.command in MONTE_CARLO and args.seed is None:
        parser.error(f"{args.command} requires --seed")
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        cfg = apply_overrides(cfg, args.set).validate()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        text = COMMANDS[args.command](cfg, args)
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
