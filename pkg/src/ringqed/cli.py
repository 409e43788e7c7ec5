"""Command-line front end.

Synthesis commands read a run file and write column data; fit commands
read column data back and write fit reports; plan reads a fleet file.
Every file-producing command drops a .manifest next to its output
recording the command, config digest, seed and library versions.

Exit codes: 0 success, 1 usage error, 2 domain error (bad data, no
convergence, infeasible plan, malformed files).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__, cqed, dataio, resonator
from .config import load_config, load_fleet
from .errors import RingQedError
from .estimation import (fit_decay, fit_g2_purity, fit_resonance,
                         fit_tuning_rate)
from .planner import plan_alignment, OBJECTIVES
from .strain import tuning_curve

__all__ = ["main", "build_parser"]


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _manifest(args, out, seed=None):
    config = getattr(args, "config", None) or getattr(args, "fleet", None)
    dataio.write_manifest(dataio.manifest_path(out),
                          command=" ".join(args.argv),
                          config_path=config, seed=seed)


def _seed(args, cfg=None):
    if args.seed is not None:
        return args.seed
    if cfg is not None:
        return cfg.seed(0)
    return 0


# ---------------------------------------------------------------------------
# synthesis commands
# ---------------------------------------------------------------------------

def _cmd_simulate_transmission(args):
    cfg = load_config(args.config)
    geometry = cfg.ring_geometry()
    coupling = cfg.coupling_state()
    wavelengths = np.linspace(args.start_nm, args.stop_nm,
                              args.points) * 1e-9
    spectrum = resonator.transmission_spectrum(coupling, geometry,
                                               wavelengths)
    dataio.write_spectrum(args.out, spectrum)
    _manifest(args, args.out)
    fsr = resonator.free_spectral_range(geometry) * 1e9
    print(f"wrote {args.out}: {args.points} samples, "
          f"{args.start_nm:g} to {args.stop_nm:g} nm "
          f"(design FSR {fsr:.4f} nm)")
    return 0


def _cmd_simulate_tuning(args):
    cfg = load_config(args.config)
    calibration = cfg.tuning_calibration()
    volts = np.linspace(args.v_start, args.v_stop, args.points)
    points = [(v, lam_m * 1e9)
              for v, lam_m in tuning_curve(calibration, volts)]
    if args.noise_pm > 0.0:
        seed = _seed(args, cfg)
        rng = np.random.Generator(np.random.PCG64(seed))
        points = [(v, lam + rng.normal(0.0, args.noise_pm * 1e-3))
                  for v, lam in points]
    dataio.write_tuning_curve(args.out, points)
    _manifest(args, args.out,
              seed=_seed(args, cfg) if args.noise_pm > 0.0 else None)
    print(f"wrote {args.out}: {args.points} points, "
          f"{args.v_start:g} to {args.v_stop:g} V")
    return 0


def _cmd_simulate_decay(args):
    cfg = load_config(args.config)
    state = cfg.emitter_state()
    seed = _seed(args, cfg)
    edges = np.linspace(0.0, args.t_max_ns, args.bins + 1)
    sigma = args.irf_fwhm_ns * cqed.IRF_FWHM_TO_SIGMA
    histogram = cqed.synthesize_decay(
        state, args.detuning_nm, sigma, edges,
        amplitude=args.amplitude, seed=seed)
    dataio.write_decay_histogram(args.out, histogram)
    _manifest(args, args.out, seed=seed)
    rate = cqed.decay_rate_at_detuning(state, args.detuning_nm)
    print(f"wrote {args.out}: {args.bins} bins to {args.t_max_ns:g} ns, "
          f"true rate {rate:.4f} /ns, seed {seed}")
    return 0


def _cmd_simulate_g2(args):
    cfg = load_config(args.config) if args.config else None
    lifetime = args.lifetime_ns
    if lifetime is None:
        if cfg is None or not cfg.has("emitter"):
            raise RingQedError(
                "give --lifetime-ns or a config with an [emitter] section")
        state = cfg.emitter_state()
        lifetime = 1.0 / cqed.decay_rate_at_detuning(state, 0.0)
    seed = _seed(args, cfg)
    histogram = cqed.synthesize_g2(
        purity_deficit=args.g2, lifetime_ns=lifetime,
        repetition_ns=args.rep_ns, n_side_peaks=args.side_peaks,
        counts_scale=args.counts, seed=seed, bin_width_ns=args.bin_ns)
    dataio.write_correlation_histogram(args.out, histogram)
    _manifest(args, args.out, seed=seed)
    print(f"wrote {args.out}: lifetime {lifetime:.4f} ns, "
          f"g2 target {args.g2:g}, seed {seed}")
    return 0


# ---------------------------------------------------------------------------
# fit commands
# ---------------------------------------------------------------------------

def _print_report(report):
    print(f"model {report.model_id}: converged={report.converged} "
          f"after {report.iterations} iterations, "
          f"residual norm {report.residual_norm:.6g}")
    for key, val in report.parameters.items():
        line = f"  {key} = {val:.6g}"
        if report.standard_errors and key in report.standard_errors:
            line += f" +/- {report.standard_errors[key]:.3g}"
        print(line)


def _cmd_fit_resonance(args):
    spectrum = dataio.read_spectrum(args.infile)
    report = fit_resonance(spectrum)
    dataio.write_report(args.out, report)
    _manifest(args, args.out)
    _print_report(report)
    return 0


def _cmd_fit_decay(args):
    histogram = dataio.read_decay_histogram(args.infile)
    report = fit_decay(histogram)
    dataio.write_report(args.out, report)
    _manifest(args, args.out)
    _print_report(report)
    return 0


def _cmd_fit_rate(args):
    points = dataio.read_tuning_curve(args.infile)
    report = fit_tuning_rate(points)
    dataio.write_report(args.out, report)
    _manifest(args, args.out)
    _print_report(report)
    return 0


def _cmd_fit_g2(args):
    histogram = dataio.read_correlation_histogram(args.infile)
    report = fit_g2_purity(histogram)
    dataio.write_report(args.out, report)
    _manifest(args, args.out)
    _print_report(report)
    return 0


# ---------------------------------------------------------------------------
# planning and mode volume
# ---------------------------------------------------------------------------

def _cmd_plan(args):
    devices = load_fleet(args.fleet)
    plan = plan_alignment(devices, objective=args.objective)
    dataio.write_plan(args.out, plan)
    _manifest(args, args.out)
    print(f"target wavelength {plan.target_wavelength_nm:.6f} nm "
          f"({args.objective} = {plan.objective_value:.4f} V), "
          f"window [{plan.feasible_lo_nm:.6f}, {plan.feasible_hi_nm:.6f}]")
    for setting in plan.settings:
        print(f"  {setting.name}: strain {setting.strain_voltage_v:+.3f} V, "
              f"eo {setting.eo_voltage_v:+.3f} V")
    return 0


def _cmd_mode_volume(args):
    field = dataio.read_mode_field(args.infile)
    volume = resonator.effective_mode_volume(
        field, wavelength_m=args.wavelength_nm * 1e-9,
        ref_index=args.ref_index)
    print(f"mode volume {volume.cubic_meters * 1e18:.6g} um^3, "
          f"{volume.normalized:.4f} (lambda/n)^3")
    lines = ["[mode_volume]",
             f"cubic_microns = {volume.cubic_meters * 1e18:.12g}",
             f"normalized = {volume.normalized:.12g}"]
    if args.quality is not None:
        peak = resonator.max_purcell(args.quality, volume.normalized)
        print(f"peak enhancement at Q = {args.quality:g}: {peak:.4f}")
        lines.append(f"max_purcell = {peak:.12g}")
    if args.out:
        from .textio import atomic_write_text
        atomic_write_text(args.out, "\n".join(lines) + "\n")
        _manifest(args, args.out)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    parser = _Parser(prog="ringqed",
                     description="tunable microring cavity QED toolkit")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("simulate-transmission",
                       help="ring transmission spectrum from a run file")
    p.add_argument("--config", required=True)
    p.add_argument("--start-nm", type=float, required=True)
    p.add_argument("--stop-nm", type=float, required=True)
    p.add_argument("--points", type=int, default=20001)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate_transmission)

    p = sub.add_parser("simulate-tuning",
                       help="strain tuning curve, optionally noisy")
    p.add_argument("--config", required=True)
    p.add_argument("--v-start", type=float, required=True)
    p.add_argument("--v-stop", type=float, required=True)
    p.add_argument("--points", type=int, default=41)
    p.add_argument("--noise-pm", type=float, default=0.0,
                   help="gaussian wavelength noise, pm (default none)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate_tuning)

    p = sub.add_parser("simulate-decay",
                       help="counted decay histogram of the emitter")
    p.add_argument("--config", required=True)
    p.add_argument("--detuning-nm", type=float, default=0.0)
    p.add_argument("--irf-fwhm-ns", type=float, default=0.0993)
    p.add_argument("--t-max-ns", type=float, default=12.5)
    p.add_argument("--bins", type=int, default=625)
    p.add_argument("--amplitude", type=float, default=3e5)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate_decay)

    p = sub.add_parser("simulate-g2",
                       help="pulsed intensity-correlation histogram")
    p.add_argument("--config", default=None)
    p.add_argument("--g2", type=float, default=0.012,
                   help="central-peak area fraction (default 0.012)")
    p.add_argument("--lifetime-ns", type=float, default=None)
    p.add_argument("--rep-ns", type=float, default=12.5)
    p.add_argument("--side-peaks", type=int, default=6)
    p.add_argument("--counts", type=float, default=2e5,
                   help="area of each side peak in counts")
    p.add_argument("--bin-ns", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate_g2)

    p = sub.add_parser("fit-resonance",
                       help="locate and fit transmission dips")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_fit_resonance)

    p = sub.add_parser("fit-decay", help="decay rate with IRF handling")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_fit_decay)

    p = sub.add_parser("fit-rate", help="tuning slope in pm/V")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_fit_rate)

    p = sub.add_parser("fit-g2", help="single-photon purity from a comb")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_fit_g2)

    p = sub.add_parser("plan", help="align a device fleet in wavelength")
    p.add_argument("--fleet", required=True)
    p.add_argument("--objective", choices=OBJECTIVES,
                   default="minimize_max_abs_voltage")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("mode-volume",
                       help="effective mode volume of a sampled field")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--wavelength-nm", type=float, required=True)
    p.add_argument("--ref-index", type=float, required=True)
    p.add_argument("--quality", type=float, default=None,
                   help="also report the peak enhancement at this Q")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_mode_volume)

    return parser


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = ["ringqed"] + argv
    try:
        return args.func(args)
    except RingQedError as exc:
        print(f"ringqed: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
