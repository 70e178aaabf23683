"""Command line front end: run, resume, analyze, fit.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 I/O failure.
"""

import argparse
import sys

from . import runner


def _add_override_flags(p):
    p.add_argument("--config", help="INI config file")
    p.add_argument("--grid", type=int, dest="L", help="sites per dimension")
    p.add_argument("--dx", type=float, help="spatial resolution (dt = dx^2)")
    p.add_argument("--g", type=float, help="nonlinear coupling")
    p.add_argument("--steps", type=int, help="total iteration count")
    p.add_argument("--init", dest="type", choices=["gaussian_vortices", "random_phase"],
                   help="initial condition type")
    p.add_argument("--seed", type=int, help="random seed")
    p.add_argument("--out", help="output directory")
    p.add_argument("--sample-every", type=int, dest="sample_every")
    p.add_argument("--spectra-every", type=int, dest="spectra_every")
    p.add_argument("--dump-every", type=int, dest="dump_every")
    p.add_argument("--checkpoint-every", type=int, dest="checkpoint_every")
    p.add_argument("--fit-window", dest="windows", metavar="KMIN:KMAX",
                   help="power-law fit window in units of k_u")


def _parse_window(text):
    lo, hi = text.split(":", 1)
    return float(lo), float(hi)


def build_parser():
    parser = argparse.ArgumentParser(prog="qlaturb",
                                     description="2D quantum turbulence on a unitary lattice")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a configured simulation")
    _add_override_flags(p_run)

    p_res = sub.add_parser("resume", help="continue a run from its latest checkpoint")
    p_res.add_argument("out_dir", help="output directory of the interrupted run")
    p_res.add_argument("--steps", type=int, help="new total step count")

    p_ana = sub.add_parser("analyze", help="recompute spectra/vortices from stored dumps")
    p_ana.add_argument("run_dir", help="run directory (or directory of .qst dumps)")
    p_ana.add_argument("--out", help="where to write the analysis (default: RUN/analysis)")

    p_fit = sub.add_parser("fit", help="power-law fits over stored spectra")
    p_fit.add_argument("run_dir", help="run directory containing spectra/")
    p_fit.add_argument("--fit-window", required=True, metavar="KMIN:KMAX")
    p_fit.add_argument("--which", choices=["ic", "c"], default="ic")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            overrides = {k: v for k, v in vars(args).items()
                         if k not in ("command", "config") and v is not None}
            cfg = runner.load_config(args.config, overrides)
            summary = runner.run(cfg)
            print(f"run finished: {summary['samples']} samples, "
                  f"gamma={summary['gamma']}, out={cfg.out}")
        elif args.command == "resume":
            summary = runner.resume(args.out_dir, steps=args.steps)
            print(f"resume finished: {summary['samples']} samples, out={args.out_dir}")
        elif args.command == "analyze":
            info = runner.analyze(args.run_dir, args.out)
            print(f"analyzed {info['snapshots']} dumps into {info['out']}")
        elif args.command == "fit":
            fits = runner.fit_stored_spectra(args.run_dir, _parse_window(args.fit_window),
                                             which=args.which)
            for t, fit in fits:
                print(f"t={t} alpha={fit.alpha:.4f} +- {fit.stderr:.4f} "
                      f"({fit.which}, k in [{fit.k_min:g}, {fit.k_max:g}])")
            if not fits:
                print("no usable fit windows")
    except runner.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except runner.NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
