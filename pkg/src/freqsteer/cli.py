"""Command-line interface.

Subcommands: gen-dataset, run, ablate, spectra, compare, metrics.
Exit codes: 0 success, 2 config error, 3 missing input, 4 numerical failure.
"""

import argparse
import sys

from . import harness
from .config import default_config, load_config
from .errors import ConfigError, MissingInputError, NumericalError


def _add_config_arg(parser):
    parser.add_argument("--config", metavar="PATH", default=None,
                        help="INI config file; defaults apply when omitted")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="freqsteer",
        description="Reward-guided diffusion sampling with adaptive frequency steering.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-dataset", help="synthesize the paired HR/LR dataset")
    _add_config_arg(p)

    p = sub.add_parser("run", help="run the configured strategy over the dataset")
    _add_config_arg(p)
    p.add_argument("--seed", type=int, default=None, metavar="U64",
                   help="override the config seed (single-seed run)")
    p.add_argument("--threads", type=int, default=None, metavar="N")
    p.add_argument("--save-latents", action="store_true",
                   help="persist the refined latent at every step (needed by spectra)")
    p.add_argument("--out", default=None, metavar="DIR")

    p = sub.add_parser("ablate", help="sweep one hyperparameter and emit a summary CSV")
    _add_config_arg(p)
    p.add_argument("sweep", help="N=5,10,20 | K=0,1,2 | n=1:5 | tau")
    p.add_argument("--threads", type=int, default=None, metavar="N")
    p.add_argument("--out", default=None, metavar="DIR")

    p = sub.add_parser("spectra", help="export per-timestep radial power spectra of saved latents")
    p.add_argument("run_dir", metavar="RUN_DIR")
    p.add_argument("--out", default=None, metavar="DIR")

    p = sub.add_parser("compare", help="render a seed-median metric table across run dirs")
    p.add_argument("run_dirs", nargs="+", metavar="RUN_DIR")
    p.add_argument("--out", default=None, metavar="DIR")

    p = sub.add_parser("metrics", help="print the metric blocks of run dirs")
    p.add_argument("run_dirs", nargs="+", metavar="RUN_DIR")
    return parser


def _load(args):
    if getattr(args, "config", None):
        return load_config(args.config)
    return default_config()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen-dataset":
            return harness.cmd_gen_dataset(_load(args))
        if args.command == "run":
            return harness.cmd_run(_load(args), out_override=args.out, threads=args.threads,
                                   save_latents=args.save_latents, seed_override=args.seed)
        if args.command == "ablate":
            return harness.cmd_ablate(_load(args), args.sweep, out_override=args.out,
                                      threads=args.threads)
        if args.command == "spectra":
            return harness.cmd_spectra(args.run_dir, out_override=args.out)
        if args.command == "compare":
            return harness.cmd_compare(args.run_dirs, out_override=args.out)
        if args.command == "metrics":
            return harness.cmd_metrics(args.run_dirs)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except MissingInputError as exc:
        print(f"missing input: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
