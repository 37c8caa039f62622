"""Command-line entry point.

    relidlms run    [--config FILE] [--out DIR] [flags]
    relidlms sweep  --axis {ls,a,n_nodes} --values 5,20,50 [...]
    relidlms preset {fig2,fig3,fig4,fig5,fig6} [...]

Precedence: built-in defaults, then the preset, then ``--config``, then flags.
"""

import argparse
import logging
import sys

from ..errors import ConfigError
from ..metrics import to_db
from .config import FIELD_TYPES, PRESETS, SWEEP_AXES, parse_config, preset
from .export import export_artifacts, export_sweep
from .runner import run_monte_carlo, run_sweep

ALIASES = {"seed": "master_seed", "runs": "n_runs", "cycles": "n_cycles"}


def _common(parser):
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--out", default="results", help="output directory (default: results)")
    parser.add_argument("-v", "--verbose", action="store_true")
    for flag, key in ALIASES.items():
        parser.add_argument(f"--{flag}", dest=key, metavar=key.upper(), help=f"alias of --{key.replace('_', '-')}")
    for key in FIELD_TYPES:
        parser.add_argument(f"--{key.replace('_', '-')}", dest=key, metavar="VALUE")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="relidlms",
        description="Incremental LMS vs reliability-weighted incremental LMS, Monte-Carlo runs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("run", help="run one Monte-Carlo experiment"))
    sp = sub.add_parser("sweep", help="sweep one parameter")
    sp.add_argument("--axis", dest="sweep_axis", choices=SWEEP_AXES)
    sp.add_argument("--values", dest="sweep_values", help="comma-separated values")
    _common(sp)
    pp = sub.add_parser("preset", help="reproduce one figure's setup")
    pp.add_argument("name", choices=sorted(PRESETS))
    _common(pp)
    return parser


def _overrides(args):
    return {key: getattr(args, key, None) for key in FIELD_TYPES}


def _report_run(art):
    for name, s in art.summary.items():
        ss = s["steady_state_msd"]
        ct = s["convergence_cycles"]
        print(f"{name:9s} steady-state MSD {to_db(ss):8.3f} dB  converged at cycle {ct if ct is not None else 'n/a'}")


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        base = preset(args.name) if args.command == "preset" else None
        cfg = parse_config(args.config, _overrides(args), base=base)
        if args.command == "sweep" and not cfg.sweep_axis:
            raise ConfigError("sweep_axis: required for the sweep command (--axis)")
        if args.command == "run" and cfg.sweep_axis:
            raise ConfigError("sweep_axis: set in a 'run' config; use the sweep command")
        if cfg.sweep_axis:
            result = run_sweep(cfg)
            path = export_sweep(result, args.out)
            for row in result.rows:
                print(
                    f"{row['sweep_axis']}={row['sweep_value']!s:6s} {row['algorithm']:9s} "
                    f"{to_db(row['steady_state_msd']):8.3f} dB  cycles {row['convergence_cycles']}"
                )
            for k, v in result.checks.items():
                print(f"check {k}: {v}")
            print(f"summary written to {path}")
        else:
            art = run_monte_carlo(cfg)
            export_artifacts(art, args.out)
            _report_run(art)
            print(f"artifacts written to {args.out}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
