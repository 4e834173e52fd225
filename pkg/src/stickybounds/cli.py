"""Command line interface.

Three subcommands, each driven by a TOML run file:

  stickybounds bounds config.toml       closed-form bounds only
  stickybounds verify config.toml       bounds + FEM dominance check
  stickybounds convergence config.toml  mesh ladder + extrapolation

Exit codes: 0 success, 2 dominance failure (a bound fell on the wrong side
of its discrete estimate, or a strict-mode warning), 3 configuration error,
4 solver failure.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import ConfigError, load_config
from .meshing import MeshError
from .pipeline import csv_rows, run_bounds, run_convergence, run_verify
from .report import render_summary, write_convergence_csv, write_json
from .spectral import SolverError

__all__ = ["main"]

EXIT_OK = 0
EXIT_DOMINANCE = 2
EXIT_CONFIG = 3
EXIT_SOLVER = 4


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on CLI misuse, which collides with the
    # dominance-failure code; report misuse as a configuration error instead
    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="stickybounds", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("bounds", "evaluate the closed-form bounds"),
        ("verify", "bounds plus finite-element dominance verification"),
        ("convergence", "mesh ladder and Richardson extrapolation"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("config", help="path to the TOML run file")
        p.add_argument("--out", help="output directory (overrides [outputs].dir)")
        p.add_argument(
            "--mesh-ladder",
            help="comma-separated decreasing mesh sizes, e.g. 0.2,0.1,0.05",
        )
        p.add_argument("--seed", type=int, help="override [solver].seed")
        p.add_argument(
            "--strict",
            action="store_true",
            help="treat skipped dominance pairs and non-monotone ladders as failures",
        )
    return parser


def _parse_ladder(text: str):
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"--mesh-ladder {text!r} is not a comma-separated float list") from exc


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        config = load_config(args.config, strict=args.strict)
        config = config.with_overrides(
            out_dir=args.out,
            mesh_ladder=_parse_ladder(args.mesh_ladder) if args.mesh_ladder else None,
            seed=args.seed,
            strict=args.strict or None,
        )
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "bounds":
            report = run_bounds(config)
        elif args.command == "verify":
            report = run_verify(config)
        else:
            report = run_convergence(config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, MeshError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER

    os.makedirs(config.out_dir, exist_ok=True)
    write_json(os.path.join(config.out_dir, f"{args.command}.json"), report)
    if args.command in ("verify", "convergence"):
        write_convergence_csv(
            os.path.join(config.out_dir, f"{args.command}.csv"), csv_rows(report)
        )
    print(render_summary(report))

    if args.command == "verify":
        dom = report["verify"]["dominance"]
        if dom["failures"] > 0 or dom["strict_failures"]:
            return EXIT_DOMINANCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
