"""Command-line entry point: ``avalanche-dg --case 1 --out results``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

from .config import ConfigError, RunConfig, load_config, preset
from .physics import ParameterError
from .runner import Simulation
from .timestep import CFLViolation


def _times(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated times, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="avalanche-dg",
        description="RKDG simulation of a granular avalanche on an incline with a horizontal run-out.",
    )
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", metavar="PATH", help="TOML run configuration")
    src.add_argument("--case", type=int, choices=(1, 2, 3, 4), help="built-in chute case")
    ap.add_argument("--out", metavar="DIR", help="output directory (default: from config)")
    ap.add_argument("--n-cells", type=int, metavar="N")
    ap.add_argument("--t-end", type=float, metavar="T")
    ap.add_argument("--snap", type=_times, metavar="T0,T1,...", help="snapshot times")
    ap.add_argument("--strict-cfl", action="store_true", help="abort when the CFL limit is exceeded")
    ap.add_argument("-q", "--quiet", action="store_true")
    return ap


def make_config(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else preset(args.case)
    overrides = {}
    if args.n_cells is not None:
        overrides["n_cells"] = args.n_cells
    if args.t_end is not None:
        overrides["t_end"] = args.t_end
    if args.strict_cfl:
        overrides["strict_cfl"] = True
    if overrides:
        cfg = cfg.with_overrides(**overrides)
    if args.snap is not None:
        cfg = replace(cfg, output=replace(cfg.output, snapshot_times=args.snap))
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(levelname)s %(message)s")
    try:
        cfg = make_config(args)
    except (ConfigError, ParameterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out = args.out or cfg.output.directory
    try:
        summary = Simulation(cfg).run(out)
    except CFLViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if not args.quiet:
        report = {
            "name": summary.name,
            "t_end": summary.times[-1],
            "max_depth": summary.max_depth[-1],
            "max_speed": summary.max_speed[-1],
            "front": summary.front[-1],
            "steady_since": summary.steady_since(),
            "cfl_max": summary.cfl_max,
            "clamped_mass": summary.clamped_mass,
            "wall_time": round(summary.wall_time, 2),
            "output": str(out),
        }
        print(json.dumps(report, indent=1))
    return 0


if __name__ == "__main__":
    sys.exit(main())
