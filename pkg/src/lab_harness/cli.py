#!/usr/bin/env python3
"""
Command line entry point: `wpl <subcommand>`.

Global flags go before or after the subcommand, e.g.
    wpl --seed 7 --out sweep.csv sweep --family bundle --p 4 --R 256 1024 4096
    wpl partition --points cloud.csv --D 2 --seed 3 --out cells.json
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import pandas as pd

from decoupling.arc_ensemble import fit_growth, run_battery
from exponent_ops.polytope import constraint_report, make_point, parse_exponent, vertex
from harmonic_core.extension import evaluate_field
from harmonic_core.field_io import read_field, read_profile, write_field, write_profile
from harmonic_core.norms import lp_norm_ball
from harmonic_core.profiles import FrequencyProfile
from harmonic_core.spacetime import SpaceTimeGrid
from lab_harness.config import LabConfig, load_config
from lab_harness.fitting import fit_power_law
from lab_harness.sweep import default_claim, run_sweep
from partitioning.partition import WeightedPoints, build_partition
from wave_packets.decomposition import WavePacketDecomposer
from wave_packets.families import FAMILIES, build_family

EXIT_ERROR = 2
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

logger = logging.getLogger("wpl")


def _emit(document, out: Optional[str]) -> None:
    text = json.dumps(document, indent=2, default=float)
    if out:
        Path(out).write_text(text + "\n")
        logger.info(f"Wrote {out}")
    else:
        print(text)


def _profile_from_args(args) -> FrequencyProfile:
    if getattr(args, "profile", None):
        return read_profile(args.profile)
    return build_family(args.family, args.R, N=args.N, U=args.U, M=args.M)


def cmd_example(args, config: LabConfig) -> int:
    f = build_family(args.family, args.R, N=args.N, U=args.U, M=args.M)
    if args.out:
        write_profile(f, args.out)
    else:
        print(json.dumps({"label": f.label, "M": f.M, "l2_norm": f.l2_norm(), "l1_norm": f.l1_norm()}))
    return 0


def cmd_extend(args, config: LabConfig) -> int:
    if not args.out:
        raise ValueError("extend needs --out <file.fld>")
    f = _profile_from_args(args)
    grid = SpaceTimeGrid.for_ball(args.R, nx=args.nx, nt=args.nt, margin=args.margin)
    field = evaluate_field(f, grid, max_points=config.max_field_points, threads=config.threads)
    write_field(field, args.out)
    return 0


def cmd_decompose(args, config: LabConfig) -> int:
    f = _profile_from_args(args)
    decomp = WavePacketDecomposer(config.packet_settings()).decompose(f, args.R)
    _emit(decomp.to_dict(), args.out)
    return 0


def cmd_norm(args, config: LabConfig) -> int:
    field = read_field(args.field)
    R = args.R if args.R is not None else field.grid.R
    lines = [json.dumps({"p": p, "R": R, "value": lp_norm_ball(field, p, R)}) for p in args.p]
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n")
    else:
        print("\n".join(lines))
    return 0


def cmd_polytope(args, config: LabConfig) -> int:
    if args.vertex:
        point = vertex(args.vertex)
    else:
        if args.p is None or args.alpha is None or args.beta is None:
            raise ValueError("polytope needs --vertex or all of --p, --alpha, --beta")
        point = make_point(parse_exponent(args.p), parse_exponent(args.alpha), parse_exponent(args.beta))
    _emit(constraint_report(point), args.out)
    return 0


def cmd_partition(args, config: LabConfig) -> int:
    points = WeightedPoints.from_csv(args.points)
    result = build_partition(
        points,
        args.D,
        tolerance=config.partition_tolerance,
        seed=config.seed,
        restarts=config.partition_restarts,
        maxiter=config.partition_maxiter,
        threads=config.threads,
    )
    _emit(result.to_dict(), args.out)
    return 0


def cmd_decouple(args, config: LabConfig) -> int:
    deltas = [float(parse_exponent(d)) for d in args.delta_list]
    frame = run_battery(
        deltas,
        args.trials,
        seed=config.seed,
        amplitude_law=args.law,
        threads=config.threads,
        grid_budget=config.decoupling_grid_budget,
    )
    if args.out:
        frame.to_csv(args.out, index=False, float_format="%.12e")
        logger.info(f"Wrote {len(frame)} trials to {args.out}")
    else:
        print(frame.to_csv(index=False, float_format="%.12e"), end="")
    fit = None
    if frame["delta"].nunique() >= 2:
        fit = fit_growth(frame.groupby("delta")["ratio"].max().to_dict())
        logger.info(f"Growth slope {fit.slope:+.4f} (r^2={fit.r_squared:.3f})")
    if args.svg:
        from lab_harness.plots import plot_decoupling

        plot_decoupling(frame, fit, args.svg)
    return 0


def cmd_sweep(args, config: LabConfig) -> int:
    p = float(parse_exponent(args.p))
    if args.vertex:
        claim = vertex(args.vertex)
    elif args.alpha is not None and args.beta is not None:
        claim = make_point(parse_exponent(args.p), parse_exponent(args.alpha), parse_exponent(args.beta))
    else:
        claim = default_claim(p)
    report = run_sweep(args.family, p, args.R, args.n_rule, claim, seed=config.seed, config=config)
    if args.out:
        report.write_csv(args.out)
    else:
        print(report.to_frame().to_csv(index=False, float_format="%.12e"), end="")
    logger.info(json.dumps(report.summary(), default=float))
    if args.svg:
        from lab_harness.plots import plot_sweep

        plot_sweep(report, args.svg)
    return 1 if report.notes() else 0


def cmd_fit(args, config: LabConfig) -> int:
    frame = pd.read_csv(args.csv)
    missing = {args.x, *args.y} - set(frame.columns)
    if missing:
        raise ValueError(f"{args.csv} lacks columns {sorted(missing)}")
    document = {}
    for column in args.y:
        fit = fit_power_law(zip(frame[args.x], frame[column]), log_log=not args.linear)
        document[column] = fit.to_dict()
    _emit(document, args.out)
    return 0


def _add_profile_args(parser: argparse.ArgumentParser, with_file: bool = True) -> None:
    parser.add_argument("--family", choices=sorted(FAMILIES), default="f0")
    parser.add_argument("--R", type=float, required=True, help="Scale R (ball radius)")
    parser.add_argument("--N", type=int, default=None, help="Bump count parameter for bundle/star")
    parser.add_argument("--U", type=float, default=None, help="Bump width for 'many'")
    parser.add_argument("--M", type=int, default=None, help="Sample count (power of two)")
    if with_file:
        parser.add_argument("--profile", default=None, help="Profile JSON instead of a family")


def _add_global_args(parser: argparse.ArgumentParser, suppress: bool = False) -> None:
    """
    Flags accepted before or after the subcommand.

    The subcommand copies use SUPPRESS defaults so they only overwrite
    values given after the subcommand.
    """
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--config", default=default(None), help="JSON or YAML config file")
    parser.add_argument("--seed", type=int, default=default(None), help="Seed (falls back to WPL_SEED)")
    parser.add_argument("--out", default=default(None), help="Output path")
    parser.add_argument("--threads", type=int, default=default(None))
    parser.add_argument("--svg", default=default(None), help="Write a log-log figure here")
    parser.add_argument(
        "--log-level", default=default("INFO"), choices=["DEBUG", "INFO", "WARNING", "ERROR"]
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wpl", description="Wave packet and refined Strichartz lab")
    _add_global_args(parser)
    common = argparse.ArgumentParser(add_help=False)
    _add_global_args(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("example", parents=[common], help="Build an example profile")
    _add_profile_args(p, with_file=False)
    p.set_defaults(handler=cmd_example)

    p = sub.add_parser("extend", parents=[common], help="Evaluate Ef on a grid covering B_R and write a .fld file")
    _add_profile_args(p)
    p.add_argument("--nx", type=int, default=None)
    p.add_argument("--nt", type=int, default=None)
    p.add_argument("--margin", type=float, default=1.0)
    p.set_defaults(handler=cmd_extend)

    p = sub.add_parser("decompose", parents=[common], help="Wave packet decomposition as JSON")
    _add_profile_args(p)
    p.set_defaults(handler=cmd_decompose)

    p = sub.add_parser("norm", parents=[common], help="L^p(B_R) norms of a .fld field")
    p.add_argument("field")
    p.add_argument("--p", type=float, nargs="+", default=[2.0, 4.0, 6.0])
    p.add_argument("--R", type=float, default=None)
    p.set_defaults(handler=cmd_norm)

    p = sub.add_parser("polytope", parents=[common], help="Classify an exponent point")
    p.add_argument("--p", default=None, help="Exponent, fractions allowed (14/3)")
    p.add_argument("--alpha", default=None)
    p.add_argument("--beta", default=None)
    p.add_argument("--vertex", default=None, help="Named vertex X, U, V, Y, W or F")
    p.set_defaults(handler=cmd_polytope)

    p = sub.add_parser("partition", parents=[common], help="Polynomial partition of a weighted point cloud")
    p.add_argument("--points", required=True, help="CSV with columns x,t,w")
    p.add_argument("--D", type=int, required=True)
    p.set_defaults(handler=cmd_partition)

    p = sub.add_parser("decouple", parents=[common], help="Random-amplitude decoupling battery")
    p.add_argument("--delta-list", nargs="+", required=True, help="Deltas, fractions allowed (1/64)")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--law", choices=["phase", "gaussian"], default="phase")
    p.set_defaults(handler=cmd_decouple)

    p = sub.add_parser("sweep", parents=[common], help="R-sweep of one family against a claimed exponent point")
    p.add_argument("--family", choices=sorted(FAMILIES), required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--R", type=float, nargs="+", default=[256.0, 1024.0, 4096.0])
    p.add_argument("--n-rule", default="sqrt", help="sqrt, const:k or none")
    p.add_argument("--alpha", default=None)
    p.add_argument("--beta", default=None)
    p.add_argument("--vertex", default=None)
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("fit", parents=[common], help="Power-law fit of CSV columns")
    p.add_argument("csv")
    p.add_argument("--x", default="R")
    p.add_argument("--y", nargs="+", default=["lp_norm", "ratio"])
    p.add_argument("--linear", action="store_true")
    p.set_defaults(handler=cmd_fit)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT)
    try:
        config = load_config(args.config, seed=args.seed, threads=args.threads)
        return args.handler(args, config)
    except (ValueError, RuntimeError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
