"""Command-line surface for maps, sweeps, calibration, and rendering.

Subcommands: exact-map, ctmc-map, sweep, calibrate, tstar, render.
Worker count resolves as --workers > CLUSTERBIAS_WORKERS > config > 1.
Per-cell computational failures never abort a run; they land in the CSV
status column.  Exit status is 0 on success, 2 on usage errors, 1 otherwise.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .calibration import calibrate_T
from .config import parse_config
from .designs import Fixed, ShiftedPoisson
from .errors import ClusterBiasError, NotEligibleError
from .hazards import EpidemicParams
from .mapio import read_map_csv, render_heatmap_svg, write_map_csv
from .pair import direction_bias_condition, tstar_bound
from .simulate import FixedTime
from .sweep import run_ctmc_map, run_exact_map, run_mc_sweep

__all__ = ["main", "cli_dispatch"]

WORKERS_ENV = "CLUSTERBIAS_WORKERS"


def _add_common(parser, needs_config):
    parser.add_argument("--config", required=needs_config,
                        help="path to a key-value config file")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config master seed")
    parser.add_argument("--out", default="map",
                        help="output path prefix (default: map)")
    parser.add_argument("--workers", type=int, default=None,
                        help=f"worker processes (overrides ${WORKERS_ENV} and config)")
    parser.add_argument("--format", choices=("csv", "svg", "both"), default="csv",
                        help="artifact format (default: csv)")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="clusterbias",
        description="Exact and Monte Carlo risk-ratio maps for within-cluster "
                    "transmission studies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, desc in (
        ("exact-map", "two-person closed-form log-RR map"),
        ("ctmc-map", "exact log-RR map for general small clusters"),
        ("sweep", "Monte Carlo study sweep over the (beta, gamma) grid"),
    ):
        p = sub.add_parser(name, help=desc)
        _add_common(p, needs_config=True)

    p = sub.add_parser("calibrate", help="observation time for a target incidence")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--target", type=float, default=0.15)
    p.add_argument("--n", type=int, default=None, help="fixed cluster size")
    p.add_argument("--size-mu", type=float, default=None,
                   help="shifted-Poisson cluster-size mean")
    p.add_argument("--size-shift", type=int, default=1)

    p = sub.add_parser("tstar", help="direction-bias eligibility and reversal time")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)

    p = sub.add_parser("render", help="render a map CSV as a two-panel SVG")
    p.add_argument("--in", dest="input", required=True, help="map CSV path")
    p.add_argument("--out", default=None, help="SVG path (default: CSV path + .svg)")
    return parser


def _resolve_workers(args, spec):
    if args.workers is not None:
        return args.workers
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ClusterBiasError(
                f"${WORKERS_ENV} must be an integer, got {env!r}"
            ) from None
    return spec.workers


def _write_artifacts(result, args):
    csv_path = f"{args.out}.csv"
    svg_path = f"{args.out}.svg"
    if args.format in ("csv", "both"):
        write_map_csv(result, csv_path)
        print(f"wrote {csv_path}")
    if args.format in ("svg", "both"):
        render_heatmap_svg(result, svg_path)
        print(f"wrote {svg_path}")


def _run_map(args):
    spec = parse_config(args.config)
    if args.seed is not None:
        spec = replace(spec, seed=args.seed,
                       study=replace(spec.study, master_seed=args.seed))
    if args.command == "exact-map":
        result = run_exact_map(
            spec.grid, spec.alpha, spec.omega, t=spec.t,
            incidence_target=spec.target, z_threshold=spec.z_threshold,
        )
    elif args.command == "ctmc-map":
        result = run_ctmc_map(
            spec.grid, spec.scheme, spec.size_dist, spec.alpha, spec.omega,
            t=spec.t, incidence_target=spec.target, exclusion=spec.exclusion,
            baseline=spec.baseline, z_threshold=spec.z_threshold,
        )
    else:
        study = spec.study
        if spec.target is not None:
            t = calibrate_T(spec.target, spec.alpha, spec.omega, spec.size_dist)
            study = replace(study, observation_rule=FixedTime(t))
        result = run_mc_sweep(
            spec.grid, study, spec.replicates,
            workers=_resolve_workers(args, spec),
            exclusion=spec.exclusion, z_threshold=spec.z_threshold,
        )
    _write_artifacts(result, args)
    return 0


def _run_calibrate(args):
    if (args.n is None) == (args.size_mu is None):
        raise ClusterBiasError("give exactly one of --n and --size-mu")
    if args.n is not None:
        dist = Fixed(args.n)
    else:
        dist = ShiftedPoisson(args.size_mu, args.size_shift)
    t = calibrate_T(args.target, args.alpha, args.omega, dist)
    print(f"T = {t:.6g}")
    return 0


def _run_tstar(args):
    params = EpidemicParams(args.alpha, args.omega, args.beta, args.gamma)
    try:
        t_star = tstar_bound(params)
    except NotEligibleError:
        print("eligible = false")
        return 0
    print("eligible = true")
    print(f"t* = {t_star:.6g}")
    return 0


def _run_render(args):
    result = read_map_csv(args.input)
    out = args.out if args.out is not None else args.input + ".svg"
    render_heatmap_svg(result, out)
    print(f"wrote {out}")
    return 0


def cli_dispatch(argv):
    """Parse argv and run the selected subcommand; returns the exit status."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    try:
        if args.command in ("exact-map", "ctmc-map", "sweep"):
            return _run_map(args)
        if args.command == "calibrate":
            return _run_calibrate(args)
        if args.command == "tstar":
            return _run_tstar(args)
        return _run_render(args)
    except ClusterBiasError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None):
    return cli_dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
