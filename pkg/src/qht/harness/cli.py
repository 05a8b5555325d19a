"""Command-line entry point.

Subcommands:
  run            run one experiment family, write the result CSV
  check          slope-fit a result CSV and gate on the pass bands
  demo-dither    run the three dither-ablation families and summarize
  list-families  table of runnable families and their default grids

Exit codes: 0 success, 1 acceptance (check) failure, 2 usage or config
error. QHT_THREADS sets the worker count when --threads is absent; no
other environment variable is read.
"""
from __future__ import annotations

import argparse
import os
import sys

from .configfile import ConfigError, load_spec, parse_grid, spec_from_dict
from .families import FAMILIES, default_spec
from .runner import run_experiment, write_csv, read_csv
from .slopes import DEFAULT_BAND, check_rows, group_means


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("QHT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"QHT_THREADS must be an integer, got {env!r}") from exc
    return 1


def _parse_constants(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ConfigError(f"--constants needs k=v, got {pair!r}")
        key, _, val = pair.partition("=")
        try:
            out[key.strip()] = float(val)
        except ValueError as exc:
            raise ConfigError(f"constant {key.strip()!r} must be numeric, got {val!r}") from exc
    return out


def _cmd_run(args) -> int:
    if args.spec and args.family:
        raise ConfigError("give either --spec or --family, not both")
    if args.spec:
        spec = load_spec(args.spec)
    elif args.family:
        spec = default_spec(args.family) if args.family in FAMILIES else None
        if spec is None:
            raise ConfigError(f"unknown family {args.family!r}; see list-families")
    else:
        raise ConfigError("run needs --spec FILE or --family NAME")
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.n_grid is not None:
        if "," in args.n_grid:
            overrides["n_grid"] = parse_grid([v.strip() for v in args.n_grid.split(",")])
        else:
            overrides["n_grid"] = parse_grid(args.n_grid)
    if args.delta_grid is not None:
        overrides["delta_grid"] = tuple(float(v) for v in args.delta_grid.split(","))
    constants = dict(spec.constants)
    constants.update(_parse_constants(args.constants))
    if constants:
        overrides["constants"] = constants
    if overrides:
        exp = {
            "family": spec.family,
            "seed": spec.seed,
            "trials": spec.trials,
            "n_grid": list(spec.n_grid),
            "delta_grid": list(spec.delta_grid),
            "dims": dict(spec.dims),
            "constants": dict(spec.constants),
        }
        exp.update({k: (list(v) if isinstance(v, tuple) else v) for k, v in overrides.items()})
        spec = spec_from_dict(exp)
    rows = run_experiment(spec, threads=_threads(args), record_timing=not args.no_timing)
    write_csv(rows, args.out)
    print(f"{spec.family}: wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_check(args) -> int:
    rows = read_csv(args.csv)
    band = tuple(args.band) if args.band else DEFAULT_BAND
    if band[0] > band[1]:
        raise ConfigError(f"--band LO must not exceed HI, got {band[0]} > {band[1]}")
    reports, fr, ok = check_rows(rows, band=band, max_fail_rate=args.max_fail_rate)
    if not reports:
        print("no rate-gated metrics found in the CSV; nothing to check")
    for rep in reports:
        status = "pass" if rep.passed else "FAIL"
        print(
            f"{status}  {rep.family:24s} {rep.metric:24s} d={rep.d:<5d} s_or_r={rep.s_or_r:<3d} "
            f"delta={rep.delta:<6g} slope={rep.slope:+.3f} r2={rep.r2:.3f} ({rep.n_points} n values)"
        )
    print(f"solver failure rate: {fr:.2%} (cap {args.max_fail_rate:.0%})")
    if not ok:
        print("check: FAIL")
        return 1
    print("check: ok")
    return 0


def _cmd_demo_dither(args) -> int:
    all_rows = []
    overrides = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["seed"] = args.seed
    for fam in ("dither-ablation-cov", "dither-ablation-qcs", "dither-ablation-qmc"):
        spec = default_spec(fam, **overrides)
        rows = run_experiment(spec, threads=_threads(args), record_timing=not args.no_timing)
        all_rows.extend(rows)
        means = group_means(rows)
        n_max = max(spec.n_grid)
        print(f"{fam} at n={n_max}:")
        for (family, metric, d, s_or_r, delta), by_n in sorted(means.items()):
            print(f"  {metric:28s} mean error {by_n[n_max]:.4g}")
    write_csv(all_rows, args.out)
    print(f"wrote {len(all_rows)} rows to {args.out}")
    return 0


def _cmd_list_families(_args) -> int:
    for name in sorted(FAMILIES):
        fam = FAMILIES[name]
        grid = f"{fam.default_n_grid[0]}..{fam.default_n_grid[-1]}"
        deltas = ",".join(f"{d:g}" for d in fam.default_delta_grid)
        dims = ",".join(f"{k}={v}" for k, v in fam.default_dims.items())
        print(f"{name:24s} n={grid:13s} delta=[{deltas}] {dims:12s} trials={fam.default_trials}")
        print(f"{'':24s} {fam.description}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qht", description="Quantized heavy-tailed estimation experiments")
    sub = p.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run one experiment family, write CSV")
    runp.add_argument("--spec", help="TOML spec file")
    runp.add_argument("--family", help="family name with default grids")
    runp.add_argument("--out", default="results.csv", help="output CSV path")
    runp.add_argument("--seed", type=int)
    runp.add_argument("--trials", type=int)
    runp.add_argument("--n-grid", help='override n grid, "start:step:stop" or comma list')
    runp.add_argument("--delta-grid", help="override delta grid, comma list")
    runp.add_argument("--threads", type=int)
    runp.add_argument("--constants", action="append", metavar="K=V", help="tuning-constant override (repeatable)")
    runp.add_argument("--no-timing", action="store_true", help="write 0.0 wallclocks (byte-reproducible CSV)")
    runp.set_defaults(fn=_cmd_run)

    checkp = sub.add_parser("check", help="slope-check a result CSV")
    checkp.add_argument("csv")
    checkp.add_argument(
        "--band",
        nargs=2,
        type=float,
        metavar=("LO", "HI"),
        help="slope pass band, e.g. --band -0.7 -0.3 (the default)",
    )
    checkp.add_argument("--max-fail-rate", type=float, default=0.05)
    checkp.set_defaults(fn=_cmd_check)

    demop = sub.add_parser("demo-dither", help="run the dither ablations and summarize")
    demop.add_argument("--out", default="dither_ablation.csv")
    demop.add_argument("--trials", type=int, help="override trial count (defaults per family)")
    demop.add_argument("--seed", type=int)
    demop.add_argument("--threads", type=int)
    demop.add_argument("--no-timing", action="store_true")
    demop.set_defaults(fn=_cmd_demo_dither)

    listp = sub.add_parser("list-families", help="list runnable families")
    listp.set_defaults(fn=_cmd_list_families)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
