#!/usr/bin/env python3
"""Run every bundled experiment preset and collect the outputs under one
directory.  Equivalent to calling ``sirp-radar --preset figN`` ten times;
use --trials to cut the Monte Carlo depth for a quick smoke pass.
"""

import argparse
import sys
import time

from sirp_radar.cli import PRESETS, main as run_cli


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="results", help="output directory (default: results)")
    parser.add_argument("--seed", type=int, default=0, help="base RNG seed shared by all presets")
    parser.add_argument("--trials", type=int, default=None,
                        help="override Monte Carlo trials per grid point (sweep presets only)")
    parser.add_argument("--workers", type=int, default=1,
                        help="worker processes for the estimator sweeps")
    parser.add_argument("--only", nargs="*", metavar="PRESET",
                        help="subset of presets to run (default: all)")
    return parser.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    names = args.only if args.only else sorted(PRESETS, key=lambda p: int(p.removeprefix("fig")))
    unknown = [name for name in names if name not in PRESETS]
    if unknown:
        print(f"unknown presets: {', '.join(unknown)}", file=sys.stderr)
        return 2
    for name in names:
        cli_argv = ["--outdir", args.outdir, "--seed", str(args.seed), "--preset", name]
        if args.trials is not None:
            cli_argv += ["--trials", str(args.trials)]
        if args.workers != 1:
            cli_argv += ["--workers", str(args.workers)]
        started = time.perf_counter()
        code = run_cli(cli_argv)
        if code != 0:
            print(f"{name}: failed with exit code {code}", file=sys.stderr)
            return code
        print(f"{name}: done in {time.perf_counter() - started:.1f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
