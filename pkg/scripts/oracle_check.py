#!/usr/bin/env python3
"""Cross-check every quadrature kernel of a store against Monte Carlo.

Builds the demo series if no store is given, then runs the `oracle`
subcommand per pollster and prints where the comparison tables landed.
A non-zero exit means some kernel disagreed with simulation by more than
four standard errors.

Usage:
    python scripts/oracle_check.py [--store FILE] [--out DIR] [--draws N]
"""

import argparse
import sys
from pathlib import Path

from runoffprob import load_store
from runoffprob.cli import main as cli_main


def run(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--store", type=Path, default=None)
    parser.add_argument("--out", type=Path, default=Path("out/oracle"))
    parser.add_argument("--draws", type=int, default=200_000)
    parser.add_argument("--seed", type=int, default=20181007)
    args = parser.parse_args(argv)

    store = args.store
    if store is None:
        from demo_2018_style import build_poll_file

        args.out.mkdir(parents=True, exist_ok=True)
        polls = args.out / "polls.txt"
        store = args.out / "store.txt"
        build_poll_file(polls)
        if cli_main(["update", "--polls", str(polls), "--store", str(store)]) != 0:
            return 1

    worst = 0
    for pollster in sorted({e.pollster for e in load_store(store)}):
        code = cli_main([
            "oracle", "--store", str(store), "--pollster", pollster,
            "--out", str(args.out), "--seed", str(args.seed), "--draws", str(args.draws),
        ])
        worst = max(worst, code)
        print(f"{pollster}: table at {args.out}/{pollster}_oracle.csv (exit {code})")
    return worst


if __name__ == "__main__":
    sys.path.insert(0, str(Path(__file__).parent))
    sys.exit(run())
