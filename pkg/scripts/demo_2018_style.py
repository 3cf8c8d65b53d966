#!/usr/bin/env python3
"""Build a reconstructed 2018-style poll series and render the report.

Two fictional pollsters track a 13-candidate first round through
September 2018-style dates.  Both agree candidates c9 and c5 lead; their
head-to-head scenarios diverge: pollsterA's runoff polls strongly favor
the trailing candidate c5, while pollsterB's keep the runoff nearly even
with a slight edge to c9.  The emitted tables and charts show how those
scenario differences flip the elected-candidate probabilities while the
runoff pair itself stays certain.

Usage:
    python scripts/demo_2018_style.py [--out DIR]
"""

import argparse
import sys
from pathlib import Path

from runoffprob.cli import main as cli_main

# minor-field shares held fixed across dates (sum 12)
FIELD = {"c12": 4, "c8": 2, "c1": 1.5, "c2": 1, "c7": 1, "c10": 1,
         "c4": 0.5, "c11": 0.5, "c13": 0.5}

ROWS = [
    # pollster, date, c9, c5, c3, c6, blank (first round)
    ("pollsterA", "2018-09-07", 30, 21, 12, 9, 8),
    ("pollsterA", "2018-09-14", 32, 22, 11, 8, 8),
    ("pollsterA", "2018-09-21", 34, 24, 10, 7, 8),
    ("pollsterA", "2018-09-28", 35, 25, 9, 6, 8),
    ("pollsterB", "2018-09-10", 31, 20, 12, 9, 8),
    ("pollsterB", "2018-09-18", 33, 23, 11, 8, 8),
    ("pollsterB", "2018-09-26", 35, 24, 10, 7, 8),
]

RUNOFFS = [
    # pollster, date, c5, c9, blank (c5 vs c9 scenario)
    ("pollsterA", "2018-09-07", 44, 43, 6),
    ("pollsterA", "2018-09-14", 46, 42, 6),
    ("pollsterA", "2018-09-21", 47, 42, 5),
    ("pollsterA", "2018-09-28", 48, 41, 5),
    ("pollsterB", "2018-09-10", 44, 44, 6),
    ("pollsterB", "2018-09-18", 44, 45, 6),
    ("pollsterB", "2018-09-26", 45, 45, 5),
]

SAMPLE_SIZE = 2828


def _kv(pcts: dict) -> str:
    undecided = 100.0 - sum(pcts.values())
    pcts = dict(pcts, undecided=round(undecided, 3))
    return " ".join(f"{k}={v:g}" for k, v in pcts.items())


def build_poll_file(path: Path) -> None:
    lines = ["# reconstructed late-September-2018-style series"]
    for pollster, date, c9, c5, c3, c6, blank in ROWS:
        pcts = {"c9": c9, "c5": c5, "c3": c3, "c6": c6, **FIELD, "blank": blank}
        lines.append(f"{pollster} {date} first - {SAMPLE_SIZE} {_kv(pcts)}")
    for pollster, date, c5, c9, blank in RUNOFFS:
        pcts = {"c5": c5, "c9": c9, "blank": blank}
        lines.append(f"{pollster} {date} second c5,c9 {SAMPLE_SIZE} {_kv(pcts)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def show(path: Path) -> None:
    print(f"--- {path.name} (last rows) ---")
    for line in path.read_text(encoding="utf-8").splitlines()[-6:]:
        print(" ", line)


def run(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("out/demo"))
    args = parser.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)

    polls = args.out / "polls.txt"
    store = args.out / "store.txt"
    build_poll_file(polls)
    if cli_main(["update", "--polls", str(polls), "--store", str(store)]) != 0:
        return 1
    if cli_main(["report", "--store", str(store), "--out", str(args.out), "--charts"]) != 0:
        return 1
    for pollster in ("pollsterA", "pollsterB"):
        show(args.out / f"{pollster}_top2.csv")
        show(args.out / f"{pollster}_elected.csv")
    print(f"\ntables and SVG charts written to {args.out}/")
    return 0


if __name__ == "__main__":
    sys.exit(run())
