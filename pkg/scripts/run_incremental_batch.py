#!/usr/bin/env python3
"""Sweep random games and measure how often template merging conflicts.

For each objective target size, the harness draws seeded random games,
keeps adding fresh objectives to each game, and records the fraction of
instances whose merged template becomes conflicted at every step. The
result is a CSV heatmap with one row per (target size, objectives added)
cell, suitable for plotting.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from congame import heatmap_csv, run_heatmap


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--games", type=int, default=200,
                        help="random games per heatmap cell (default 200)")
    parser.add_argument("--sizes", type=int, nargs="+", default=[1, 2, 3],
                        help="objective target sizes to sweep (default 1 2 3)")
    parser.add_argument("--max-objectives", type=int, default=4,
                        help="objectives merged per game (default 4)")
    parser.add_argument("--seed", type=int, default=0,
                        help="base seed for the game stream (default 0)")
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker processes (default 1)")
    parser.add_argument("-o", "--output", type=Path, default=None,
                        help="write the CSV here instead of stdout")
    args = parser.parse_args(argv)

    rows = run_heatmap(games=args.games, sizes=tuple(args.sizes),
                       max_objectives=args.max_objectives,
                       seed=args.seed, jobs=args.jobs)
    text = heatmap_csv(rows)
    if args.output is not None:
        args.output.write_text(text, encoding="utf-8")
        print(f"wrote {len(rows)} rows to {args.output}")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
