#!/usr/bin/env python3
"""Reproduce the full nine-setting error table (3 scenarios x 3 sizes).

Writes one combined CSV with a row per (scenario, n, method). The full run
with 100 replicates takes a while at n = 500; use --reps to trim or --sizes
to restrict while iterating.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from wstrank import SimConfig, run_study
from wstrank.simulation import SCENARIOS, STUDY_CSV_COLUMNS


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="study_table.csv")
    parser.add_argument("--reps", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--k", type=int, default=3)
    parser.add_argument("--threads", type=int, default=4)
    parser.add_argument(
        "--sizes", default="100,200,500", help="comma-separated player counts"
    )
    parser.add_argument(
        "--scenarios", default=",".join(SCENARIOS), help="comma-separated scenario names"
    )
    args = parser.parse_args()

    sizes = [int(x) for x in args.sizes.split(",") if x]
    scenarios = [s.strip() for s in args.scenarios.split(",") if s.strip()]

    lines = [",".join(STUDY_CSV_COLUMNS)]
    for scenario in scenarios:
        for n in sizes:
            config = SimConfig(
                scenario=scenario, n=n, replicates=args.reps, seed=args.seed
            )
            start = time.perf_counter()
            result = run_study(config, threads=args.threads)
            elapsed = time.perf_counter() - start
            lines.append(result.to_csv(header=False).rstrip("\n"))
            summary = " ".join(
                f"{s.method}={100 * s.mean_error_pairs:.2f}" for s in result.stats
            )
            print(f"{scenario} n={n}: {summary}  ({elapsed:.0f}s)", file=sys.stderr)
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
