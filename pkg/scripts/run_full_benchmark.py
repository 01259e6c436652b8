"""Run the full fixed-budget comparison and write all result tables.

Reproduces the complete protocol: the four preset optimizers on the
17-function suite at D in {30, 50}, budget 1000 evaluations, 100
repetitions per cell, all derived from one master seed. Results land
under --out as runs.csv, ert.csv, summary.csv, rse.csv, per-run trace
files, and per-cell mean/median normalized-fitness curves.

The full matrix is 4 x 17 x 2 x 100 = 13600 runs; expect roughly an
hour single-process. Use --workers to parallelize across processes,
or cut --reps / --dims / --functions for a smaller pass. Reruns are
incremental: finished runs found in runs.csv are skipped.

Usage:
    python3 scripts/run_full_benchmark.py --out results --workers 4
    python3 scripts/run_full_benchmark.py --dims 30 --reps 25 --functions shifted_sphere shifted_rastrigin
"""

import argparse
import time

from sqgde.harness import SUMMARY_COLUMNS, BenchmarkSpec, algorithm_preset, run_benchmark, summarize
from sqgde.testfuncs import default_suite, suite_by_label


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--dims", type=int, nargs="+", default=[30, 50])
    parser.add_argument("--reps", type=int, default=100)
    parser.add_argument("--budget", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=12345, help="master seed")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument(
        "--algos", nargs="+", default=["de", "de2", "sqg", "sqgde"], help="preset names"
    )
    parser.add_argument(
        "--functions", nargs="+", default=None, help="suite labels (default: all 17)"
    )
    return parser.parse_args()


def main() -> None:
    args = parse_args()
    if args.functions is None:
        functions = default_suite()
    else:
        by_label = suite_by_label()
        functions = [by_label[label] for label in args.functions]
    spec = BenchmarkSpec(
        algorithms=[algorithm_preset(name) for name in args.algos],
        functions=functions,
        dims=args.dims,
        budget=args.budget,
        reps=args.reps,
        master_seed=args.seed,
        output_dir=args.out,
    )
    n_cells = len(spec.algorithms) * len(spec.functions) * len(spec.dims)
    print(f"{n_cells} cells x {spec.reps} reps, budget {spec.budget}, master seed {spec.master_seed}")
    start = time.perf_counter()
    records = run_benchmark(spec, workers=args.workers, progress=True)
    print(f"{len(records)} runs in {time.perf_counter() - start:.0f}s")
    result = summarize(args.out)
    print(f"wrote {args.out}/ert.csv ({len(result.ert_rows)} rows) and {args.out}/summary.csv ({len(result.summary_rows)} rows)")
    print(",".join(SUMMARY_COLUMNS))
    for row in result.summary_rows:
        print(",".join(str(row[col]) for col in SUMMARY_COLUMNS))


if __name__ == "__main__":
    main()
