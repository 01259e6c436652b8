"""Compare the four preset optimizers on three headline functions.

Runs shifted sphere, shifted rastrigin and shifted rotated rastrigin at
D = 30 under the standard protocol (population 100, budget 1000, 100
repetitions) and prints per-algorithm expected running time against the
random-search-equivalent target plus the median final fitness. Takes
about a minute single-process.

Usage:
    python3 scripts/quick_comparison.py
    python3 scripts/quick_comparison.py --reps 25 --seed 9
"""

import argparse

import numpy as np

from sqgde.core import derive_seed
from sqgde.harness import ALGORITHM_PRESETS, execute_run
from sqgde.metrics import estimate_rse_target, expected_running_time
from sqgde.testfuncs import make_test_function, suite_by_label

FUNCTIONS = ("shifted_sphere", "shifted_rastrigin", "shifted_rotated_rastrigin")
DIM = 30
BUDGET = 1000


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--reps", type=int, default=100)
    parser.add_argument("--seed", type=int, default=12345, help="master seed")
    args = parser.parse_args()

    suite = suite_by_label()
    for label in FUNCTIONS:
        fn = make_test_function(suite[label], dim=DIM)
        target = estimate_rse_target(
            fn, BUDGET, args.reps, derive_seed(args.seed, "rse", label, DIM)
        )
        print(f"{label} (D={DIM}, target {target.value:.6g}):")
        for name, algo in ALGORITHM_PRESETS.items():
            traces = [
                execute_run(algo, fn, BUDGET, derive_seed(args.seed, "run", name, label, DIM, rep))
                for rep in range(args.reps)
            ]
            ert = expected_running_time(traces, target.value, BUDGET)
            fmt = ">" if ert.lower_bound else " "
            median = float(np.median([tr.final_best for tr in traces]))
            print(
                f"  {name:6s} ert {fmt}{ert.value:10.1f}  success {ert.success_rate:5.2f}"
                f"  median final {median:12.6g}"
            )


if __name__ == "__main__":
    main()
