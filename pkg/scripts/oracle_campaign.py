"""DP versus brute force on seeded random instances, plus the knapsack-reduction campaign.

Writes a JSON summary with per-size agreement counts and timings.
"""

import argparse
import json
import time
from collections import defaultdict

import numpy as np

from hullclean.reduce import equivalence_campaign
from hullclean.solve import CallCounter, brute_force, dp_optimize
from hullclean.synth import random_instance


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=200)
    ap.add_argument("--min-n", type=int, default=2)
    ap.add_argument("--max-n", type=int, default=12)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--out", help="write the summary JSON here")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    by_n = defaultdict(lambda: {"instances": 0, "agree": 0, "dp_calls": 0, "brute_calls": 0})
    worst = 0.0
    t0 = time.perf_counter()
    for _ in range(args.instances):
        n = int(rng.integers(args.min_n, args.max_n + 1))
        inst, f = random_instance(rng, n)
        dc, bc = CallCounter(), CallCounter()
        a = dp_optimize(inst, f, dc).objective
        b = brute_force(inst, f, bc).objective
        rel = abs(a - b) / max(abs(b), 1.0)
        worst = max(worst, rel)
        row = by_n[n]
        row["instances"] += 1
        row["agree"] += rel <= 1e-9
        row["dp_calls"], row["brute_calls"] = dc.count, bc.count
    elapsed = time.perf_counter() - t0
    t1 = time.perf_counter()
    knapsack = equivalence_campaign(50, (2, 10), seed=0)
    summary = {
        "solver_campaign": {
            "seed": args.seed,
            "instances": args.instances,
            "agree": sum(r["agree"] for r in by_n.values()),
            "worst_relative_gap": worst,
            "seconds": round(elapsed, 2),
            "by_n": {str(n): by_n[n] for n in sorted(by_n)},
        },
        "knapsack_campaign": {**knapsack, "seconds": round(time.perf_counter() - t1, 3)},
    }
    text = json.dumps(summary, indent=1)
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")


if __name__ == "__main__":
    main()
