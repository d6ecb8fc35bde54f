"""Time the full pipeline on a synthetic multi-year fleet.

Generates the fleet, ingests it, fits a monotone GBT on all rows, then
times the DP and confirms that brute force refuses the instance.
"""

import argparse
import tempfile
import time
from pathlib import Path

import numpy as np

from hullclean import cli
from hullclean.core import ProblemInstance
from hullclean.predict import GBTConfig, VoyageCostFunction, fit_gbt
from hullclean.solve import CallCounter, SolverRefusal, brute_force, check_monotonicity, dp_optimize, savings_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--voyages", type=int, default=125)
    ap.add_argument("--seed", type=int, default=8)
    ap.add_argument("--trees", type=int, default=100)
    ap.add_argument("--depth", type=int, default=4)
    ap.add_argument("--cleaning-cost", type=float, default=10_000.0)
    ap.add_argument("--fuel-price", type=float, default=0.5)
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        t = time.perf_counter()
        cli.main(["generate", "--seed", str(args.seed), "--n-voyages", str(args.voyages), "--out", str(root)])
        cfg = cli.RunConfig.load(root / "config.json")
        cli.cmd_ingest(cfg, root / "out")
        bundle = cli.load_bundle(root / "out/bundle")
        print(f"generate + ingest: {time.perf_counter() - t:.1f} s, {len(bundle.y)} rows")

    t = time.perf_counter()
    model = fit_gbt(bundle.X, bundle.y, GBTConfig(n_trees=args.trees, max_depth=args.depth,
                                                  monotone=tuple(cfg.required_features)), bundle.schema)
    print(f"GBT fit: {time.perf_counter() - t:.1f} s")

    n = len(bundle.voyages)
    inst = ProblemInstance(np.full(n, args.cleaning_cost), bundle.voyages, bundle.initial_fouling, args.fuel_price)
    f = VoyageCostFunction(model, args.fuel_price)
    cert = check_monotonicity(f, inst)
    print(f"monotonicity check: passed={cert.passed} after {cert.samples} samples")

    counter = CallCounter()
    t = time.perf_counter()
    sched = dp_optimize(inst, f, counter)
    dp_seconds = time.perf_counter() - t
    print(f"DP: {dp_seconds:.1f} s, {counter.count} cost calls (expected {2 * n + n * (n + 1) // 2})")
    rep = savings_report(inst, f, sched)["Optimized"]
    print(f"{rep['label']}: {rep['Number of cleanings']} cleanings, "
          f"fuel saving {rep['Δ Fuel (%)']:.2f}%, cost saving {rep['Δ Cost (%)']:.2f}%")
    try:
        brute_force(inst, f)
        print("brute force ran (unexpected)")
    except SolverRefusal as exc:
        print(f"brute force refused: {exc}")
    print(f"within two minutes: {dp_seconds <= 120}")


if __name__ == "__main__":
    main()
