"""Acceptance checks, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line (visible even
under pytest's output capture). Run directly with
``python tests/test_acceptance.py`` for the bare summary.
"""

import hashlib
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from hullclean import cli
from hullclean.core import FeatureSchema, ProblemInstance
from hullclean.explain import shapley_exact
from hullclean.predict import (
    GBTConfig,
    VoyageCostFunction,
    fit_gbt,
    fit_knn,
    fit_lasso,
    fit_ols,
    lasso_lambda_max,
    metrics,
)
from hullclean.reduce import equivalence_campaign
from hullclean.solve import (
    CallCounter,
    SolverRefusal,
    brute_force,
    check_monotonicity,
    dp_optimize,
    objective,
    savings_report,
)
from hullclean.synth import heavy_fouling_instance, random_instance, reference_instance

sys.path.insert(0, str(Path(__file__).parent))
from oracles import knn_oracle, reference_objective, shapley_oracle  # noqa: E402

GOLDEN_Z = (0, 1, 0, 0, 0)
GOLDEN_OBJECTIVE = Fraction(59807384651, 500000)


@pytest.fixture
def say(capsys):
    def emit(line):
        with capsys.disabled():
            print("\n" + line)
    return emit


def verdict(n, ok, detail, say):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})"
    say(line)
    assert ok, line


def test_criterion_1_oracle_equivalence(say):
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    agree = 0
    for _ in range(200):
        inst, f = random_instance(rng, int(rng.integers(2, 13)))
        a = dp_optimize(inst, f).objective
        b = brute_force(inst, f).objective
        agree += abs(a - b) <= 1e-9 * max(abs(a), abs(b))
    elapsed = time.perf_counter() - start
    verdict(1, agree == 200 and elapsed < 60, f"{agree}/200 agree in {elapsed:.1f} s", say)


def test_criterion_2_call_counts(say):
    bad = []
    for n in range(1, 13):
        inst, f = random_instance(np.random.default_rng(n), n, rows=(1, 2))
        bc, dc = CallCounter(), CallCounter()
        brute_force(inst, f, bc, cache=False)
        dp_optimize(inst, f, dc, cache=False)
        if bc.count != n * 2 ** n or dc.count != 2 * n + n * (n + 1) // 2:
            bad.append((n, bc.count, dc.count))
    verdict(2, not bad, "n in 1..12 exact" if not bad else f"mismatches {bad}", say)


def test_criterion_3_golden_instance(say):
    inst, f = reference_instance()
    bf = brute_force(inst, f)
    dp = dp_optimize(inst, f)
    ok = (
        bf.decisions == dp.decisions == GOLDEN_Z
        and abs(bf.objective - float(GOLDEN_OBJECTIVE)) <= 1e-9 * float(GOLDEN_OBJECTIVE)
        and abs(dp.objective - bf.objective) <= 1e-9 * bf.objective
        and reference_objective(GOLDEN_Z) == GOLDEN_OBJECTIVE
    )
    verdict(3, ok, f"z={dp.decisions} objective={dp.objective:.6f}", say)


def test_criterion_4_knapsack_reduction(say):
    start = time.perf_counter()
    rep = equivalence_campaign(50, (2, 10), seed=0)
    elapsed = time.perf_counter() - start
    ok = rep["agreements"] == 50 and rep["sentinel_check"] and elapsed < 10
    verdict(4, ok, f"{rep['agreements']}/50 agree in {elapsed:.2f} s", say)


class _Fn:
    def __init__(self, fn):
        self.fn = fn
        self.schema = FeatureSchema(("a", "b", "c"))

    def predict(self, X):
        return self.fn(np.atleast_2d(np.asarray(X, dtype=float)))


def test_criterion_5_shapley(say):
    rng = np.random.default_rng(5)
    f = lambda X: X[:, 0] * X[:, 1] + np.sin(X[:, 2]) * X[:, 0] + X[:, 2] ** 2  # noqa: E731
    g = lambda X: np.exp(0.3 * X[:, 1]) - 2.0 * X[:, 2] * X[:, 0]  # noqa: E731
    sym = lambda X: X[:, 0] * X[:, 1] + X[:, 0] + X[:, 1] + X[:, 2] ** 3  # noqa: E731
    dummy = lambda X: X[:, 0] ** 2 * np.cos(X[:, 1])  # noqa: E731
    bg = rng.normal(size=(10, 3))
    sym_bg = bg.copy()
    sym_bg[:, 1] = sym_bg[:, 0]
    F, G = _Fn(f), _Fn(g)
    oracle_err = efficiency = symmetry = dummy_err = linearity = 0.0
    for k in range(100):
        x = rng.normal(size=3)
        phi = shapley_exact(F, x, bg)
        if k < 10:
            ref = shapley_oracle(lambda v: float(f(np.array([v]))[0]), x.tolist(), bg.tolist())
            oracle_err = max(oracle_err, float(np.max(np.abs(phi.phi - ref))))
        efficiency = max(efficiency, abs(phi.efficiency_gap()))
        xs = x.copy()
        xs[1] = xs[0]
        ps = shapley_exact(_Fn(sym), xs, sym_bg).phi
        symmetry = max(symmetry, abs(ps[0] - ps[1]))
        dummy_err = max(dummy_err, abs(shapley_exact(_Fn(dummy), x, bg).phi[2]))
        both = shapley_exact(_Fn(lambda X: f(X) + 2.5 * g(X)), x, bg).phi
        linearity = max(linearity, float(np.max(np.abs(both - phi.phi - 2.5 * shapley_exact(G, x, bg).phi))))
    X = rng.normal(size=(200, 3))
    lin = fit_ols(X, X @ [1.5, -0.7, 3.0] + rng.normal(size=200))
    closed = max(
        float(np.max(np.abs(shapley_exact(lin, x, X[:50]).phi - lin.coef * (x - X[:50].mean(axis=0)))))
        for x in X[:100]
    )
    ok = oracle_err <= 1e-10 and max(efficiency, symmetry, dummy_err, linearity, closed) <= 1e-8
    detail = (f"oracle {oracle_err:.1e}, efficiency {efficiency:.1e}, symmetry {symmetry:.1e}, "
              f"dummy {dummy_err:.1e}, linearity {linearity:.1e}, closed form {closed:.1e}")
    verdict(5, ok, detail, say)


def test_criterion_6_regression(say):
    rng = np.random.default_rng(6)
    X = rng.normal(size=(100, 2))
    ols_err = float(np.max(np.abs(fit_ols(X, X @ [2.0, -3.0], intercept=False).coef - [2.0, -3.0])))

    Xl = rng.normal(size=(200, 3)) * [1, 5, 0.5]
    yl = Xl @ [3.0, -1.5, 4.0] + 7 + 0.5 * rng.normal(size=200)
    lasso_err = float(np.max(np.abs(fit_lasso(Xl, yl, 0.0).coef - fit_ols(Xl, yl).coef)))
    lam = lasso_lambda_max(Xl, yl)
    lasso_zero = bool(np.all(fit_lasso(Xl, yl, lam).coef == 0) and np.all(fit_lasso(Xl, yl, 3 * lam).coef == 0))

    Xk = rng.normal(size=(150, 3)) * [1, 20, 0.1]
    yk = rng.normal(size=150)
    Q = rng.normal(size=(1000, 3)) * [1, 20, 0.1]
    model = fit_knn(Xk, yk, K=5, p=2)
    mean, scale = Xk.mean(axis=0), Xk.std(axis=0)
    train = ((Xk - mean) / scale).tolist()
    pred = model.predict(Q)
    knn_ok = all(
        abs(pred[q] - knn_oracle(train, yk.tolist(), ((Q[q] - mean) / scale).tolist(), 5, 2)[0]) <= 1e-12
        for q in range(1000)
    )

    m = 6000
    Xg = np.column_stack([rng.uniform(0, 15, m), rng.uniform(7, 14, m), rng.uniform(0, 400, m)])
    yg = (Xg[:, 1] * Xg[:, 0] ** 2 + 0.5 * Xg[:, 2]) * (1 + 0.05 * rng.standard_normal(m))
    gbt = fit_gbt(Xg[:5000], yg[:5000], GBTConfig(n_trees=200, max_depth=5, learning_rate=0.1))
    r2 = metrics(yg[5000:], gbt.predict(Xg[5000:])).r2

    ok = ols_err <= 1e-6 and lasso_err <= 1e-4 and lasso_zero and knn_ok and r2 >= 0.95
    detail = (f"OLS {ols_err:.1e}, LASSO(0) {lasso_err:.1e}, LASSO(max) zero={lasso_zero}, "
              f"k-NN 1000/1000={knn_ok}, GBT R2 {r2:.4f}")
    verdict(6, ok, detail, say)


def test_criterion_7_monotonicity_gate(say):
    inst, f = reference_instance()
    good = check_monotonicity(f, inst, samples=1000, seed=0)
    adversary = check_monotonicity(lambda v, b: 5000.0 - 10.0 * b.dsddm, inst, samples=1000, seed=0)
    ok = good.passed and not adversary.passed and adversary.samples <= 1000
    verdict(7, ok, f"physics passed={good.passed}, adversary rejected after {adversary.samples} samples", say)


def test_criterion_8_desk_scale(tmp_path, say):
    root = Path(tmp_path)
    assert cli.main(["generate", "--seed", "8", "--n-voyages", "125", "--out", str(root)]) == 0
    cfg = cli.RunConfig.load(root / "config.json")
    cli.cmd_ingest(cfg, root / "out")
    bundle = cli.load_bundle(root / "out/bundle")
    model = fit_gbt(bundle.X, bundle.y,
                    GBTConfig(n_trees=100, max_depth=4, monotone=tuple(cfg.required_features)), bundle.schema)
    inst = ProblemInstance(np.full(len(bundle.voyages), 10_000.0), bundle.voyages, bundle.initial_fouling, 0.5)
    f = VoyageCostFunction(model, 0.5)
    start = time.perf_counter()
    counter = CallCounter()
    sched = dp_optimize(inst, f, counter)
    elapsed = time.perf_counter() - start
    try:
        brute_force(inst, f)
        refused = False
    except SolverRefusal:
        refused = True
    hours = sum(v.m for v in bundle.voyages)
    ok = elapsed <= 120 and refused and inst.n == 125
    detail = (f"{inst.n} voyages, {hours} rows, DP {elapsed:.1f} s with {counter.count} calls, "
              f"{sched.n_cleanings} cleanings, brute force refused={refused}")
    verdict(8, ok, detail, say)


def test_criterion_9_savings(say):
    inst, f = heavy_fouling_instance(seed=0, n=10)
    dp = dp_optimize(inst, f)
    bf = brute_force(inst, f)
    rep = savings_report(inst, f, dp)["Optimized"]
    budget = objective(inst, (0,) * inst.n, f).objective
    dear = ProblemInstance(np.full(inst.n, 2 * budget), inst.voyages, inst.initial_fouling, inst.fuel_price)
    none = dp_optimize(dear, f)
    ok = (abs(dp.objective - bf.objective) <= 1e-9 * bf.objective and rep["Δ Fuel (kg)"] > 0
          and rep["Δ Cost ($)"] > 0 and none.n_cleanings == 0)
    detail = (f"Δ Fuel {rep['Δ Fuel (%)']:.2f}%, Δ Cost {rep['Δ Cost (%)']:.2f}%, "
              f"cleanings {dp.n_cleanings} -> {none.n_cleanings} when c exceeds the fuel budget")
    verdict(9, ok, detail, say)


def _run_everything(root: Path) -> dict:
    fleet = root / "fleet"
    assert cli.main(["generate", "--seed", "3", "--n-voyages", "10", "--out", str(fleet)]) == 0
    cfg_path = fleet / "config.json"
    cfg = json.loads(cfg_path.read_text())
    cfg.update({"space": {"n_trees": 30, "max_depth": 3}, "n_configs": 1, "folds": 3, "explain_rows": 2,
                "background_size": 20, "monotonicity_samples": 200, "bootstrap_resamples": 200})
    cfg_path.write_text(json.dumps(cfg))
    for cmd in ("ingest", "train", "explain", "optimize"):
        assert cli.main([cmd, "--config", str(cfg_path)]) == 0
    assert cli.main(["generate", "--seed", "0", "--demo", "reference", "--out", str(root / "ref")]) == 0
    assert cli.main(["optimize", "--config", str(root / "ref/config.json")]) == 0
    assert cli.main(["reduce-check", "--instances", "20", "--out", str(root / "reduce")]) == 0
    return {
        str(p.relative_to(root)): hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(root.rglob("*")) if p.is_file() and p.suffix in (".json", ".csv")
    }


def test_criterion_10_determinism(tmp_path, say):
    root = Path(tmp_path)
    a = _run_everything(root / "a")
    b = _run_everything(root / "b")
    differing = sorted(k for k in a if a[k] != b.get(k))
    ok = a.keys() == b.keys() and not differing
    verdict(10, ok, f"{len(a)} artifacts identical" if ok else f"differ: {differing}", say)


if __name__ == "__main__":
    import tempfile

    failures = 0
    tests = [test_criterion_1_oracle_equivalence, test_criterion_2_call_counts, test_criterion_3_golden_instance,
             test_criterion_4_knapsack_reduction, test_criterion_5_shapley, test_criterion_6_regression,
             test_criterion_7_monotonicity_gate, test_criterion_8_desk_scale, test_criterion_9_savings,
             test_criterion_10_determinism]
    for test in tests:
        try:
            if "tmp_path" in test.__code__.co_varnames[:test.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as d:
                    test(Path(d), print)
            else:
                test(print)
        except AssertionError:
            failures += 1
    sys.exit(1 if failures else 0)
