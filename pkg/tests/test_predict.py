import math
import statistics
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hullclean.core import FeatureSchema, FoulingVector, VoyageProfile
from hullclean.predict import (
    BONFERRONI_ALPHA,
    GBTConfig,
    LassoConvergenceError,
    SchemaMismatchError,
    SingularDesignError,
    VoyageCostFunction,
    bootstrap_ci,
    fit_gbt,
    fit_knn,
    fit_lasso,
    fit_model,
    fit_ols,
    forward_stepwise_select,
    lasso_lambda_max,
    load_model,
    metrics,
    parse_space,
    random_search,
    save_model,
    synthetic_physics_predictor,
    voyage_cost,
)
from hullclean.predict.base import Standardizer
from hullclean.predict.selection import sample_configs
from hullclean.synth import reference_instance
from oracles import knn_oracle, reference_voyage_kg


def linear_data(m=200, seed=0, noise=0.0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(m, 3)) * [1.0, 5.0, 0.5] + [0, 10, -2]
    y = X @ np.array([3.0, -1.5, 4.0]) + 7.0 + noise * rng.normal(size=m)
    return X, y


def physics_data(m, seed, noise=0.05):
    rng = np.random.default_rng(seed)
    X = np.column_stack([rng.uniform(0, 15, m), rng.uniform(7, 14, m), rng.uniform(0, 400, m)])
    clean = X[:, 1] * X[:, 0] ** 2 + 0.5 * X[:, 2]
    return X, clean * (1 + noise * rng.standard_normal(m))


# ---- OLS -------------------------------------------------------------------------

def test_ols_recovers_planted_coefficients():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(50, 2))
    y = X @ np.array([2.0, -3.0])
    model = fit_ols(X, y, intercept=False)
    np.testing.assert_allclose(model.coef, [2.0, -3.0], atol=1e-6)


def test_ols_identity_design():
    y = np.array([3.0, -1.0, 2.5, 7.0])
    model = fit_ols(np.eye(4), y, intercept=False)
    np.testing.assert_allclose(model.coef, y, atol=1e-12)


def test_ols_singular_design_names_tolerance():
    X = np.column_stack([np.ones(10), np.arange(10.0)])
    with pytest.raises(SingularDesignError, match="rcond"):
        fit_ols(X, np.arange(10.0))
    with pytest.raises(SingularDesignError):
        fit_ols(np.ones((2, 3)), np.ones(2))


@given(st.integers(0, 10_000))
def test_ols_residual_orthogonality(seed):
    X, y = linear_data(60, seed, noise=2.0)
    model = fit_ols(X, y)
    A = np.column_stack([X, np.ones(len(y))])
    r = y - model.predict(X)
    assert np.max(np.abs(A.T @ r)) / np.max(np.abs(A.T @ y)) < 1e-8
    assert metrics(y, model.predict(X)).r2 >= metrics(y, np.full(len(y), y.mean())).r2


# ---- LASSO -----------------------------------------------------------------------

def test_lasso_zero_penalty_matches_ols():
    X, y = linear_data(noise=0.5)
    ols = fit_ols(X, y)
    lasso = fit_lasso(X, y, 0.0)
    np.testing.assert_allclose(lasso.coef, ols.coef, atol=1e-4)
    assert lasso.intercept == pytest.approx(ols.intercept, abs=1e-4)


def test_lasso_lambda_max_zeroes_everything():
    X, y = linear_data(noise=0.5)
    lam = lasso_lambda_max(X, y)
    assert np.all(fit_lasso(X, y, lam).coef == 0)
    assert np.all(fit_lasso(X, y, 2 * lam).coef == 0)
    assert np.any(fit_lasso(X, y, 0.99 * lam).coef != 0)


def test_lasso_lambda_max_closed_form():
    X, y = linear_data(noise=0.5)
    Z = (X - X.mean(0)) / X.std(0)
    assert lasso_lambda_max(X, y) == pytest.approx(np.max(np.abs(Z.T @ y)) / len(y), rel=1e-12)


def test_lasso_l1_norm_shrinks_with_lambda():
    X, y = linear_data(noise=1.0)
    y = 3 * y
    scale = Standardizer.fit(X).scale
    norms = [float(np.sum(np.abs(fit_lasso(X, y, lam).coef * scale))) for lam in np.arange(0.1, 5.01, 0.1)]
    assert all(b <= a + 1e-9 for a, b in zip(norms, norms[1:]))
    assert norms[-1] < norms[0]


def test_lasso_objective_non_increasing():
    X, y = linear_data(noise=1.0)
    h = fit_lasso(X, y, 0.3).objective_history
    assert len(h) >= 2
    assert all(b <= a + 1e-12 for a, b in zip(h, h[1:]))


def test_lasso_non_convergence_carries_iterate():
    X, y = linear_data(noise=1.0)
    X = np.column_stack([X, X[:, 0] + 1e-3 * np.random.default_rng(0).normal(size=len(y))])
    with pytest.raises(LassoConvergenceError) as info:
        fit_lasso(X, y, 1e-4, tol=1e-14, max_sweeps=2)
    assert info.value.coef.shape == (4,)
    with pytest.raises(ValueError):
        fit_lasso(X, y, -1.0)


# ---- k-NN ------------------------------------------------------------------------

def test_knn_exact_match_and_global_mean():
    X, y = linear_data(30, seed=4)
    assert fit_knn(X, y, K=1).predict(X[7:8])[0] == y[7]
    assert fit_knn(X, y, K=30).predict(X[:3]) == pytest.approx([y.mean()] * 3)
    assert np.all(fit_knn(X, y, K=1).predict(X) == y)


def test_knn_five_points_k3():
    X = np.array([[0.0], [1.0], [2.5], [4.0], [9.0]])
    y = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    model = fit_knn(X, y, K=3)
    expected, _ = knn_oracle(X[:, 0:1].tolist(), y.tolist(), [2.0], 3, 2)
    assert model.predict([[2.0]])[0] == pytest.approx(expected)
    assert expected == pytest.approx((2 + 3 + 1) / 3)


@pytest.mark.parametrize("p", [1, 2])
def test_knn_matches_oracle_on_1000_queries(p):
    rng = np.random.default_rng(10 + p)
    X = rng.normal(size=(150, 3)) * [1.0, 20.0, 0.1]
    y = rng.normal(size=150)
    queries = rng.normal(size=(1000, 3)) * [1.0, 20.0, 0.1]
    mean = [statistics.fmean(col) for col in X.T.tolist()]
    scale = [statistics.pstdev(col) for col in X.T.tolist()]
    scaled = lambda row: [(v - m) / s for v, m, s in zip(row, mean, scale)]  # noqa: E731
    train = [scaled(r) for r in X.tolist()]
    model = fit_knn(X, y, K=5, p=p)
    got = model.predict(queries)
    idx = model.neighbors(queries)
    for q in range(1000):
        expected, chosen = knn_oracle(train, y.tolist(), scaled(queries[q].tolist()), 5, p)
        assert sorted(idx[q].tolist()) == sorted(chosen)
        assert got[q] == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_knn_errors():
    X, y = linear_data(5)
    with pytest.raises(ValueError):
        fit_knn(X, y, K=6)
    with pytest.raises(ValueError):
        fit_knn(X, y, K=2, p=3)


def test_knn_tie_goes_to_lower_index():
    X = np.array([[-1.0], [1.0], [3.0]])
    y = np.array([10.0, 20.0, 30.0])
    assert fit_knn(X, y, K=1).predict([[0.0]])[0] == 10.0


# ---- gradient boosting -----------------------------------------------------------

def test_gbt_zero_trees_predicts_mean():
    X, y = linear_data(40)
    model = fit_gbt(X, y, GBTConfig(n_trees=0))
    assert np.all(model.predict(X) == y.mean())


def test_gbt_stump_finds_step():
    x = np.linspace(0, 10, 1000)
    y = np.where(x > 6.3, 5.0, 1.0)
    model = fit_gbt(x[:, None], y, GBTConfig(n_trees=1, max_depth=1, learning_rate=1.0, min_leaf=1))
    tree = model.trees[0]
    assert tree.feature[0] == 0
    # candidate thresholds are 32 quantiles of x, so one bin is 10/33 wide
    assert abs(tree.threshold[0] - 6.3) <= 10 / 33
    assert tree.depth == 1


@pytest.mark.parametrize("seed", range(10))
def test_gbt_training_rmse_non_increasing(seed):
    X, y = physics_data(400, seed)
    model = fit_gbt(X, y, GBTConfig(n_trees=40, max_depth=3, seed=seed), track_rmse=True)
    r = model.train_rmse
    assert all(b <= a + 1e-9 for a, b in zip(r, r[1:]))


def test_gbt_r2_on_noisy_physics():
    X, y = physics_data(6000, 0)
    model = fit_gbt(X[:5000], y[:5000], GBTConfig(n_trees=200, max_depth=5, learning_rate=0.1))
    assert metrics(y[5000:], model.predict(X[5000:])).r2 >= 0.95


def test_gbt_monotone_constraint():
    X, y = physics_data(2000, 3, noise=0.3)
    schema = FeatureSchema(("stw", "load", "dsddm"))
    model = fit_gbt(X, y, GBTConfig(n_trees=60, max_depth=4, monotone=("dsddm",)), schema)
    rng = np.random.default_rng(0)
    for _ in range(50):
        row = np.tile(X[rng.integers(len(X))], (41, 1))
        row[:, 2] = np.linspace(0, 400, 41)
        assert np.all(np.diff(model.predict(row)) >= -1e-9)


def test_gbt_config_validation():
    with pytest.raises(ValueError):
        GBTConfig(learning_rate=0)
    with pytest.raises(ValueError):
        fit_gbt(np.zeros((0, 2)), np.zeros(0))


# ---- physics oracle and cost -----------------------------------------------------

def physics_row(stw, load, b):
    return np.array([[stw, load, b]])


def test_physics_examples():
    g = synthetic_physics_predictor({"drag_coeff": 1.0, "fouling_coeff": 36.0})
    assert g.predict(physics_row(10, 10, 0))[0] == 1000.0
    assert g.predict(physics_row(10, 10, 100))[0] == 4600.0
    assert g.predict(physics_row(20, 10, 0))[0] == 4 * g.predict(physics_row(10, 10, 0))[0]
    with pytest.raises(ValueError):
        synthetic_physics_predictor({"fouling_coeff": -1.0})


def test_reference_voyage_cost_matches_row_sum_oracle():
    inst, f = reference_instance()
    expected = float(reference_voyage_kg(0, 0) * Fraction("0.493"))
    assert voyage_cost(f, inst.voyages[0], FoulingVector()) == pytest.approx(expected, rel=1e-13)
    with_b = float(reference_voyage_kg(2, 150) * Fraction("0.493"))
    assert f(inst.voyages[2], FoulingVector.scalar(150)) == pytest.approx(with_b, rel=1e-13)


def test_truncated_rows_flag():
    inst, f = reference_instance()
    g = VoyageCostFunction(f.predictor, 0.493, truncate_rows=5)
    expected = float(reference_voyage_kg(1, 100, rows=5) * Fraction("0.493"))
    assert g(inst.voyages[1], 100.0) == pytest.approx(expected, rel=1e-13)


def test_cost_independent_of_b_without_fouling_effect():
    inst, _ = reference_instance()
    g = synthetic_physics_predictor({"fouling_coeff": 0.0})
    f = VoyageCostFunction(g, 0.493)
    v = inst.voyages[0]
    assert f(v, FoulingVector()) == f(v, FoulingVector(500, 3, 2, 1, 0, 9, 9))


def test_cost_additive_over_rows():
    inst, f = reference_instance()
    v = inst.voyages[3]
    halves = [VoyageProfile(1, v.rows[:5], v.columns, v.fouling_increment),
              VoyageProfile(2, v.rows[5:], v.columns, v.fouling_increment)]
    b = FoulingVector.scalar(42)
    assert f(v, b) == pytest.approx(f(halves[0], b) + f(halves[1], b), rel=1e-14)
    assert f(v, b) == f(v, b)


def test_cost_overhead_and_schema_mismatch():
    inst, f = reference_instance()
    g = VoyageCostFunction(f.predictor, 0.493, overhead=100.0)
    assert g(inst.voyages[0], 0.0) == pytest.approx(f(inst.voyages[0], 0.0) + 100.0)
    other = VoyageProfile(1, np.ones((2, 2)), ("stw", "dsddm"), FoulingVector())
    with pytest.raises(SchemaMismatchError):
        f(other, 0.0)


# ---- serialization -----------------------------------------------------------------

@pytest.mark.parametrize("kind,config", [("OLS", {}), ("LASSO", {"lambda": 0.1}), ("KNN", {"K": 3}),
                                         ("GBT", {"n_trees": 20, "subsample": 0.8})])
def test_model_round_trip_bit_stable(tmp_path, kind, config):
    X, y = physics_data(300, 1)
    model = fit_model(kind, X, y, config, FeatureSchema(("stw", "load", "dsddm")))
    save_model(model, tmp_path / "m.json")
    loaded = load_model(tmp_path / "m.json")
    assert loaded.schema == model.schema
    assert loaded.predict(X).tobytes() == model.predict(X).tobytes()


def test_physics_round_trip(tmp_path):
    g = synthetic_physics_predictor({"drag_coeff": 2.0, "fouling_coeff": 3.0})
    save_model(g, tmp_path / "g.json")
    assert load_model(tmp_path / "g.json").predict(physics_row(5, 6, 7))[0] == g.predict(physics_row(5, 6, 7))[0]


# ---- metrics ----------------------------------------------------------------------

def test_metrics_examples():
    y = np.array([1.0, 4.0, 2.0])
    r = metrics(y, y)
    assert (r.rmse, r.mae, r.r2) == (0.0, 0.0, 1.0)
    r = metrics([0.0, 0.0], [3.0, 4.0], strict=False)
    assert r.rmse == pytest.approx(math.sqrt(12.5)) and r.mae == 3.5 and math.isnan(r.r2)
    assert metrics(y, np.full(3, y.mean())).r2 == 0.0


def test_metrics_errors():
    with pytest.raises(ValueError):
        metrics([1.0, 2.0], [1.0])
    with pytest.raises(ValueError):
        metrics([], [])
    with pytest.raises(ValueError):
        metrics([0.0, 0.0], [3.0, 4.0])


def test_bootstrap_perfect_predictions():
    y = np.arange(20.0)
    ci = bootstrap_ci(y, y, n_resamples=500, seed=0)
    assert ci["rmse"] == (0.0, 0.0, 0.0)
    assert ci["mae"] == (0.0, 0.0, 0.0)


def test_bootstrap_default_alpha():
    assert BONFERRONI_ALPHA == 0.05 / 36
    assert bootstrap_ci.__defaults__[1] == 0.05 / 36


def test_bootstrap_deterministic_and_ordered():
    X, y = linear_data(100, noise=3.0)
    pred = fit_ols(X, y).predict(X)
    a = bootstrap_ci(y, pred, 1000, seed=5)
    assert a == bootstrap_ci(y, pred, 1000, seed=5)
    for lo, med, hi in a.values():
        assert lo <= med <= hi


def test_bootstrap_interval_stabilizes():
    X, y = linear_data(100, noise=3.0)
    pred = fit_ols(X, y).predict(X)
    spread = {}
    medians = {}
    for n in (1000, 10000):
        widths = []
        for seed in range(8):
            lo, med, hi = bootstrap_ci(y, pred, n, seed=seed)["rmse"]
            widths.append(hi - lo)
            medians.setdefault(n, []).append(med)
        spread[n] = float(np.std(widths))
    assert spread[10000] < spread[1000]
    assert abs(np.mean(medians[10000]) - np.mean(medians[1000])) <= 0.01 * np.mean(medians[10000])


def test_bootstrap_errors():
    with pytest.raises(ValueError):
        bootstrap_ci([1.0], [1.0], 100)
    with pytest.raises(ValueError):
        bootstrap_ci([1.0, 2.0], [1.0, 2.0], 99)


# ---- search and selection ----------------------------------------------------------

def folds_of(m, k=4):
    idx = np.arange(m)
    return [(np.setdiff1d(idx, part), part) for part in np.array_split(idx, k)]


def test_random_search_single_config():
    X, y = linear_data(80, noise=0.1)
    res = random_search("LASSO", {"lambda": 0.05}, 1, folds_of(80), 0, X, y)
    assert res.best_config == {"lambda": 0.05}
    assert len(res.leaderboard) == 1


def test_random_search_deterministic():
    X, y = linear_data(80, noise=0.1)
    space = parse_space({"K": {"randint": [1, 10]}, "p": [1, 2]})
    a = random_search("KNN", space, 6, folds_of(80), 11, X, y)
    b = random_search("KNN", space, 6, folds_of(80), 11, X, y)
    assert a.leaderboard == b.leaderboard


def test_random_search_finds_planted_optimum():
    X, y = linear_data(120)
    space = parse_space({"lambda": [0.0, 1.0, 5.0]})
    res = random_search("LASSO", space, 20, folds_of(120), 3, X, y)
    assert res.best_config["lambda"] == 0.0
    assert res.best_score < 1e-6


def test_random_search_errors():
    X, y = linear_data(20)
    with pytest.raises(ValueError):
        random_search("KNN", {}, 3, folds_of(20), 0, X, y)
    with pytest.raises(ValueError):
        random_search("KNN", {"K": 1}, 0, folds_of(20), 0, X, y)


def test_config_streams_independent_of_count():
    space = parse_space({"a": {"uniform": [0, 1]}, "b": {"randint": [0, 100]}})
    assert sample_configs(space, 3, 9) == sample_configs(space, 10, 9)[:3]


def test_parse_space_kinds():
    space = parse_space({"x": {"arange": [0.1, 0.5, 0.1]}, "y": 3})
    assert space["x"] == [0.1, 0.2, 0.3, 0.4]
    assert space["y"] == 3
    with pytest.raises(ValueError):
        parse_space({"z": {"gamma": [1]}})


def stepwise_data(seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(150, 3))
    y = 4.0 * X[:, 0] + 1.0
    return X, y


def test_stepwise_picks_informative_feature_first():
    X, y = stepwise_data()
    res = forward_stepwise_select(["A", "noise1", "noise2"], "OLS", folds_of(150), 3, X, y,
                                  ["A", "noise1", "noise2"])
    assert res.selected[0] == "A"
    assert len(res.curve) == len(res.selected)


def test_stepwise_budget_one():
    X, y = stepwise_data(1)
    res = forward_stepwise_select(["A", "noise1", "noise2"], "OLS", folds_of(150), 1, X, y,
                                  ["A", "noise1", "noise2"])
    assert res.selected == ["A"]
    assert len(res.curve) == 1
