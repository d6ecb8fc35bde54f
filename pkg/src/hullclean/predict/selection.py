"""Model dispatch, random hyperparameter search and forward stepwise selection."""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import numpy as np
from scipy import stats

from hullclean.core import FeatureSchema
from hullclean.predict.base import TrainedPredictor, default_schema
from hullclean.predict.gbt import GBTConfig, fit_gbt
from hullclean.predict.knn import fit_knn
from hullclean.predict.linear import fit_lasso, fit_ols

MODEL_KINDS = ("OLS", "LASSO", "KNN", "GBT")

# hyperparameter names as written for the reference XGBoost search space
_GBT_ALIASES = {"n_estimators": "n_trees", "colsample_bytree": "colsample", "min_samples_leaf": "min_leaf"}


def fit_model(kind: str, X, y, config: dict | None = None, schema: FeatureSchema | None = None,
              seed: int = 0) -> TrainedPredictor:
    config = dict(config or {})
    X = np.asarray(X, dtype=float)
    schema = schema or default_schema(X.shape[1])
    if kind == "OLS":
        return fit_ols(X, y, intercept=config.get("intercept", True), schema=schema)
    if kind == "LASSO":
        return fit_lasso(X, y, config.get("lambda", 1.0), tol=config.get("tol", 1e-8),
                         max_sweeps=config.get("max_sweeps", 100_000), schema=schema)
    if kind == "KNN":
        K = min(int(config.get("K", 5)), X.shape[0])
        return fit_knn(X, y, K=K, p=int(config.get("p", 2)), schema=schema)
    if kind == "GBT":
        allowed = {f.name for f in fields(GBTConfig)}
        cfg = {}
        for key, value in config.items():
            key = _GBT_ALIASES.get(key, key)
            if key in allowed:
                cfg[key] = value
        cfg.setdefault("seed", seed)
        cfg["monotone"] = tuple(n for n in cfg.get("monotone", ()) if n in schema.names)
        for key in ("n_trees", "max_depth", "min_leaf"):
            if key in cfg:
                cfg[key] = int(cfg[key])
        return fit_gbt(X, y, GBTConfig(**cfg), schema=schema)
    raise ValueError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")


def parse_space(raw: dict) -> dict:
    """Turn a JSON-friendly search space into samplers.

    ``{"uniform": [loc, scale]}`` and ``{"randint": [low, high]}`` follow
    scipy.stats; ``{"arange": [start, stop, step]}`` and lists are uniform
    choices; anything else is a constant.
    """
    out = {}
    for name, value in raw.items():
        if isinstance(value, dict) and len(value) == 1:
            (dist, args), = value.items()
            if dist == "uniform":
                out[name] = stats.uniform(*args)
            elif dist == "loguniform":
                out[name] = stats.loguniform(*args)
            elif dist == "randint":
                out[name] = stats.randint(*args)
            elif dist == "arange":
                out[name] = [round(float(v), 10) for v in np.arange(*args)]
            else:
                raise ValueError(f"unknown distribution {dist!r} for {name}")
        else:
            out[name] = value
    return out


def _draw(value, rng):
    if hasattr(value, "rvs"):
        v = value.rvs(random_state=rng)
        return v.item() if hasattr(v, "item") else v
    if isinstance(value, (list, tuple, np.ndarray)):
        if len(value) == 0:
            raise ValueError("empty choice list in search space")
        v = value[int(rng.integers(len(value)))]
        return v.item() if hasattr(v, "item") else v
    return value


def sample_configs(space: dict, n_configs: int, seed: int) -> list[dict]:
    """One independent RNG stream per configuration, so order of evaluation never matters."""
    children = np.random.SeedSequence(seed).spawn(n_configs)
    configs = []
    for child in children:
        rng = np.random.default_rng(child)
        configs.append({name: _draw(space[name], rng) for name in sorted(space)})
    return configs


def cv_rmse(kind, X, y, folds, config, schema=None, seed=0) -> list[float]:
    scores = []
    for train_idx, val_idx in folds:
        model = fit_model(kind, X[train_idx], y[train_idx], config, schema, seed)
        err = y[val_idx] - model.predict(X[val_idx])
        scores.append(float(np.sqrt(np.mean(err * err))))
    return scores


@dataclass
class SearchResult:
    best_config: dict
    best_score: float
    leaderboard: list = field(default_factory=list)  # (config, mean_rmse, fold_scores)


def random_search(model_kind: str, space: dict, n_configs: int, folds, seed: int, X, y,
                  schema: FeatureSchema | None = None, fixed: dict | None = None) -> SearchResult:
    """Evaluate ``n_configs`` sampled configurations by mean CV RMSE; ties keep the earlier one.

    ``fixed`` entries are added to every configuration unchanged.
    """
    if n_configs < 1:
        raise ValueError("n_configs must be >= 1")
    if model_kind != "OLS" and not space:
        raise ValueError("empty search space")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    configs = sample_configs(space, n_configs, seed) if space else [{}]
    configs = [{**c, **(fixed or {})} for c in configs]
    leaderboard = []
    best, best_score = None, np.inf
    for i, config in enumerate(configs):
        scores = cv_rmse(model_kind, X, y, folds, config, schema, seed + i)
        mean = float(np.mean(scores))
        leaderboard.append((config, mean, scores))
        if mean < best_score:
            best, best_score = config, mean
    if best is None:
        best, best_score = configs[0], leaderboard[0][1]
    return SearchResult(best, best_score, leaderboard)


@dataclass
class StepwiseResult:
    selected: list
    curve: list  # mean validation RMSE after each addition
    configs: list
    features: list  # required features followed by the selected ones


def forward_stepwise_select(candidate_features, model_kind: str, folds, budget: int, X, y,
                            feature_names, space: dict | None = None, n_configs: int = 1,
                            seed: int = 0, required=(), fixed: dict | None = None) -> StepwiseResult:
    """Greedy forward selection; each trial runs its own hyperparameter search.

    Stops after ``budget`` additions or once no remaining feature lowers the
    mean validation RMSE.
    """
    names = list(feature_names)
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    required = [f for f in required]
    remaining = [f for f in candidate_features if f not in required]
    selected, curve, configs = [], [], []
    best_so_far = np.inf
    space = space or {}
    while remaining and len(selected) < budget:
        step_best = None
        for feat in remaining:
            cols = required + selected + [feat]
            idx = [names.index(c) for c in cols]
            schema = FeatureSchema(tuple(cols))
            result = random_search(model_kind, space, n_configs, folds, seed, X[:, idx], y, schema, fixed)
            if step_best is None or result.best_score < step_best[1]:
                step_best = (feat, result.best_score, result.best_config)
        feat, score, config = step_best
        if score >= best_so_far:
            break
        best_so_far = score
        selected.append(feat)
        curve.append(score)
        configs.append(config)
        remaining.remove(feat)
    return StepwiseResult(selected, curve, configs, required + selected)
