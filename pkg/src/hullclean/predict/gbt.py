"""Squared-loss gradient boosted regression trees, written from scratch.

Splits are searched over at most ``n_bins - 1`` quantile thresholds per
feature using per-node residual histograms. Optional monotone constraints
(XGBoost-style bound propagation) keep the ensemble non-decreasing in the
chosen features, which the schedule optimizer relies on.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from hullclean.core import FeatureSchema
from hullclean.predict.base import TrainedPredictor, default_schema, register

N_BINS = 33  # 32 candidate thresholds


@dataclass
class GBTConfig:
    n_trees: int = 100
    max_depth: int = 4
    learning_rate: float = 0.1
    subsample: float = 1.0
    colsample: float = 1.0
    min_leaf: int = 5
    seed: int = 0
    monotone: tuple = ()  # feature names constrained non-decreasing

    def __post_init__(self):
        if self.n_trees < 0:
            raise ValueError("n_trees must be >= 0")
        if not 0 < self.learning_rate <= 1:
            raise ValueError("learning_rate must lie in (0, 1]")
        if not 0 < self.subsample <= 1 or not 0 < self.colsample <= 1:
            raise ValueError("subsample and colsample must lie in (0, 1]")
        if self.max_depth < 1 or self.min_leaf < 1:
            raise ValueError("max_depth and min_leaf must be >= 1")
        self.monotone = tuple(self.monotone)


class Tree:
    """Flat array tree; ``feature == -1`` marks a leaf."""

    def __init__(self, feature, threshold, left, right, value):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=float)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=float)

    @property
    def depth(self) -> int:
        depth = np.zeros(len(self.feature), dtype=int)
        for node in range(len(self.feature)):
            if self.feature[node] >= 0:
                depth[self.left[node]] = depth[node] + 1
                depth[self.right[node]] = depth[node] + 1
        return int(depth.max())

    def predict(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        while True:
            feat = self.feature[node]
            internal = feat >= 0
            if not internal.any():
                return self.value[node]
            go_left = X[rows, np.where(internal, feat, 0)] <= self.threshold[node]
            node = np.where(internal, np.where(go_left, self.left[node], self.right[node]), node)

    def to_dict(self):
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["feature"], d["threshold"], d["left"], d["right"], d["value"])


@register("GBT")
class GBTPredictor(TrainedPredictor):
    def __init__(self, schema: FeatureSchema, base: float, trees: list[Tree], config: GBTConfig,
                 train_rmse: list[float] | None = None):
        super().__init__(schema)
        self.base = float(base)
        self.trees = list(trees)
        self.config = config
        self.train_rmse = list(train_rmse or [])

    def _predict(self, X):
        out = np.full(X.shape[0], self.base)
        for tree in self.trees:
            out += tree.predict(X)
        return out

    def staged_predict(self, X):
        X = self._check(X)
        out = np.full(X.shape[0], self.base)
        yield out.copy()
        for tree in self.trees:
            out += tree.predict(X)
            yield out.copy()

    def params(self):
        cfg = asdict(self.config)
        cfg["monotone"] = list(cfg["monotone"])
        return {"base": self.base, "config": cfg, "trees": [t.to_dict() for t in self.trees]}

    @classmethod
    def from_params(cls, schema, params):
        return cls(schema, params["base"], [Tree.from_dict(t) for t in params["trees"]],
                   GBTConfig(**params["config"]))


def _bin_edges(col: np.ndarray, n_bins: int) -> np.ndarray:
    """At most n_bins-1 distinct quantile thresholds for one feature."""
    qs = np.quantile(col, np.linspace(0, 1, n_bins + 1)[1:-1])
    edges = np.unique(qs)
    # a threshold equal to the max separates nothing
    return edges[edges < col.max()]


class _TreeBuilder:
    def __init__(self, binned, edges, min_leaf, max_depth, monotone_sign):
        self.binned = binned
        self.edges = edges
        self.min_leaf = min_leaf
        self.max_depth = max_depth
        self.monotone_sign = monotone_sign
        self.feature, self.threshold, self.left, self.right, self.value = [], [], [], [], []

    def _new_node(self, value):
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(value)
        return len(self.feature) - 1

    def build(self, rows, grad, features):
        lo, hi = -np.inf, np.inf
        root = self._new_node(float(np.clip(grad[rows].mean(), lo, hi)))
        stack = [(root, rows, 0, lo, hi)]
        while stack:
            node, idx, depth, lo, hi = stack.pop()
            if depth >= self.max_depth or len(idx) < 2 * self.min_leaf:
                continue
            split = self._best_split(idx, grad, features, lo, hi)
            if split is None:
                continue
            f, b, wl, wr = split
            mask = self.binned[idx, f] <= b
            li, ri = idx[mask], idx[~mask]
            llo, lhi, rlo, rhi = lo, hi, lo, hi
            if self.monotone_sign[f] > 0:
                mid = 0.5 * (wl + wr)
                lhi, rlo = mid, mid
            l_node = self._new_node(float(np.clip(wl, llo, lhi)))
            r_node = self._new_node(float(np.clip(wr, rlo, rhi)))
            self.feature[node] = f
            self.threshold[node] = float(self.edges[f][b])
            self.left[node] = l_node
            self.right[node] = r_node
            stack.append((r_node, ri, depth + 1, rlo, rhi))
            stack.append((l_node, li, depth + 1, llo, lhi))
        return Tree(self.feature, self.threshold, self.left, self.right, self.value)

    def _best_split(self, idx, grad, features, lo, hi):
        g = grad[idx]
        total_sum = g.sum()
        total_n = len(idx)
        best_gain, best = 1e-12 * total_n * max(1.0, float(g @ g) / total_n), None
        parent_score = total_sum * total_sum / total_n
        for f in features:
            n_edges = len(self.edges[f])
            if n_edges == 0:
                continue
            bins = self.binned[idx, f]
            cnt = np.bincount(bins, minlength=n_edges + 1)[:n_edges].cumsum()
            sm = np.bincount(bins, weights=g, minlength=n_edges + 1)[:n_edges].cumsum()
            r_cnt = total_n - cnt
            r_sm = total_sum - sm
            ok = (cnt >= self.min_leaf) & (r_cnt >= self.min_leaf)
            if not ok.any():
                continue
            with np.errstate(divide="ignore", invalid="ignore"):
                wl = np.clip(sm / cnt, lo, hi)
                wr = np.clip(r_sm / r_cnt, lo, hi)
                if self.monotone_sign[f] > 0:
                    ok &= wl <= wr
                # squared-error reduction with (possibly clipped) leaf values
                gain = (2 * sm * wl - cnt * wl * wl) + (2 * r_sm * wr - r_cnt * wr * wr) - parent_score
            gain = np.where(ok, gain, -np.inf)
            b = int(np.argmax(gain))
            if gain[b] > best_gain:
                best_gain = float(gain[b])
                best = (f, b, float(wl[b]), float(wr[b]))
        return best


def fit_gbt(X, y, config: GBTConfig | None = None, schema: FeatureSchema | None = None,
            track_rmse: bool = False) -> GBTPredictor:
    config = config or GBTConfig()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[0] != y.shape[0]:
        raise ValueError("empty or mismatched training data")
    m, k = X.shape
    schema = schema or default_schema(k)
    unknown = set(config.monotone) - set(schema.names)
    if unknown:
        raise ValueError(f"monotone constraint on unknown features {sorted(unknown)}")
    monotone_sign = np.array([1 if n in config.monotone else 0 for n in schema.names])
    edges = [_bin_edges(X[:, f], N_BINS) for f in range(k)]
    binned = np.empty((m, k), dtype=np.int64)
    for f in range(k):
        binned[:, f] = np.searchsorted(edges[f], X[:, f], side="left")

    rng = np.random.default_rng(config.seed)
    base = float(y.mean())
    pred = np.full(m, base)
    trees = []
    rmse = [float(np.sqrt(np.mean((y - pred) ** 2)))] if track_rmse else []
    n_rows = max(1, int(round(config.subsample * m)))
    n_cols = max(1, int(round(config.colsample * k)))
    for _ in range(config.n_trees):
        resid = y - pred
        rows = np.sort(rng.choice(m, n_rows, replace=False)) if n_rows < m else np.arange(m)
        cols = np.sort(rng.choice(k, n_cols, replace=False)) if n_cols < k else np.arange(k)
        builder = _TreeBuilder(binned, edges, config.min_leaf, config.max_depth, monotone_sign)
        tree = builder.build(rows, resid, cols)
        tree.value = tree.value * config.learning_rate
        trees.append(tree)
        pred += tree.predict(X)
        if track_rmse:
            rmse.append(float(np.sqrt(np.mean((y - pred) ** 2))))
    return GBTPredictor(schema, base, trees, config, rmse)
