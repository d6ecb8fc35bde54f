"""k-nearest-neighbour regression with a Minkowski metric."""

from __future__ import annotations

import numpy as np

from hullclean.core import FeatureSchema
from hullclean.predict.base import Standardizer, TrainedPredictor, default_schema, register

_CHUNK = 256


@register("KNN")
class KNNPredictor(TrainedPredictor):
    def __init__(self, schema: FeatureSchema, X_train, y_train, K: int, p: int, scaler: Standardizer):
        super().__init__(schema)
        self.X_train = np.asarray(X_train, dtype=float)
        self.y_train = np.asarray(y_train, dtype=float)
        self.K = int(K)
        self.p = int(p)
        self.scaler = scaler
        self._Z = scaler.transform(self.X_train)

    def neighbors(self, X) -> np.ndarray:
        """Indices of the K nearest training rows per query; ties go to the lower index."""
        Q = self.scaler.transform(self._check(X))
        out = np.empty((Q.shape[0], self.K), dtype=np.int64)
        for start in range(0, Q.shape[0], _CHUNK):
            q = Q[start:start + _CHUNK]
            d = np.zeros((q.shape[0], self._Z.shape[0]))
            for f in range(q.shape[1]):
                diff = np.abs(q[:, f, None] - self._Z[None, :, f])
                d += diff if self.p == 1 else diff * diff
            if self.p == 2:
                d = np.sqrt(d)
            order = np.argsort(d, axis=1, kind="stable")
            out[start:start + _CHUNK] = order[:, :self.K]
        return out

    def _predict(self, X):
        return self.y_train[self.neighbors(X)].mean(axis=1)

    def params(self):
        return {
            "K": self.K,
            "p": self.p,
            "X_train": self.X_train.tolist(),
            "y_train": self.y_train.tolist(),
            "scaler": self.scaler.to_dict(),
        }

    @classmethod
    def from_params(cls, schema, params):
        return cls(schema, params["X_train"], params["y_train"], params["K"], params["p"],
                   Standardizer.from_dict(params["scaler"]))


def fit_knn(X, y, K: int = 5, p: int = 2, schema: FeatureSchema | None = None) -> KNNPredictor:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    if X.ndim != 2 or X.shape[0] != y.shape[0] or X.shape[0] == 0:
        raise ValueError("X and y must be non-empty with matching rows")
    if K < 1:
        raise ValueError("K must be >= 1")
    if K > X.shape[0]:
        raise ValueError(f"K={K} exceeds the {X.shape[0]} training rows")
    if p not in (1, 2):
        raise ValueError("p must be 1 (manhattan) or 2 (euclidean)")
    return KNNPredictor(schema or default_schema(X.shape[1]), X, y, K, p, Standardizer.fit(X))
