"""Predictor base class, feature standardization and the JSON model artifact."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from hullclean.core import FeatureSchema

MODEL_SCHEMA_VERSION = 1

_REGISTRY: dict[str, type["TrainedPredictor"]] = {}


def register(kind: str):
    def deco(cls):
        cls.kind = kind
        _REGISTRY[kind] = cls
        return cls

    return deco


class TrainedPredictor:
    """A fitted fuel-consumption model g mapping feature rows to kg/h."""

    kind: str = ""

    def __init__(self, schema: FeatureSchema):
        self.schema = schema

    def predict(self, X) -> np.ndarray:
        X = self._check(X)
        return self._predict(X)

    def _predict(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _check(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != len(self.schema):
            raise ValueError(f"{self.kind}: expected {len(self.schema)} features, got {X.shape[1]}")
        return X

    def params(self) -> dict:
        raise NotImplementedError

    @classmethod
    def from_params(cls, schema: FeatureSchema, params: dict) -> "TrainedPredictor":
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {
            "schema_version": MODEL_SCHEMA_VERSION,
            "kind": self.kind,
            "schema": self.schema.to_dict(),
            "parameters": self.params(),
        }

    def __repr__(self):
        return f"<{type(self).__name__} kind={self.kind} k={len(self.schema)}>"


def predictor_from_dict(data: dict) -> TrainedPredictor:
    version = data.get("schema_version")
    if version != MODEL_SCHEMA_VERSION:
        raise ValueError(f"unsupported model schema_version {version!r}")
    kind = data["kind"]
    if kind not in _REGISTRY:
        raise ValueError(f"unknown predictor kind {kind!r}")
    return _REGISTRY[kind].from_params(FeatureSchema.from_dict(data["schema"]), data["parameters"])


def save_model(predictor: TrainedPredictor, path) -> None:
    Path(path).write_text(json.dumps(predictor.to_dict(), indent=1, sort_keys=True) + "\n")


def load_model(path) -> TrainedPredictor:
    return predictor_from_dict(json.loads(Path(path).read_text()))


class Standardizer:
    """Zero-mean / unit-variance column scaling; constant columns keep scale 1."""

    def __init__(self, mean: np.ndarray, scale: np.ndarray):
        self.mean = np.asarray(mean, dtype=float)
        self.scale = np.asarray(scale, dtype=float)

    @classmethod
    def fit(cls, X: np.ndarray) -> "Standardizer":
        mean = X.mean(axis=0)
        scale = X.std(axis=0)
        scale = np.where(scale > 0, scale, 1.0)
        return cls(mean, scale)

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.scale

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Standardizer":
        return cls(np.array(d["mean"]), np.array(d["scale"]))


def default_schema(k: int) -> FeatureSchema:
    return FeatureSchema(tuple(f"x{i}" for i in range(k)))
