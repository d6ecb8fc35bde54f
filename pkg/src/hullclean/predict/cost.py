"""Per-voyage fuel cost built on top of a fitted predictor."""

from __future__ import annotations

import numpy as np

from hullclean.core import VoyageProfile, as_fouling_array
from hullclean.predict.base import TrainedPredictor


class SchemaMismatchError(ValueError):
    pass


class VoyageCostFunction:
    """USD cost of sailing a voyage with a given fouling state.

    Every hourly row has its fouling columns overwritten with ``b`` before
    prediction, the predicted kg/h are summed over the rows and priced.
    ``truncate_rows`` sums only the first rows of each voyage; it exists to
    cross-check scripts that used that convention and is off by default.
    """

    def __init__(self, predictor: TrainedPredictor, fuel_price: float, overhead: float = 0.0,
                 truncate_rows: int | None = None):
        if not np.isfinite(fuel_price) or fuel_price < 0:
            raise ValueError("fuel_price must be finite and >= 0")
        self.predictor = predictor
        self.fuel_price = float(fuel_price)
        self.overhead = float(overhead)
        self.truncate_rows = truncate_rows
        self._fouling_cols = predictor.schema.fouling_columns()
        self._col_cache: dict[tuple, np.ndarray] = {}

    def _features(self, voyage: VoyageProfile) -> np.ndarray:
        idx = self._col_cache.get(voyage.columns)
        if idx is None:
            missing = [n for n in self.predictor.schema.names if n not in voyage.columns]
            if missing:
                raise SchemaMismatchError(
                    f"voyage {voyage.voyage_id} lacks predictor features {missing}"
                )
            idx = np.array([voyage.columns.index(n) for n in self.predictor.schema.names], dtype=int)
            self._col_cache[voyage.columns] = idx
        X = voyage.rows[:, idx]
        if self.truncate_rows is not None:
            X = X[: self.truncate_rows]
        return X

    def fuel_kg_batch(self, voyage: VoyageProfile, bs) -> np.ndarray:
        """Fuel (kg) of the voyage for each fouling state in ``bs`` (shape (r, 7))."""
        bs = np.atleast_2d(np.asarray(bs, dtype=float))
        X = self._features(voyage)
        m = X.shape[0]
        stacked = np.tile(X, (bs.shape[0], 1))
        for comp, col in self._fouling_cols.items():
            stacked[:, col] = np.repeat(bs[:, comp], m)
        pred = self.predictor.predict(stacked).reshape(bs.shape[0], m)
        return pred.sum(axis=1)

    def batch(self, voyage: VoyageProfile, bs) -> np.ndarray:
        return self.fuel_kg_batch(voyage, bs) * self.fuel_price + self.overhead

    def fuel_kg(self, voyage: VoyageProfile, b) -> float:
        return float(self.fuel_kg_batch(voyage, as_fouling_array(b)[None, :])[0])

    def __call__(self, voyage: VoyageProfile, b) -> float:
        return float(self.batch(voyage, as_fouling_array(b)[None, :])[0])


def voyage_cost(fn: VoyageCostFunction, voyage: VoyageProfile, b) -> float:
    return fn(voyage, b)
