from __future__ import annotations

import numpy as np

from hullclean.core import FeatureSchema
from hullclean.predict.base import TrainedPredictor, register

SPEED = "stw"
LOAD = "draught_plus_wave_height"
FOULING = "dsddm"


@register("SyntheticPhysics")
class SyntheticPhysicsPredictor(TrainedPredictor):
    """Known-form oracle: foc = drag * load * stw^2 + fouling_coeff * dsddm.

    With ``drag_coeff = 1`` and ``fouling_coeff = 36`` this is the per-row
    consumption of the five-voyage reference instance.
    """

    def __init__(self, schema: FeatureSchema, drag_coeff: float = 1.0, fouling_coeff: float = 36.0):
        super().__init__(schema)
        if not np.isfinite(drag_coeff) or not np.isfinite(fouling_coeff):
            raise ValueError("constants must be finite")
        if fouling_coeff < 0:
            raise ValueError("fouling_coeff must be >= 0")
        self.drag_coeff = float(drag_coeff)
        self.fouling_coeff = float(fouling_coeff)
        self._speed = schema.index(SPEED)
        self._load = schema.index(LOAD)
        self._fouling = schema.names.index(FOULING) if FOULING in schema.names else None

    def _predict(self, X):
        out = self.drag_coeff * X[:, self._load] * X[:, self._speed] ** 2
        if self._fouling is not None:
            out = out + self.fouling_coeff * X[:, self._fouling]
        return out

    def params(self):
        return {"drag_coeff": self.drag_coeff, "fouling_coeff": self.fouling_coeff}

    @classmethod
    def from_params(cls, schema, params):
        return cls(schema, params["drag_coeff"], params["fouling_coeff"])


def synthetic_physics_predictor(constants: dict | None = None, schema: FeatureSchema | None = None):
    constants = dict(constants or {})
    schema = schema or FeatureSchema((SPEED, LOAD, FOULING))
    return SyntheticPhysicsPredictor(
        schema, constants.get("drag_coeff", 1.0), constants.get("fouling_coeff", 36.0)
    )
