"""Fuel-consumption predictors and their training machinery."""

from hullclean.predict.base import (
    TrainedPredictor,
    load_model,
    predictor_from_dict,
    save_model,
)
from hullclean.predict.cost import SchemaMismatchError, VoyageCostFunction, voyage_cost
from hullclean.predict.gbt import GBTConfig, GBTPredictor, fit_gbt
from hullclean.predict.knn import KNNPredictor, fit_knn
from hullclean.predict.linear import (
    LassoConvergenceError,
    LassoPredictor,
    OLSPredictor,
    SingularDesignError,
    fit_lasso,
    fit_ols,
    lasso_lambda_max,
)
from hullclean.predict.metrics import BONFERRONI_ALPHA, MetricReport, bootstrap_ci, metrics
from hullclean.predict.physics import SyntheticPhysicsPredictor, synthetic_physics_predictor
from hullclean.predict.selection import (
    MODEL_KINDS,
    SearchResult,
    StepwiseResult,
    fit_model,
    forward_stepwise_select,
    parse_space,
    random_search,
)
