"""Ordinary least squares and LASSO by cyclic coordinate descent."""

from __future__ import annotations

import numpy as np

from hullclean.core import FeatureSchema
from hullclean.predict.base import Standardizer, TrainedPredictor, default_schema, register


class SingularDesignError(np.linalg.LinAlgError):
    pass


class LassoConvergenceError(RuntimeError):
    def __init__(self, message, coef, intercept, sweeps):
        super().__init__(message)
        self.coef = coef
        self.intercept = intercept
        self.sweeps = sweeps


class _Linear(TrainedPredictor):
    def __init__(self, schema: FeatureSchema, coef, intercept: float = 0.0):
        super().__init__(schema)
        self.coef = np.asarray(coef, dtype=float)
        self.intercept = float(intercept)

    def _predict(self, X):
        return X @ self.coef + self.intercept

    def params(self):
        return {"coef": self.coef.tolist(), "intercept": self.intercept}

    @classmethod
    def from_params(cls, schema, params):
        return cls(schema, params["coef"], params["intercept"])


@register("OLS")
class OLSPredictor(_Linear):
    pass


@register("LASSO")
class LassoPredictor(_Linear):
    def __init__(self, schema, coef, intercept=0.0, lam=0.0, objective_history=()):
        super().__init__(schema, coef, intercept)
        self.lam = float(lam)
        self.objective_history = list(objective_history)

    def params(self):
        return {**super().params(), "lambda": self.lam}

    @classmethod
    def from_params(cls, schema, params):
        return cls(schema, params["coef"], params["intercept"], params.get("lambda", 0.0))


def _as_xy(X, y):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError(f"X shape {X.shape} incompatible with y length {y.shape[0]}")
    if X.shape[0] == 0:
        raise ValueError("empty training data")
    return X, y


def fit_ols(X, y, intercept: bool = True, schema: FeatureSchema | None = None, rcond: float = 1e-10):
    """Least-squares fit; raises SingularDesignError on rank-deficient designs.

    ``rcond`` is the smallest allowed ratio of singular values
    s_min / s_max of the design (including the intercept column).
    """
    X, y = _as_xy(X, y)
    schema = schema or default_schema(X.shape[1])
    A = np.column_stack([X, np.ones(len(y))]) if intercept else X
    m, k = A.shape
    if m < k:
        raise SingularDesignError(f"{m} rows cannot determine {k} coefficients")
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0 or s[-1] / s[0] < rcond:
        ratio = 0.0 if s[0] == 0 else s[-1] / s[0]
        raise SingularDesignError(
            f"design matrix is rank deficient: s_min/s_max = {ratio:.3e} < tolerance rcond={rcond:g}"
        )
    beta, *_ = np.linalg.lstsq(A, y, rcond=None)
    if intercept:
        return OLSPredictor(schema, beta[:-1], beta[-1])
    return OLSPredictor(schema, beta, 0.0)


def lasso_lambda_max(X, y) -> float:
    """Smallest penalty that zeroes every coefficient (standardized scale)."""
    X, y = _as_xy(X, y)
    Z = Standardizer.fit(X).transform(X)
    return _lambda_max(Z, y - y.mean())


def _lambda_max(Z, yc) -> float:
    return float(np.max(np.abs(Z.T @ yc))) / len(yc) if Z.shape[1] else 0.0


def _soft(x, t):
    return np.sign(x) * max(abs(x) - t, 0.0)


def fit_lasso(X, y, lam: float, tol: float = 1e-10, max_sweeps: int = 100_000,
              schema: FeatureSchema | None = None):
    """Minimize (1/2m)||y - b0 - Z beta||^2 + lam * ||beta||_1 on standardized Z.

    Coefficients are mapped back to the original feature scale.
    """
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    X, y = _as_xy(X, y)
    m, k = X.shape
    schema = schema or default_schema(k)
    std = Standardizer.fit(X)
    Z = std.transform(X)
    y_mean = y.mean()
    yc = y - y_mean
    col_sq = (Z * Z).sum(axis=0) / m  # 1 for varying columns, 0 for constant ones
    beta = np.zeros(k)
    resid = yc.copy()

    def objective():
        return 0.5 * float(resid @ resid) / m + lam * float(np.abs(beta).sum())

    history = [objective()]
    # at or above lambda_max zero is optimal; skip the sweeps so rounding cannot leave dust
    sweeps = 0 if lam >= _lambda_max(Z, yc) else max_sweeps
    for sweep in range(1, sweeps + 1):
        max_change = 0.0
        for j in range(k):
            if col_sq[j] == 0:
                continue
            old = beta[j]
            rho = float(Z[:, j] @ resid) / m + col_sq[j] * old
            new = _soft(rho, lam) / col_sq[j]
            if new != old:
                resid -= Z[:, j] * (new - old)
                beta[j] = new
                max_change = max(max_change, abs(new - old))
        history.append(objective())
        if max_change < tol:
            break
    else:
        if sweeps == 0:
            return LassoPredictor(schema, np.zeros(k), y_mean, lam, history)
        coef = beta / std.scale
        raise LassoConvergenceError(
            f"coordinate descent did not converge in {max_sweeps} sweeps",
            coef, y_mean - float(std.mean @ coef), max_sweeps,
        )
    coef = beta / std.scale
    return LassoPredictor(schema, coef, y_mean - float(std.mean @ coef), lam, history)
