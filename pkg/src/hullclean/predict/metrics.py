from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Bonferroni correction over 36 intervals at a 5% familywise rate
BONFERRONI_ALPHA = 0.05 / 36


@dataclass
class MetricReport:
    rmse: float
    mae: float
    r2: float
    ci: dict = field(default_factory=dict)  # metric -> (low, median, high)

    def to_dict(self) -> dict:
        out = {"rmse": self.rmse, "mae": self.mae, "r2": self.r2}
        if self.ci:
            out["ci"] = {k: list(v) for k, v in self.ci.items()}
        return out


def _pair(y_true, y_pred):
    y_true = np.asarray(y_true, dtype=float).reshape(-1)
    y_pred = np.asarray(y_pred, dtype=float).reshape(-1)
    if y_true.shape != y_pred.shape:
        raise ValueError(f"length mismatch: {y_true.shape[0]} vs {y_pred.shape[0]}")
    if y_true.shape[0] == 0:
        raise ValueError("metrics need at least one observation")
    return y_true, y_pred


def metrics(y_true, y_pred, strict: bool = True) -> MetricReport:
    """RMSE, MAE and R^2.

    R^2 is undefined for a constant ``y_true``: that raises, or gives NaN
    when ``strict`` is off.
    """
    y_true, y_pred = _pair(y_true, y_pred)
    err = y_true - y_pred
    sst = float(np.sum((y_true - y_true.mean()) ** 2))
    if sst == 0 and strict:
        raise ValueError("r2 is undefined for a constant y_true")
    sse = float(err @ err)
    return MetricReport(
        rmse=float(np.sqrt(sse / len(err))),
        mae=float(np.mean(np.abs(err))),
        r2=1.0 - sse / sst if sst > 0 else float("nan"),
    )


def _resampled_metrics(y_true, y_pred, idx):
    t = y_true[idx]
    p = y_pred[idx]
    err = t - p
    sse = np.einsum("ij,ij->i", err, err)
    sst = np.einsum("ij,ij->i", t - t.mean(axis=1, keepdims=True), t - t.mean(axis=1, keepdims=True))
    with np.errstate(divide="ignore", invalid="ignore"):
        r2 = np.where(sst > 0, 1.0 - sse / sst, np.nan)
    return np.sqrt(sse / idx.shape[1]), np.abs(err).mean(axis=1), r2


def bootstrap_ci(y_true, y_pred, n_resamples: int = 100_000, alpha: float = BONFERRONI_ALPHA,
                 seed: int = 0, chunk: int = 2000) -> dict:
    """Percentile intervals (alpha, median, 1 - alpha) of RMSE, MAE and R^2.

    Resamples whose y_true is constant have no R^2 and are left out of its
    quantiles.
    """
    y_true, y_pred = _pair(y_true, y_pred)
    m = len(y_true)
    if m < 2:
        raise ValueError("bootstrap needs at least two observations")
    if n_resamples < 100:
        raise ValueError("n_resamples must be >= 100")
    if not 0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 0.5)")
    rng = np.random.default_rng(seed)
    chunk = max(1, min(chunk, max(1, 2_000_000 // m)))
    parts = {"rmse": [], "mae": [], "r2": []}
    done = 0
    while done < n_resamples:
        size = min(chunk, n_resamples - done)
        idx = rng.integers(0, m, size=(size, m))
        rmse, mae, r2 = _resampled_metrics(y_true, y_pred, idx)
        parts["rmse"].append(rmse)
        parts["mae"].append(mae)
        parts["r2"].append(r2)
        done += size
    qs = (alpha, 0.5, 1 - alpha)
    out = {}
    for name, chunks in parts.items():
        values = np.concatenate(chunks)
        values = values[np.isfinite(values)]
        out[name] = tuple(float(v) for v in np.quantile(values, qs)) if len(values) else (np.nan,) * 3
    return out
