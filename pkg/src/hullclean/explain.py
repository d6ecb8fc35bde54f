"""Shapley-value attribution of predictor outputs to input features.

Coalition values are interventional: features outside the coalition are
taken from background rows and the prediction is averaged over them.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

EXACT_MAX_FEATURES = 14
_MAX_BATCH_ROWS = 200_000


class TooManyFeaturesError(ValueError):
    pass


@dataclass
class AttributionResult:
    phi: np.ndarray
    base_value: float
    prediction: float
    features: tuple = ()
    values: np.ndarray | None = None
    mode: str = "exact"
    n_permutations: int = 0
    residual: float = 0.0  # efficiency gap before redistribution (sampled mode)

    def efficiency_gap(self) -> float:
        return float(self.base_value + self.phi.sum() - self.prediction)


def sample_background(X, size: int = 100, seed: int = 0) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if len(X) <= size:
        return X.copy()
    rng = np.random.default_rng(seed)
    return X[np.sort(rng.choice(len(X), size, replace=False))]


def _prep(predictor, row, background):
    row = np.asarray(row, dtype=float).reshape(-1)
    background = np.atleast_2d(np.asarray(background, dtype=float))
    if background.shape[0] == 0:
        raise ValueError("background must contain at least one row")
    if background.shape[1] != row.shape[0]:
        raise ValueError("row and background have different widths")
    return row, background


def value_function(predictor, row, subset, background) -> float:
    """Mean prediction over background rows with the ``subset`` columns taken from ``row``."""
    row, background = _prep(predictor, row, background)
    composite = background.copy()
    cols = list(subset)
    composite[:, cols] = row[cols]
    return float(predictor.predict(composite).mean())


def _mask_values(predictor, row, background, masks) -> np.ndarray:
    """Coalition values for bitmask coalitions, batched into few predict calls."""
    M = row.shape[0]
    B = background.shape[0]
    bits = ((np.asarray(masks)[:, None] >> np.arange(M)) & 1).astype(bool)
    out = np.empty(len(masks))
    per = max(1, _MAX_BATCH_ROWS // B)
    for start in range(0, len(masks), per):
        sel = bits[start:start + per]
        comp = np.broadcast_to(background, (len(sel), B, M)).copy()
        comp = np.where(sel[:, None, :], row[None, None, :], comp)
        pred = predictor.predict(comp.reshape(-1, M)).reshape(len(sel), B)
        out[start:start + per] = pred.mean(axis=1)
    return out


def shapley_exact(predictor, row, background, feature_names=None) -> AttributionResult:
    row, background = _prep(predictor, row, background)
    M = row.shape[0]
    if M > EXACT_MAX_FEATURES:
        raise TooManyFeaturesError(
            f"exact Shapley values need 2^{M} coalitions; use shapley_sampled for M > {EXACT_MAX_FEATURES}"
        )
    masks = np.arange(1 << M)
    v = _mask_values(predictor, row, background, masks)
    sizes = np.array([bin(m).count("1") for m in masks])
    fact = [math.factorial(s) for s in range(M + 1)]
    weight = np.array([fact[s] * fact[M - s - 1] / fact[M] if s < M else 0.0 for s in range(M + 1)])
    phi = np.empty(M)
    for l in range(M):
        without = masks[(masks >> l) & 1 == 0]
        phi[l] = float(np.sum(weight[sizes[without]] * (v[without | (1 << l)] - v[without])))
    names = tuple(feature_names) if feature_names is not None else _names(predictor, M)
    return AttributionResult(phi, float(v[0]), float(predictor.predict(row[None, :])[0]), names, row, "exact")


def _names(predictor, M):
    schema = getattr(predictor, "schema", None)
    return tuple(schema.names) if schema is not None and len(schema) == M else tuple(f"x{i}" for i in range(M))


def _permutations(M, n_permutations, rng):
    if n_permutations >= math.factorial(M):
        return [np.array(p) for p in itertools.permutations(range(M))]
    perms = []
    while len(perms) < n_permutations:
        p = rng.permutation(M)
        perms.append(p)
        if len(perms) < n_permutations:
            perms.append(p[::-1].copy())  # antithetic partner
    return perms


def shapley_sampled(predictor, row, background, n_permutations: int = 1000, seed: int = 0,
                    feature_names=None) -> AttributionResult:
    """Permutation-sampling estimate; exact when ``n_permutations >= M!``."""
    if n_permutations < 1:
        raise ValueError("n_permutations must be >= 1")
    row, background = _prep(predictor, row, background)
    M = row.shape[0]
    B = background.shape[0]
    rng = np.random.default_rng(seed)
    perms = _permutations(M, n_permutations, rng)
    base = float(predictor.predict(background).mean())
    prediction = float(predictor.predict(row[None, :])[0])
    total = np.zeros(M)
    per = max(1, _MAX_BATCH_ROWS // (M * B))
    for start in range(0, len(perms), per):
        chunk = np.array(perms[start:start + per])
        P = len(chunk)
        # prefix masks: include[p, k, f] = feature f is among the first k+1 of perm p
        rank = np.empty_like(chunk)
        rank[np.arange(P)[:, None], chunk] = np.arange(M)[None, :]
        include = rank[:, None, :] <= np.arange(M)[None, :, None]
        comp = np.where(include[:, :, None, :], row, background[None, None, :, :])
        vals = predictor.predict(comp.reshape(-1, M)).reshape(P, M, B).mean(axis=2)
        prev = np.concatenate([np.full((P, 1), base), vals[:, :-1]], axis=1)
        contrib = vals - prev  # contribution of the k-th feature in each permutation
        np.add.at(total, chunk.reshape(-1), contrib.reshape(-1))
    phi = total / len(perms)
    residual = float(prediction - base - phi.sum())
    phi = phi + residual / M
    names = tuple(feature_names) if feature_names is not None else _names(predictor, M)
    return AttributionResult(phi, base, prediction, names, row, "sampled", len(perms), residual)


def explain_row(predictor, row, background, n_permutations: int = 1000, seed: int = 0):
    """Exact attribution when affordable, sampled otherwise."""
    M = np.asarray(row).reshape(-1).shape[0]
    if M <= EXACT_MAX_FEATURES:
        return shapley_exact(predictor, row, background)
    return shapley_sampled(predictor, row, background, n_permutations, seed)


def export_dependence_data(predictor, rows, feature: str, background, n_permutations: int = 1000,
                           seed: int = 0) -> list[tuple[float, float]]:
    """(feature value, Shapley value) pairs for each row, in input order."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.shape[0] == 0:
        raise ValueError("rows must be non-empty")
    names = predictor.schema.names
    if feature not in names:
        raise KeyError(f"unknown feature {feature!r}")
    l = names.index(feature)
    out = []
    for r in rows:
        res = explain_row(predictor, r, background, n_permutations, seed)
        out.append((float(r[l]), float(res.phi[l])))
    return out


def write_attribution_csv(result: AttributionResult, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# base_value={result.base_value!r},prediction={result.prediction!r},mode={result.mode}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["feature", "value", "phi"])
        values = result.values if result.values is not None else [""] * len(result.phi)
        for name, value, phi in zip(result.features, values, result.phi):
            w.writerow([name, repr(float(value)) if value != "" else "", repr(float(phi))])


def read_attribution_csv(path) -> AttributionResult:
    with open(path, newline="") as fh:
        header = fh.readline().lstrip("# ").strip()
        meta = dict(item.split("=", 1) for item in header.split(","))
        rows = list(csv.DictReader(fh))
    return AttributionResult(
        phi=np.array([float(r["phi"]) for r in rows]),
        base_value=float(meta["base_value"]),
        prediction=float(meta["prediction"]),
        features=tuple(r["feature"] for r in rows),
        values=np.array([float(r["value"]) for r in rows]),
        mode=meta.get("mode", "exact"),
    )
