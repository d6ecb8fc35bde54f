"""Command-line pipeline: generate -> ingest -> train -> explain -> optimize.

Every command reads one JSON run configuration with an explicit seed and
writes versioned JSON/CSV artifacts to an output directory. Exit codes:
0 success, 1 failed check, 2 validation error, 3 solver refusal,
4 data-quality failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime
from pathlib import Path

import numpy as np

from hullclean import explain as xp
from hullclean import ingest, reduce, solve, synth
from hullclean.core import FOULING_FIELDS, FeatureSchema, FoulingVector, ProblemInstance, VoyageProfile
from hullclean.predict import (
    MODEL_KINDS,
    SchemaMismatchError,
    VoyageCostFunction,
    bootstrap_ci,
    fit_model,
    forward_stepwise_select,
    load_model,
    metrics,
    parse_space,
    random_search,
    save_model,
)

ARTIFACT_VERSION = 1
OUT_DIR_ENV = "HULLCLEAN_OUT_DIR"

EXIT_OK, EXIT_CHECK, EXIT_VALIDATION, EXIT_REFUSAL, EXIT_DATA = 0, 1, 2, 3, 4

DEFAULT_FEATURES = ("stw", "draught_plus_wave_height", "r_wind", "r_current") + FOULING_FIELDS
DEFAULT_SPACES = {
    "OLS": {},
    "LASSO": {"lambda": {"loguniform": [1e-4, 10.0]}},
    "KNN": {"K": {"randint": [1, 31]}, "p": [1, 2]},
    "GBT": {
        "n_trees": {"randint": [100, 301]},
        "max_depth": {"randint": [3, 7]},
        "learning_rate": {"uniform": [0.05, 0.15]},
        "subsample": {"uniform": [0.7, 0.3]},
        "min_leaf": {"randint": [5, 31]},
    },
}


class ValidationError(ValueError):
    pass


class DataQualityError(ValueError):
    pass


class CheckFailed(RuntimeError):
    pass


@dataclass
class RunConfig:
    seed: int
    sensor_csv: str | None = None
    cleaning_csv: str | None = None
    weather_csv: str | None = None
    features: list = field(default_factory=lambda: list(DEFAULT_FEATURES))
    required_features: list = field(default_factory=lambda: list(FOULING_FIELDS))
    stepwise_budget: int = 0
    model: str = "GBT"
    space: dict | None = None
    n_configs: int = 1
    folds: int = 5
    train_fraction: float = 0.85
    monotone: list | None = None  # GBT monotone-increasing features; default the fouling features
    bootstrap_resamples: int = 0
    fuel_price: float = 0.5
    cleaning_cost: float | list = 10_000.0
    solver: str = "dp"
    truncate_rows: int | None = None
    monotonicity_samples: int = 1000
    explain_rows: int = 5
    background_size: int = 100
    n_permutations: int = 1000
    winsorize: list = field(default_factory=list)
    winsor_percentiles: list = field(default_factory=lambda: [0.5, 99.5])
    max_reject_fraction: float = 0.05
    out_dir: str | None = None
    bundle: str | None = None
    model_path: str | None = None
    base_dir: str = field(default=".", repr=False)

    @classmethod
    def from_dict(cls, data: dict, base_dir=".") -> "RunConfig":
        known = {f.name for f in fields(cls)} - {"base_dir"}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValidationError(f"unknown config key(s) {unknown}")
        if "seed" not in data or not isinstance(data["seed"], int) or isinstance(data["seed"], bool):
            raise ValidationError("config needs an integer 'seed'")
        cfg = cls(**data, base_dir=str(base_dir))
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        if not path.exists():
            raise ValidationError(f"{path}: config file not found")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(data, path.parent)

    def validate(self):
        if self.model not in MODEL_KINDS:
            raise ValidationError(f"model must be one of {MODEL_KINDS}, got {self.model!r}")
        if self.solver not in ("dp", "brute", "both"):
            raise ValidationError(f"solver must be dp, brute or both, got {self.solver!r}")
        if not 0 < self.train_fraction < 1:
            raise ValidationError("train_fraction must lie in (0, 1)")
        if self.folds < 2:
            raise ValidationError("folds must be >= 2")
        if not np.isfinite(self.fuel_price) or self.fuel_price < 0:
            raise ValidationError("fuel_price must be finite and >= 0")
        costs = np.atleast_1d(np.asarray(self.cleaning_cost, dtype=float))
        if np.any(costs < 0) or not np.all(np.isfinite(costs)):
            raise ValidationError("cleaning_cost must be finite and >= 0")
        unknown = [f for f in self.features if f not in ingest.FEATURE_CATALOG]
        if unknown:
            raise ValidationError(f"unknown feature(s) {unknown}")
        missing = [f for f in self.required_features if f not in self.features]
        if missing:
            raise ValidationError(f"required feature(s) {missing} are not in 'features'")

    def path(self, value) -> Path | None:
        if value is None:
            return None
        p = Path(value)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def require_file(self, name: str) -> Path:
        p = self.path(getattr(self, name))
        if p is None:
            raise ValidationError(f"config key {name!r} is required for this command")
        if not p.exists():
            raise ValidationError(f"{name}: file not found: {p}")
        return p

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("base_dir")
        return d


def _dump(obj, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")


def _time(ts: datetime | None):
    return None if ts is None else ingest.format_time(ts)


# ---- dataset bundle ----------------------------------------------------------

@dataclass
class Bundle:
    schema: FeatureSchema
    X: np.ndarray
    y: np.ndarray
    row_voyage: np.ndarray
    voyages: list
    initial_fouling: FoulingVector
    train_ids: list
    test_ids: list

    def rows_of(self, ids) -> np.ndarray:
        return np.flatnonzero(np.isin(self.row_voyage, list(ids)))


def write_bundle(out: Path, schema: FeatureSchema, X, y, timestamps, profiles, initial_fouling,
                 train_ids, test_ids, extra: dict | None = None) -> None:
    out.mkdir(parents=True, exist_ok=True)
    voyages = []
    lo = 0
    row_vid = []
    for p in profiles:
        voyages.append({
            "id": p.voyage_id,
            "start": _time(p.start_time),
            "end": _time(p.end_time),
            "rows": [lo, lo + p.m],
            "fouling_increment": p.fouling_increment.to_dict(),
        })
        row_vid.extend([p.voyage_id] * p.m)
        lo += p.m
    if lo != len(y):
        raise ValueError("voyage rows do not cover the feature matrix")
    with open(out / "features.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["voyage_id", "timestamp", *schema.names, "foc"])
        for r in range(len(y)):
            ts = "" if timestamps is None else ingest.format_time(timestamps[r])
            w.writerow([row_vid[r], ts, *(repr(float(v)) for v in X[r]), repr(float(y[r]))])
    _dump({
        "schema_version": ARTIFACT_VERSION,
        "kind": "dataset",
        "schema": schema.to_dict(),
        "target": "foc",
        "rows": int(len(y)),
        "features_csv": "features.csv",
        "initial_fouling": initial_fouling.to_dict(),
        "voyages": voyages,
        "split": {"train": list(train_ids), "test": list(test_ids)},
        **(extra or {}),
    }, out / "bundle.json")


def load_bundle(path) -> Bundle:
    path = Path(path)
    meta_path = path / "bundle.json"
    if not meta_path.exists():
        raise ValidationError(f"{path}: no bundle.json (run 'hullclean ingest' first)")
    meta = json.loads(meta_path.read_text())
    if meta.get("schema_version") != ARTIFACT_VERSION or meta.get("kind") != "dataset":
        raise ValidationError(f"{meta_path}: not a version-{ARTIFACT_VERSION} dataset bundle")
    schema = FeatureSchema.from_dict(meta["schema"])
    with open(path / meta["features_csv"], newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[2:-1] != list(schema.names):
            raise ValidationError(f"{path}: features.csv header does not match the bundle schema")
        raw = [row for row in reader]
    vid = np.array([int(r[0]) for r in raw], dtype=np.int64)
    data = np.array([[float(v) for v in r[2:]] for r in raw], dtype=float).reshape(len(raw), len(schema) + 1)
    X, y = data[:, :-1], data[:, -1]
    profiles = []
    for v in meta["voyages"]:
        lo, hi = v["rows"]
        profiles.append(VoyageProfile(
            voyage_id=int(v["id"]),
            rows=X[lo:hi],
            columns=schema.names,
            fouling_increment=FoulingVector.from_dict(v["fouling_increment"]),
            start_time=ingest.parse_time(v["start"]) if v["start"] else None,
            end_time=ingest.parse_time(v["end"]) if v["end"] else None,
        ))
    return Bundle(schema, X, y, vid, profiles, FoulingVector.from_dict(meta["initial_fouling"]),
                  list(meta["split"]["train"]), list(meta["split"]["test"]))


def _out_dir(cfg: RunConfig, args) -> Path:
    if getattr(args, "out", None):
        return Path(args.out)
    if os.environ.get(OUT_DIR_ENV):
        return Path(os.environ[OUT_DIR_ENV])
    return cfg.path(cfg.out_dir) if cfg.out_dir else Path(cfg.base_dir) / "out"


def _bundle_dir(cfg, args, out: Path) -> Path:
    if getattr(args, "bundle", None):
        return Path(args.bundle)
    return cfg.path(cfg.bundle) if cfg.bundle else out / "bundle"


def _model_path(cfg, args, out: Path) -> Path:
    if getattr(args, "model", None):
        return Path(args.model)
    return cfg.path(cfg.model_path) if cfg.model_path else out / "model.json"


# ---- commands ------------------------------------------------------------------

def cmd_ingest(cfg: RunConfig, out: Path) -> dict:
    sensor = cfg.require_file("sensor_csv")
    cleaning = cfg.require_file("cleaning_csv") if cfg.cleaning_csv else None
    weather = cfg.require_file("weather_csv") if cfg.weather_csv else None
    try:
        records, rejects = ingest.parse_sensor_csv(sensor)
        events = ingest.parse_cleaning_csv(cleaning) if cleaning else []
        wx = ingest.parse_weather_csv(weather) if weather else []
    except ingest.IngestError as exc:
        raise DataQualityError(str(exc)) from None
    total = len(records) + len(rejects)
    report = ingest.QualityReport(rejects=len(rejects), reject_reasons=dict(sorted(
        {r: sum(1 for x in rejects if x.reason == r) for r in {x.reason for x in rejects}}.items())))
    if total == 0 or len(rejects) > cfg.max_reject_fraction * total:
        _dump(report.to_dict(), out / "bundle" / "quality.json")
        raise DataQualityError(f"{sensor}: {len(rejects)} of {total} rows rejected "
                               f"(limit {cfg.max_reject_fraction:.1%})")
    records.sort(key=lambda r: r.timestamp)
    schema = ingest.make_schema(cfg.features)
    enc = ingest.EncodeConfig(tuple(cfg.winsorize), *cfg.winsor_percentiles)
    try:
        X, y, fouling, report = ingest.encode_features(records, wx, schema, events, enc, report)
        profiles = ingest.segment_voyages(records, X, schema.names, fouling)
    except (ingest.IngestError, ValueError) as exc:
        raise DataQualityError(str(exc)) from None
    bad = [p.voyage_id for p in profiles if not p.check_increment_consistency()]
    if bad:
        raise DataQualityError(f"voyages {bad} have fouling hours inconsistent with elapsed time")
    if len(profiles) < 2:
        raise DataQualityError(f"need at least 2 voyages, found {len(profiles)}")
    # group rows voyage by voyage so each profile is a contiguous block
    rank = {p.voyage_id: k for k, p in enumerate(profiles)}
    order = np.argsort([rank[r.voyage_id] for r in records], kind="stable")
    train, test = ingest.split_by_voyage(profiles, cfg.train_fraction, cfg.seed)
    first = order[0]
    b0 = np.maximum(fouling.states[first] - fouling.increments[first], 0.0)
    bundle_dir = out / "bundle"
    write_bundle(bundle_dir, schema, X[order], y[order], [records[i].timestamp for i in order], profiles,
                 FoulingVector.from_array(b0), [p.voyage_id for p in train], [p.voyage_id for p in test],
                 {"seed": cfg.seed, "train_fraction": cfg.train_fraction})
    quality = report.to_dict()
    _dump(quality, bundle_dir / "quality.json")
    return {"bundle": str(bundle_dir), "rows": int(len(y)), "voyages": len(profiles),
            "train_voyages": len(train), "test_voyages": len(test), "rejects": len(rejects)}


def cmd_train(cfg: RunConfig, bundle: Bundle, out: Path) -> dict:
    tr = bundle.rows_of(bundle.train_ids)
    te = bundle.rows_of(bundle.test_ids)
    if np.ptp(bundle.y[tr]) == 0 or np.ptp(bundle.y[te]) == 0:
        raise DataQualityError("degenerate target: FOC has zero variance in the train or test split")
    if len(bundle.train_ids) < cfg.folds:
        raise ValidationError(f"{len(bundle.train_ids)} training voyages cannot fill {cfg.folds} folds")
    names = list(bundle.schema.names)
    missing = [f for f in cfg.features if f not in names]
    if missing:
        raise ValidationError(f"bundle lacks configured feature(s) {missing}")
    X, y = bundle.X[tr], bundle.y[tr]
    folds = ingest.row_folds(bundle.row_voyage[tr], cfg.folds, cfg.seed)
    space = parse_space(cfg.space if cfg.space is not None else DEFAULT_SPACES[cfg.model])
    fixed = {}
    if cfg.model == "GBT":
        fixed["monotone"] = list(cfg.monotone if cfg.monotone is not None else cfg.required_features)
    stepwise = None
    if cfg.stepwise_budget > 0:
        candidates = [f for f in cfg.features if f not in cfg.required_features]
        sw = forward_stepwise_select(candidates, cfg.model, folds, cfg.stepwise_budget, X, y, names, space,
                                     cfg.n_configs, cfg.seed, cfg.required_features, fixed)
        selected = sw.features
        stepwise = {"selected": sw.selected, "curve": sw.curve}
    else:
        selected = list(cfg.features)
    idx = [names.index(f) for f in selected]
    schema = bundle.schema.subset(selected)
    search = random_search(cfg.model, space, cfg.n_configs, folds, cfg.seed, X[:, idx], y, schema, fixed)
    model = fit_model(cfg.model, X[:, idx], y, search.best_config, schema, cfg.seed)
    train_report = metrics(y, model.predict(X[:, idx]))
    y_te = bundle.y[te]
    pred_te = model.predict(bundle.X[te][:, idx])
    test_report = metrics(y_te, pred_te)
    if cfg.bootstrap_resamples:
        test_report.ci = bootstrap_ci(y_te, pred_te, cfg.bootstrap_resamples, seed=cfg.seed)
    model_path = out / "model.json"
    out.mkdir(parents=True, exist_ok=True)
    save_model(model, model_path)
    result = {
        "schema_version": ARTIFACT_VERSION,
        "model": cfg.model,
        "features": selected,
        "best_config": search.best_config,
        "cv_rmse": search.best_score,
        "leaderboard": [{"config": c, "cv_rmse": s} for c, s, _ in search.leaderboard],
        "stepwise": stepwise,
        "train": {"rows": int(len(tr)), **train_report.to_dict()},
        "test": {"rows": int(len(te)), **test_report.to_dict()},
    }
    _dump(result, out / "metrics.json")
    return {"model": str(model_path), "test_r2": test_report.r2, "test_rmse": test_report.rmse}


def _model_columns(model, bundle: Bundle) -> list[int]:
    missing = [n for n in model.schema.names if n not in bundle.schema.names]
    if missing:
        raise ValidationError(f"model features {missing} are missing from the bundle (schema mismatch)")
    return [bundle.schema.names.index(n) for n in model.schema.names]


def cmd_explain(cfg: RunConfig, model, bundle: Bundle, out: Path, n_rows: int | None = None) -> dict:
    cols = _model_columns(model, bundle)
    tr = bundle.rows_of(bundle.train_ids)
    te = bundle.rows_of(bundle.test_ids)
    background = xp.sample_background(bundle.X[tr][:, cols], cfg.background_size, cfg.seed)
    n_rows = cfg.explain_rows if n_rows is None else n_rows
    pick = te if len(te) else tr
    chosen = pick[np.linspace(0, len(pick) - 1, min(n_rows, len(pick))).round().astype(int)]
    results = []
    for r in chosen:
        results.append(xp.explain_row(model, bundle.X[r, cols], background, cfg.n_permutations, cfg.seed))
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "attributions.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row", "voyage_id", "feature", "value", "phi", "base_value", "prediction", "mode",
                    "n_permutations"])
        for r, res in zip(chosen, results):
            for name, value, phi in zip(res.features, res.values, res.phi):
                w.writerow([int(r), int(bundle.row_voyage[r]), name, repr(float(value)), repr(float(phi)),
                            repr(res.base_value), repr(res.prediction), res.mode, res.n_permutations])
    dep_dir = out / "dependence"
    dep_dir.mkdir(exist_ok=True)
    names = list(model.schema.names)
    for feat in FOULING_FIELDS:
        if feat not in names:
            continue
        l = names.index(feat)
        with open(dep_dir / f"{feat}.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([feat, f"phi_{feat}"])
            for res in results:
                w.writerow([repr(float(res.values[l])), repr(float(res.phi[l]))])
    phis = np.array([res.phi for res in results])
    summary = {
        "schema_version": ARTIFACT_VERSION,
        "rows": [int(r) for r in chosen],
        "mode": results[0].mode if results else None,
        "n_permutations": results[0].n_permutations if results else 0,
        "background_size": int(len(background)),
        "max_efficiency_gap": max((abs(res.efficiency_gap()) for res in results), default=0.0),
        "max_sampling_residual": max((abs(res.residual) for res in results), default=0.0),
        "mean_phi": {n: float(v) for n, v in zip(names, phis.mean(axis=0))} if results else {},
        "mean_abs_phi": {n: float(v) for n, v in zip(names, np.abs(phis).mean(axis=0))} if results else {},
    }
    _dump(summary, out / "explain.json")
    return {"attributions": str(out / "attributions.csv"), "rows": len(results), "mode": summary["mode"]}


def _cleaning_costs(cfg: RunConfig, n: int, override=None) -> np.ndarray:
    value = override if override is not None else cfg.cleaning_cost
    costs = np.atleast_1d(np.asarray(value, dtype=float))
    if costs.size == 1:
        return np.full(n, float(costs[0]))
    if costs.size != n:
        raise ValidationError(f"{costs.size} cleaning costs for {n} voyages")
    return costs


def cmd_optimize(cfg: RunConfig, model, bundle: Bundle, out: Path, solver: str | None = None,
                 force: bool = False, cleaning_cost=None) -> tuple[dict, str]:
    _model_columns(model, bundle)
    solver = solver or cfg.solver
    inst = ProblemInstance(_cleaning_costs(cfg, len(bundle.voyages), cleaning_cost), bundle.voyages,
                           bundle.initial_fouling, cfg.fuel_price)
    try:
        f = VoyageCostFunction(model, cfg.fuel_price, truncate_rows=cfg.truncate_rows)
    except SchemaMismatchError as exc:
        raise ValidationError(str(exc)) from None
    cert = solve.check_monotonicity(f, inst, cfg.monotonicity_samples, cfg.seed)
    if not cert.passed and not force:
        raise ValidationError(
            f"monotonicity check failed after {cert.samples} samples "
            f"(counterexample on voyage index {cert.counterexample['voyage']}); rerun with --force to override"
        )
    runs, times = {}, {}
    if solver in ("dp", "both"):
        counter = solve.CallCounter()
        runs["dp"], times["dp"] = solve.timed(solve.dp_optimize, inst, f, counter)
    if solver in ("brute", "both"):
        if inst.n > solve.BRUTE_FORCE_CAP and solver == "both" and force:
            runs["brute_force"] = None
        else:
            counter = solve.CallCounter()
            runs["brute_force"], times["brute_force"] = solve.timed(solve.brute_force, inst, f, counter)
    chosen = runs.get("dp") or runs["brute_force"]
    agreement = None
    if runs.get("dp") is not None and runs.get("brute_force") is not None:
        a, b = runs["dp"].objective, runs["brute_force"].objective
        agreement = abs(a - b) <= 1e-9 * max(abs(a), abs(b), 1.0)
    report = solve.savings_report(inst, f, chosen)
    report = {
        "schema_version": ARTIFACT_VERSION,
        **report,
        "Fuel price (USD/kg)": cfg.fuel_price,
        "Cleaning cost (USD)": [float(c) for c in inst.cleaning_costs],
        "Solvers": {
            name: ({"status": "skipped: n above brute-force cap"} if s is None else
                   {"objective": s.objective, "z": list(s.decisions), "calls": s.calls})
            for name, s in runs.items()
        },
        "Solvers agree": agreement,
        "Monotonicity check": {**cert.to_dict(), "forced": bool(force and not cert.passed)},
    }
    out.mkdir(parents=True, exist_ok=True)
    _dump(report, out / "report.json")
    with open(out / "schedule.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["voyage_id", "start", "clean_before", "fuel_cost", *FOULING_FIELDS])
        for v, z, cost, b in zip(inst.voyages, chosen.decisions, chosen.fuel_cost_per_voyage,
                                 chosen.fouling_trajectory):
            w.writerow([v.voyage_id, _time(v.start_time) or "", z, repr(cost), *(repr(x) for x in b.to_array())])
    if agreement is False:
        raise CheckFailed(f"solvers disagree: dp {runs['dp'].objective!r} vs brute force "
                          f"{runs['brute_force'].objective!r}")
    return report, _summary(report, times)


def _fmt_num(x):
    return f"{x:,.2f}" if isinstance(x, float) else str(x)


def _summary(report: dict, times: dict) -> str:
    opt = report["Optimized"]
    base = report["No additional cleaning"]
    lines = [
        f"Number of voyages      {report['Number of voyages']}",
        f"Hours of sailing       {report['Hours of sailing']}",
        f"Start date             {report['Start date']}",
        f"End date               {report['End date']}",
        "No additional cleaning",
        f"  Fuel (kg)            {_fmt_num(base['Fuel (kg)'])}",
        f"  Cost ($)             {_fmt_num(base['Cost ($)'])}",
        opt["label"],
        f"  Number of cleanings  {opt['Number of cleanings']}",
        f"  Cleaning dates       {', '.join(opt['Cleaning dates']) or '-'}",
        f"  Fuel (kg)            {_fmt_num(opt['Fuel (kg)'])}",
        f"  Cost ($)             {_fmt_num(opt['Cost ($)'])}",
        f"  Δ Fuel (kg)          {_fmt_num(opt['Δ Fuel (kg)'])}",
        f"  Δ Fuel (%)           {opt['Δ Fuel (%)']:.2f}",
        f"  Δ Cost ($)           {_fmt_num(opt['Δ Cost ($)'])}",
        f"  Δ Cost (%)           {opt['Δ Cost (%)']:.2f}",
    ]
    for name, info in report["Solvers"].items():
        if "calls" in info:
            lines.append(f"Solver {name}: objective {info['objective']:,.6f}, {info['calls']} cost calls, "
                         f"{times.get(name, 0.0):.3f} s")
        else:
            lines.append(f"Solver {name}: {info['status']}")
    if report["Solvers agree"] is not None:
        lines.append("Solvers agree on the optimal objective" if report["Solvers agree"] else "SOLVERS DISAGREE")
    return "\n".join(lines)


def cmd_generate(out: Path, seed: int, n_voyages: int, params: synth.FleetParams | None = None) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    records, cleanings, weather = synth.generate_fleet(seed, n_voyages, params)
    ingest.write_sensor_csv(records, out / "sensor.csv")
    ingest.write_cleaning_csv(cleanings, out / "cleaning.csv")
    ingest.write_weather_csv(weather, out / "weather.csv")
    cfg = {
        "seed": seed,
        "sensor_csv": "sensor.csv",
        "cleaning_csv": "cleaning.csv",
        "weather_csv": "weather.csv",
        "out_dir": "out",
    }
    _dump(cfg, out / "config.json")
    return {"config": str(out / "config.json"), "rows": len(records), "voyages": n_voyages}


def cmd_generate_reference(out: Path, seed: int) -> dict:
    """Five-voyage demo instance with its known physics model."""
    inst, f = synth.reference_instance()
    model = f.predictor
    X = np.vstack([v.rows for v in inst.voyages])
    y = model.predict(X)
    train, test = ingest.split_by_voyage(list(inst.voyages), 0.85, seed)
    write_bundle(out / "bundle", model.schema, X, y, None, inst.voyages, inst.initial_fouling,
                 [p.voyage_id for p in train], [p.voyage_id for p in test], {"seed": seed})
    save_model(model, out / "model.json")
    cfg = {
        "seed": seed,
        "features": list(synth.PHYSICS_COLUMNS),
        "required_features": ["dsddm"],
        "fuel_price": synth.REFERENCE_PRICE,
        "cleaning_cost": list(synth.REFERENCE_COSTS),
        "solver": "both",
        "out_dir": ".",
    }
    _dump(cfg, out / "config.json")
    return {"config": str(out / "config.json"), "voyages": inst.n}


# ---- argument parsing ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hullclean", description="Hull-cleaning schedule optimization pipeline")
    sub = p.add_subparsers(dest="command", required=True)

    def with_config(sp):
        sp.add_argument("--config", required=True, help="JSON run configuration")
        sp.add_argument("--out", help="output directory (overrides config and $" + OUT_DIR_ENV + ")")
        return sp

    with_config(sub.add_parser("ingest", help="parse CSVs into a dataset bundle"))
    sp = with_config(sub.add_parser("train", help="select, tune and fit a predictor"))
    sp.add_argument("--bundle")
    sp = with_config(sub.add_parser("explain", help="Shapley attributions for test rows"))
    sp.add_argument("--bundle")
    sp.add_argument("--model")
    sp.add_argument("--rows", type=int)
    sp = with_config(sub.add_parser("optimize", help="optimal cleaning schedule and savings report"))
    sp.add_argument("--bundle")
    sp.add_argument("--model")
    sp.add_argument("--solver", choices=("dp", "brute", "both"))
    sp.add_argument("--cleaning-cost", type=float)
    sp.add_argument("--force", action="store_true",
                    help="continue when the monotonicity check fails; skip brute force above its cap")
    sp = sub.add_parser("generate", help="write a synthetic fleet (or the reference demo) with a config")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--n-voyages", type=int, default=20)
    sp.add_argument("--out", required=True)
    sp.add_argument("--noise", type=float, default=0.05)
    sp.add_argument("--fouling-coeff", type=float, default=0.5)
    sp.add_argument("--demo", choices=("reference",))
    sp = sub.add_parser("reduce-check", help="knapsack reduction equivalence campaign")
    sp.add_argument("--instances", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--min-size", type=int, default=2)
    sp.add_argument("--max-size", type=int, default=10)
    sp.add_argument("--penalty", choices=("terminal", "every_prefix"), default="terminal")
    sp.add_argument("--out")
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cmd = args.command
    if cmd == "generate":
        if args.n_voyages < 1:
            raise ValidationError("--n-voyages must be >= 1")
        out = Path(args.out)
        if args.demo == "reference":
            info = cmd_generate_reference(out, args.seed)
        else:
            params = synth.FleetParams(fouling_coeff=args.fouling_coeff, noise=args.noise)
            info = cmd_generate(out, args.seed, args.n_voyages, params)
        print(json.dumps(info))
        return EXIT_OK
    if cmd == "reduce-check":
        result = reduce.equivalence_campaign(args.instances, (args.min_size, args.max_size), args.seed,
                                             args.penalty)
        if args.out:
            _dump(result, Path(args.out) / "reduce_check.json")
        print(json.dumps(result))
        return EXIT_OK if result["agreements"] == result["instances"] else EXIT_CHECK
    cfg = RunConfig.load(args.config)
    out = _out_dir(cfg, args)
    if cmd == "ingest":
        info = cmd_ingest(cfg, out)
    elif cmd == "train":
        info = cmd_train(cfg, load_bundle(_bundle_dir(cfg, args, out)), out)
    else:
        model_path = _model_path(cfg, args, out)
        if not model_path.exists():
            raise ValidationError(f"model file not found: {model_path}")
        model = load_model(model_path)
        bundle = load_bundle(_bundle_dir(cfg, args, out))
        if cmd == "explain":
            info = cmd_explain(cfg, model, bundle, out, args.rows)
        else:
            _, summary = cmd_optimize(cfg, model, bundle, out, args.solver, args.force, args.cleaning_cost)
            print(summary)
            return EXIT_OK
    print(json.dumps(info))
    return EXIT_OK


def main(argv=None) -> int:
    try:
        return run(argv)
    except solve.SolverRefusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSAL
    except (DataQualityError, ingest.IngestError) as exc:
        print(f"data-quality error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except (ValidationError, SchemaMismatchError, ValueError, KeyError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
