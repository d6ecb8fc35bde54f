"""Sensor, cleaning-report and weather ingestion plus feature engineering.

All timestamps are ISO 8601 UTC. Rows are hourly; a voyage is the set of
rows sharing a ``voyage_id``.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from hullclean.core import FOULING_FIELDS, FOULING_UNITS, FeatureSchema, FoulingVector, VoyageProfile

HOUR = 3600.0


class IngestError(ValueError):
    pass


class FuelType(str, Enum):
    HFO = "HFO"
    LFO = "LFO"
    LSHFO = "LSHFO"
    MGO = "MGO"


class CleaningKind(str, Enum):
    DDM = "DDM"
    IWS = "IWS"


SENSOR_COLUMNS = (
    "voyage_id", "imo_number", "date_time", "latitude", "longitude", "foc", "sog", "stw",
    "cargo_loaded", "draught", "trim", "wuk", "cog", "wind_speed", "wind_direction",
    "fuel_oil_type", "propeller_shaft", "pitch_propeller",
)
SENSOR_MANDATORY = ("voyage_id", "date_time", "fuel_oil_type")
WEATHER_COLUMNS = (
    "time", "latitude", "longitude", "weather_code", "temperature_2m", "wind_speed_10m",
    "wind_direction_10m", "wave_height", "wave_direction", "wave_period",
    "ocean_current_velocity", "ocean_current_direction",
)
# csv column -> HourlyRecord attribute
_SENSOR_NUMERIC = {
    "latitude": "lat", "longitude": "lon", "foc": "foc", "sog": "sog", "stw": "stw",
    "cargo_loaded": "cargo", "draught": "draught", "trim": "trim", "wuk": "wuk", "cog": "cog",
    "wind_speed": "wind_speed", "wind_direction": "wind_dir", "propeller_shaft": "shaft_rpm",
    "pitch_propeller": "pitch",
}


def parse_time(text: str) -> datetime:
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def format_time(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class HourlyRecord:
    timestamp: datetime
    voyage_id: int
    imo: int
    lat: float
    lon: float
    foc: float
    sog: float
    stw: float
    cargo: float
    draught: float
    trim: float
    wuk: float
    cog: float
    wind_speed: float
    wind_dir: float
    fuel_type: FuelType
    shaft_rpm: float
    pitch: float


@dataclass(frozen=True)
class CleaningEvent:
    timestamp: datetime
    kind: CleaningKind


@dataclass(frozen=True)
class WeatherRecord:
    timestamp: datetime
    lat: float
    lon: float
    temperature_2m: float
    wind_speed_10m: float
    wind_dir_10m: float
    wave_height: float
    wave_dir: float
    wave_period: float
    current_velocity: float
    current_dir: float
    weather_code: float


@dataclass(frozen=True)
class Reject:
    line: int
    reason: str


def _read_rows(path, required: Sequence[str]):
    path = Path(path)
    if not path.exists():
        raise IngestError(f"{path}: file not found")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise IngestError(f"{path}: missing mandatory column(s) {missing}")
        for lineno, row in enumerate(reader, start=2):
            yield lineno, row


def _num(text):
    text = (text or "").strip()
    if text == "" or text.lower() == "nan":
        return math.nan
    return float(text)


def _timestamp(path, lineno, text):
    try:
        return parse_time(text)
    except (ValueError, TypeError):
        raise IngestError(f"{path}:{lineno}: malformed timestamp {text!r}") from None


def parse_sensor_csv(path) -> tuple[list[HourlyRecord], list[Reject]]:
    """Parse an hourly sensor export; bad rows are returned as rejects with a reason."""
    records, rejects = [], []
    for lineno, row in _read_rows(path, SENSOR_MANDATORY):
        ts = _timestamp(path, lineno, row["date_time"])
        fuel = (row.get("fuel_oil_type") or "").strip().upper()
        if fuel not in FuelType.__members__:
            rejects.append(Reject(lineno, "unknown fuel type"))
            continue
        try:
            voyage = int(row["voyage_id"])
            imo = int(row["imo_number"]) if (row.get("imo_number") or "").strip() else 0
            values = {attr: _num(row.get(col)) for col, attr in _SENSOR_NUMERIC.items()}
        except ValueError:
            rejects.append(Reject(lineno, "unparseable number"))
            continue
        reason = _sensor_violation(values)
        if reason:
            rejects.append(Reject(lineno, reason))
            continue
        records.append(HourlyRecord(timestamp=ts, voyage_id=voyage, imo=imo, fuel_type=FuelType(fuel), **values))
    return records, rejects


def _sensor_violation(v: dict) -> str | None:
    for name in ("foc", "sog", "stw"):
        if v[name] < 0:
            return f"negative {name}"
    for name in ("cog", "wind_dir"):
        if not math.isnan(v[name]) and not 0 <= v[name] < 360:
            return f"{name} outside [0, 360)"
    return None


def parse_cleaning_csv(path) -> list[CleaningEvent]:
    events = []
    for lineno, row in _read_rows(path, ("timestamp", "kind")):
        ts = _timestamp(path, lineno, row["timestamp"])
        kind = row["kind"].strip().upper()
        if kind not in CleaningKind.__members__:
            raise IngestError(f"{path}:{lineno}: unknown cleaning kind {row['kind']!r}")
        events.append(CleaningEvent(ts, CleaningKind(kind)))
    for prev, nxt in zip(events, events[1:]):
        if nxt.timestamp <= prev.timestamp:
            raise IngestError(f"{path}: cleaning timestamps must be strictly increasing")
    return events


def parse_weather_csv(path) -> list[WeatherRecord]:
    out = []
    for lineno, row in _read_rows(path, WEATHER_COLUMNS):
        ts = _timestamp(path, lineno, row["time"])
        try:
            rec = WeatherRecord(
                timestamp=ts,
                lat=_num(row["latitude"]),
                lon=_num(row["longitude"]),
                temperature_2m=_num(row["temperature_2m"]),
                wind_speed_10m=_num(row["wind_speed_10m"]),
                wind_dir_10m=_num(row["wind_direction_10m"]),
                wave_height=_num(row["wave_height"]),
                wave_dir=_num(row["wave_direction"]),
                wave_period=_num(row["wave_period"]),
                current_velocity=_num(row["ocean_current_velocity"]),
                current_dir=_num(row["ocean_current_direction"]),
                weather_code=_num(row["weather_code"]),
            )
        except ValueError:
            raise IngestError(f"{path}:{lineno}: unparseable weather value") from None
        if rec.wave_height < 0:
            raise IngestError(f"{path}:{lineno}: negative wave height")
        out.append(rec)
    return out


def relative_force(v, theta_course, theta_force):
    """Signed component of a wind/current speed along the course: v * cos(|course - force|)."""
    delta = np.radians(np.abs(np.asarray(theta_course, dtype=float) - np.asarray(theta_force, dtype=float)))
    out = np.asarray(v, dtype=float) * np.cos(delta)
    return float(out) if out.ndim == 0 else out


@dataclass
class FoulingFeatures:
    states: np.ndarray  # (m, 7) state at each row
    increments: np.ndarray  # (m, 7) what each row itself added


def speed_band(stw: float) -> int:
    """Index into (has0, has6, has9, has12) for bands [0,1], (1,6], (6,9], (9,inf)."""
    if stw <= 1.0:
        return 0
    if stw <= 6.0:
        return 1
    if stw <= 9.0:
        return 2
    return 3


def derive_fouling_features(records: Sequence[HourlyRecord], cleanings: Sequence[CleaningEvent] = (),
                            gap_threshold: float = 1.5) -> FoulingFeatures:
    """Per-row fouling state since the last cleaning.

    dsddm counts days since the last DDM, dsiws days since the last IWS or
    DDM; hour counters reset at either kind. A row covers the time since the
    previous row (or since the cleaning, if one came in between): spacings up
    to ``gap_threshold`` hours go to the row's speed band, longer gaps put one
    hour in the band and the excess in ``hu``. Before any cleaning, time is
    counted from one hour before the first row.
    """
    for a, b in zip(records, records[1:]):
        if b.timestamp < a.timestamp:
            raise IngestError("records must be sorted by timestamp")
    for a, b in zip(cleanings, cleanings[1:]):
        if b.timestamp < a.timestamp:
            raise IngestError("cleanings must be sorted by timestamp")
    m = len(records)
    states = np.zeros((m, 7))
    incs = np.zeros((m, 7))
    if m == 0:
        return FoulingFeatures(states, incs)
    origin = records[0].timestamp - timedelta(hours=1)
    last_ddm = last_clean = origin
    hours = np.zeros(5)  # hu, has0, has6, has9, has12
    prev_ts = None
    ci = 0
    for r, rec in enumerate(records):
        ddm_ref = clean_ref = prev_ts
        while ci < len(cleanings) and cleanings[ci].timestamp <= rec.timestamp:
            ev = cleanings[ci]
            last_clean = ev.timestamp
            clean_ref = ev.timestamp if clean_ref is None else max(clean_ref, ev.timestamp)
            hours[:] = 0.0
            if ev.kind == CleaningKind.DDM:
                last_ddm = ev.timestamp
                ddm_ref = ev.timestamp if ddm_ref is None else max(ddm_ref, ev.timestamp)
            ci += 1
        delta = 1.0 if clean_ref is None else (rec.timestamp - clean_ref).total_seconds() / HOUR
        ddm_delta = 1.0 if ddm_ref is None else (rec.timestamp - ddm_ref).total_seconds() / HOUR
        own = np.zeros(5)
        band = 1 + speed_band(rec.stw)
        if delta > gap_threshold:
            own[0] = delta - 1.0
            own[band] = 1.0
        else:
            own[band] = delta
        hours += own
        states[r, 0] = (rec.timestamp - last_ddm).total_seconds() / HOUR / 24.0
        states[r, 1] = (rec.timestamp - last_clean).total_seconds() / HOUR / 24.0
        states[r, 2:] = hours
        incs[r, 0] = ddm_delta / 24.0
        incs[r, 1] = delta / 24.0
        incs[r, 2:] = own
        prev_ts = rec.timestamp
    return FoulingFeatures(states, incs)


SEASONS = {3: "spring", 4: "spring", 5: "spring", 6: "summer", 7: "summer", 8: "summer",
           9: "autumn", 10: "autumn", 11: "autumn"}

# name -> (unit, source)
FEATURE_CATALOG = {
    "sog": ("kn", "sensor:sog"),
    "stw": ("kn", "sensor:stw"),
    "sog_lag1": ("kn", "lag1(sog)"),
    "stw_lag1": ("kn", "lag1(stw)"),
    "cargo": ("t", "sensor:cargo_loaded"),
    "draught": ("m", "sensor:draught"),
    "trim": ("m", "sensor:trim"),
    "wuk": ("m", "sensor:wuk"),
    "shaft_rpm": ("rpm", "sensor:propeller_shaft"),
    "pitch": ("%", "sensor:pitch_propeller"),
    "wind_speed": ("m/s", "sensor:wind_speed"),
    "temperature_2m": ("degC", "weather:temperature_2m"),
    "wave_height": ("m", "weather:wave_height"),
    "wave_period": ("s", "weather:wave_period"),
    "r_wind": ("m/s", "relative_force(wind_speed_10m, cog, wind_direction_10m)"),
    "r_current": ("m/s", "relative_force(ocean_current_velocity, cog, ocean_current_direction)"),
    "draught_plus_wave_height": ("m", "draught + wave_height"),
    "lfo": ("1", "onehot(fuel_oil_type=LFO; ref HFO)"),
    "lshfo": ("1", "onehot(fuel_oil_type=LSHFO; ref HFO)"),
    "mgo": ("1", "onehot(fuel_oil_type=MGO; ref HFO)"),
    "spring": ("1", "onehot(season=spring; ref winter)"),
    "summer": ("1", "onehot(season=summer; ref winter)"),
    "autumn": ("1", "onehot(season=autumn; ref winter)"),
    **{name: (FOULING_UNITS[name], f"fouling:{name}") for name in FOULING_FIELDS},
}
DEFAULT_FEATURES = tuple(FEATURE_CATALOG)


def make_schema(names: Sequence[str] = DEFAULT_FEATURES) -> FeatureSchema:
    unknown = [n for n in names if n not in FEATURE_CATALOG]
    if unknown:
        raise IngestError(f"unknown feature(s) {unknown}")
    return FeatureSchema(
        tuple(names),
        {n: FEATURE_CATALOG[n][0] for n in names},
        {n: FEATURE_CATALOG[n][1] for n in names},
    )


@dataclass
class EncodeConfig:
    winsorize: tuple = ()
    winsor_low: float = 0.5  # percentiles
    winsor_high: float = 99.5
    weather_tolerance_hours: float = 1.0
    gap_threshold_hours: float = 1.5


@dataclass
class QualityReport:
    rejects: int = 0
    reject_reasons: dict = field(default_factory=dict)
    imputed: dict = field(default_factory=dict)
    winsorized: dict = field(default_factory=dict)
    weather_unmatched: int = 0

    def to_dict(self):
        return {
            "schema_version": 1,
            "rejects": self.rejects,
            "reject_reasons": dict(sorted(self.reject_reasons.items())),
            "imputed": dict(sorted(self.imputed.items())),
            "winsorized": dict(sorted(self.winsorized.items())),
            "weather_unmatched": self.weather_unmatched,
        }


def winsorize(values: np.ndarray, low: float, high: float) -> tuple[np.ndarray, int]:
    """Clamp to the [low, high] percentiles (linear interpolation); returns clip count."""
    lo, hi = np.percentile(values, [low, high])
    clipped = np.clip(values, lo, hi)
    return clipped, int(np.sum(clipped != values))


def join_weather(records: Sequence[HourlyRecord], weather: Sequence[WeatherRecord],
                 tolerance_hours: float = 1.0) -> list[WeatherRecord | None]:
    """Nearest weather record within the time tolerance, closest position first."""
    if not weather:
        return [None] * len(records)
    order = sorted(range(len(weather)), key=lambda i: weather[i].timestamp)
    w_sorted = [weather[i] for i in order]
    times = np.array([w.timestamp.timestamp() for w in w_sorted])
    lats = np.array([w.lat for w in w_sorted])
    lons = np.array([w.lon for w in w_sorted])
    tol = tolerance_hours * HOUR
    out = []
    for rec in records:
        t = rec.timestamp.timestamp()
        lo = np.searchsorted(times, t - tol, side="left")
        hi = np.searchsorted(times, t + tol, side="right")
        if lo >= hi:
            out.append(None)
            continue
        dlon = (lons[lo:hi] - rec.lon + 180.0) % 360.0 - 180.0
        dist = (lats[lo:hi] - rec.lat) ** 2 + (dlon * math.cos(math.radians(rec.lat))) ** 2
        if np.isnan(rec.lat) or np.isnan(rec.lon):
            dist = np.zeros(hi - lo)
        dt = np.abs(times[lo:hi] - t)
        best = np.lexsort((dt, dist))[0]
        out.append(w_sorted[lo + best])
    return out


def _impute(raw: dict, voyage_ids: np.ndarray, report: QualityReport) -> None:
    """Forward-fill within each voyage, then per-column median; counts per column."""
    starts = np.r_[True, voyage_ids[1:] != voyage_ids[:-1]]
    for name, col in raw.items():
        nan = np.isnan(col)
        if not nan.any():
            continue
        report.imputed[name] = int(nan.sum())
        med = float(np.median(col[~nan])) if (~nan).any() else 0.0  # of observed values only
        for i in range(1, len(col)):
            if nan[i] and not starts[i] and not np.isnan(col[i - 1]):
                col[i] = col[i - 1]
        col[np.isnan(col)] = med


def encode_features(records: Sequence[HourlyRecord], weather: Sequence[WeatherRecord],
                    schema: FeatureSchema | None = None, cleanings: Sequence[CleaningEvent] = (),
                    config: EncodeConfig | None = None, report: QualityReport | None = None):
    """Feature matrix (columns in schema order), FOC target, fouling features and quality report."""
    config = config or EncodeConfig()
    schema = schema or make_schema()
    report = report or QualityReport()
    unknown = [n for n in schema.names if n not in FEATURE_CATALOG]
    if unknown:
        raise IngestError(f"schema requests unknown column(s) {unknown}")
    m = len(records)
    vid = np.array([r.voyage_id for r in records], dtype=np.int64)
    matched = join_weather(records, weather, config.weather_tolerance_hours)
    report.weather_unmatched = sum(w is None for w in matched)

    def wcol(attr):
        return np.array([getattr(w, attr) if w is not None else math.nan for w in matched], dtype=float)

    raw = {attr: np.array([getattr(r, attr) for r in records], dtype=float)
           for attr in ("foc", "sog", "stw", "cargo", "draught", "trim", "wuk", "cog", "wind_speed",
                        "shaft_rpm", "pitch")}
    for attr in ("temperature_2m", "wave_height", "wave_period", "wind_speed_10m", "wind_dir_10m",
                 "current_velocity", "current_dir"):
        raw[attr] = wcol(attr)
    _impute(raw, vid, report)

    # fouling needs a complete stw column
    imputed_records = [
        _with_stw(r, s) for r, s in zip(records, raw["stw"])
    ] if "stw" in report.imputed else records
    fouling = derive_fouling_features(imputed_records, cleanings, config.gap_threshold_hours)

    starts = np.r_[True, vid[1:] != vid[:-1]] if m else np.zeros(0, dtype=bool)
    cols = {
        "sog": raw["sog"], "stw": raw["stw"], "cargo": raw["cargo"], "draught": raw["draught"],
        "trim": raw["trim"], "wuk": raw["wuk"], "shaft_rpm": raw["shaft_rpm"], "pitch": raw["pitch"],
        "wind_speed": raw["wind_speed"], "temperature_2m": raw["temperature_2m"],
        "wave_height": raw["wave_height"], "wave_period": raw["wave_period"],
        "sog_lag1": _lag(raw["sog"], starts), "stw_lag1": _lag(raw["stw"], starts),
        "r_wind": relative_force(raw["wind_speed_10m"], raw["cog"], raw["wind_dir_10m"]) if m else np.zeros(0),
        "r_current": relative_force(raw["current_velocity"], raw["cog"], raw["current_dir"]) if m else np.zeros(0),
        "draught_plus_wave_height": raw["draught"] + raw["wave_height"],
    }
    fuel = [r.fuel_type for r in records]
    for ft in (FuelType.LFO, FuelType.LSHFO, FuelType.MGO):
        cols[ft.value.lower()] = np.array([f == ft for f in fuel], dtype=float)
    season = [SEASONS.get(r.timestamp.month, "winter") for r in records]
    for s in ("spring", "summer", "autumn"):
        cols[s] = np.array([x == s for x in season], dtype=float)
    for k, name in enumerate(FOULING_FIELDS):
        cols[name] = fouling.states[:, k]

    for name in config.winsorize:
        if name not in cols:
            raise IngestError(f"cannot winsorize unknown column {name!r}")
        if m:
            cols[name], n_clip = winsorize(cols[name], config.winsor_low, config.winsor_high)
            report.winsorized[name] = n_clip

    X = np.column_stack([cols[n] for n in schema.names]) if m else np.zeros((0, len(schema)))
    return X, raw["foc"].copy(), fouling, report


def _lag(col: np.ndarray, starts: np.ndarray) -> np.ndarray:
    """Previous row's value; the first row of each voyage lags itself."""
    out = np.empty_like(col)
    if len(col) == 0:
        return out
    out[1:] = col[:-1]
    out[starts] = col[starts]
    return out


def _with_stw(rec: HourlyRecord, stw: float) -> HourlyRecord:
    d = rec.__dict__.copy()
    d["stw"] = float(stw)
    return HourlyRecord(**d)


def segment_voyages(records: Sequence[HourlyRecord], features: np.ndarray | None = None,
                    columns: Sequence[str] = (), fouling: FoulingFeatures | None = None) -> list[VoyageProfile]:
    """One profile per voyage_id, in order of first appearance.

    The fouling increment of a voyage is the sum of what its rows added.
    Without ``features`` the rows are the fouling states themselves.
    """
    if not records:
        return []
    if fouling is None:
        fouling = derive_fouling_features(records)
    if features is None:
        features, columns = fouling.states, FOULING_FIELDS
    groups: dict[int, list[int]] = {}
    for i, r in enumerate(records):
        groups.setdefault(r.voyage_id, []).append(i)
    out = []
    for vid, idx in groups.items():
        idx = np.array(idx)
        inc = np.maximum(fouling.increments[idx].sum(axis=0), 0.0)
        first = records[idx[0]]
        last = records[idx[-1]]
        own_first = fouling.increments[idx[0], 1] * 24.0
        out.append(VoyageProfile(
            voyage_id=int(vid),
            rows=features[idx],
            columns=tuple(columns),
            fouling_increment=FoulingVector.from_array(inc),
            start_time=first.timestamp - timedelta(hours=own_first),
            end_time=last.timestamp,
        ))
    return out


def _split_ids(ids: Sequence[int], sizes: Sequence[int], train_fraction: float, seed: int):
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(ids))
    total = float(sum(sizes))
    cum = np.cumsum([sizes[i] for i in order]) / total
    # number of voyages whose cumulative row share is closest to the target
    k = int(np.argmin(np.abs(cum - train_fraction))) + 1
    k = min(max(k, 1), len(ids) - 1)
    train = {ids[i] for i in order[:k]}
    return train


def split_by_voyage(profiles: Sequence[VoyageProfile], train_fraction: float = 0.85, seed: int = 0):
    """Voyage-atomic train/test split; both parts keep chronological order."""
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must lie in (0, 1)")
    if len(profiles) < 2:
        raise ValueError("need at least two voyages to split")
    ids = [p.voyage_id for p in profiles]
    train_ids = _split_ids(ids, [p.m for p in profiles], train_fraction, seed)
    train = [p for p in profiles if p.voyage_id in train_ids]
    test = [p for p in profiles if p.voyage_id not in train_ids]
    return train, test


def kfold_ids(ids: Sequence[int], folds: int, seed: int) -> list[list[int]]:
    """Partition voyage ids into ``folds`` validation groups."""
    if folds < 2:
        raise ValueError("folds must be >= 2")
    if len(ids) < folds:
        raise ValueError(f"{len(ids)} voyages cannot fill {folds} folds")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(ids))
    return [sorted(ids[i] for i in part) for part in np.array_split(order, folds)]


def kfold_by_voyage(profiles: Sequence[VoyageProfile], folds: int = 5, seed: int = 0):
    groups = kfold_ids([p.voyage_id for p in profiles], folds, seed)
    out = []
    for val_ids in groups:
        val_set = set(val_ids)
        out.append(([p for p in profiles if p.voyage_id not in val_set],
                    [p for p in profiles if p.voyage_id in val_set]))
    return out


def row_folds(row_voyage_ids: np.ndarray, folds: int, seed: int):
    """(train_idx, val_idx) row-index pairs for voyage-atomic k-fold CV."""
    row_voyage_ids = np.asarray(row_voyage_ids)
    ids = list(dict.fromkeys(row_voyage_ids.tolist()))
    out = []
    for val_ids in kfold_ids(ids, folds, seed):
        mask = np.isin(row_voyage_ids, val_ids)
        out.append((np.flatnonzero(~mask), np.flatnonzero(mask)))
    return out


def _fmt(x: float) -> str:
    return "" if math.isnan(x) else repr(float(x))


def write_sensor_csv(records: Sequence[HourlyRecord], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SENSOR_COLUMNS)
        for r in records:
            w.writerow([
                r.voyage_id, r.imo, format_time(r.timestamp), _fmt(r.lat), _fmt(r.lon), _fmt(r.foc),
                _fmt(r.sog), _fmt(r.stw), _fmt(r.cargo), _fmt(r.draught), _fmt(r.trim), _fmt(r.wuk),
                _fmt(r.cog), _fmt(r.wind_speed), _fmt(r.wind_dir), r.fuel_type.value, _fmt(r.shaft_rpm),
                _fmt(r.pitch),
            ])


def write_cleaning_csv(events: Sequence[CleaningEvent], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["timestamp", "kind"])
        for e in events:
            w.writerow([format_time(e.timestamp), e.kind.value])


def write_weather_csv(weather: Sequence[WeatherRecord], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(WEATHER_COLUMNS)
        for r in weather:
            w.writerow([
                format_time(r.timestamp), _fmt(r.lat), _fmt(r.lon), _fmt(r.weather_code),
                _fmt(r.temperature_2m), _fmt(r.wind_speed_10m), _fmt(r.wind_dir_10m), _fmt(r.wave_height),
                _fmt(r.wave_dir), _fmt(r.wave_period), _fmt(r.current_velocity), _fmt(r.current_dir),
            ])
