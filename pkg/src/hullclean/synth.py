"""Synthetic instances and fleets with known consumption physics.

Everything here is seeded; the fleet generator labels FOC with the
SyntheticPhysics form so that downstream models have a known target.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import timedelta

import numpy as np

from hullclean.core import FeatureSchema, FoulingVector, ProblemInstance, VoyageProfile
from hullclean.ingest import (
    CleaningEvent,
    CleaningKind,
    FuelType,
    HourlyRecord,
    WeatherRecord,
    derive_fouling_features,
    parse_time,
)
from hullclean.predict.cost import VoyageCostFunction
from hullclean.predict.physics import SyntheticPhysicsPredictor

PHYSICS_COLUMNS = ("stw", "draught_plus_wave_height", "dsddm")

# five voyages of ten hourly rows: (speed through water kn, draught + wave height m)
REFERENCE_STW = (
    (8.5, 9.2, 10.0, 11.3, 12.1, 10.8, 9.7, 11.9, 13.0, 12.4),
    (9.0, 9.6, 10.4, 11.0, 12.0, 12.3, 11.1, 12.7, 13.2, 12.8),
    (8.2, 8.9, 9.5, 10.1, 10.7, 10.3, 9.6, 10.8, 11.5, 11.0),
    (9.5, 10.2, 10.8, 11.6, 12.5, 12.0, 11.3, 12.9, 13.5, 13.0),
    (8.8, 9.4, 10.1, 10.9, 11.7, 11.2, 10.5, 11.8, 12.6, 12.1),
)
REFERENCE_LOAD = (
    (9.8, 10.1, 10.0, 10.4, 10.6, 10.3, 10.2, 10.7, 10.9, 10.8),
    (9.7, 9.9, 10.0, 10.1, 10.2, 10.1, 9.8, 10.3, 10.4, 10.2),
    (10.0, 10.3, 10.5, 10.7, 10.8, 10.6, 10.4, 10.9, 11.0, 10.8),
    (9.6, 9.8, 10.0, 10.1, 10.2, 10.0, 9.9, 10.3, 10.4, 10.2),
    (9.9, 10.0, 10.2, 10.3, 10.5, 10.4, 10.1, 10.6, 10.7, 10.5),
)
REFERENCE_COSTS = (45_000.0, 44_000.0, 39_000.0, 36_000.0, 42_000.0)
REFERENCE_B0 = 100.0
REFERENCE_INCREMENT = 25.0
REFERENCE_PRICE = 0.493
REFERENCE_FOULING_COEFF = 36.0


def physics_voyage(voyage_id: int, stw, load, increment: float) -> VoyageProfile:
    rows = np.column_stack([np.asarray(stw, float), np.asarray(load, float), np.zeros(len(stw))])
    return VoyageProfile(voyage_id, rows, PHYSICS_COLUMNS, FoulingVector.scalar(increment))


def physics_cost(fouling_coeff: float, fuel_price: float, drag_coeff: float = 1.0) -> VoyageCostFunction:
    model = SyntheticPhysicsPredictor(FeatureSchema(PHYSICS_COLUMNS), drag_coeff, fouling_coeff)
    return VoyageCostFunction(model, fuel_price)


def reference_instance():
    """Five-voyage instance with scalar fouling in days; returns (instance, cost function)."""
    voyages = [
        physics_voyage(j + 1, REFERENCE_STW[j], REFERENCE_LOAD[j], REFERENCE_INCREMENT) for j in range(5)
    ]
    inst = ProblemInstance(REFERENCE_COSTS, voyages, FoulingVector.scalar(REFERENCE_B0), REFERENCE_PRICE)
    return inst, physics_cost(REFERENCE_FOULING_COEFF, REFERENCE_PRICE)


def random_instance(rng: np.random.Generator, n: int, rows=(3, 8)):
    """Random scalar-fouling instance whose optimum mixes cleaning and not cleaning."""
    voyages = []
    for j in range(n):
        m = int(rng.integers(rows[0], rows[1] + 1))
        voyages.append(physics_voyage(j + 1, rng.uniform(6, 15, m), rng.uniform(8, 12, m), rng.uniform(5, 50)))
    costs = rng.uniform(0, 20_000, n)
    inst = ProblemInstance(costs, voyages, FoulingVector.scalar(rng.uniform(0, 200)), REFERENCE_PRICE)
    return inst, physics_cost(rng.uniform(5, 50), REFERENCE_PRICE)


def heavy_fouling_instance(seed: int = 0, n: int = 10, cleaning_cost: float = 30_000.0, rows: int = 24):
    """Fast-fouling vessel where a cleaning saves far more fuel than it costs."""
    rng = np.random.default_rng(seed)
    voyages = [
        physics_voyage(j + 1, rng.uniform(10, 14, rows), rng.uniform(9, 11, rows), 60.0) for j in range(n)
    ]
    inst = ProblemInstance(np.full(n, cleaning_cost), voyages, FoulingVector.scalar(300.0), REFERENCE_PRICE)
    return inst, physics_cost(40.0, REFERENCE_PRICE)


@dataclass
class FleetParams:
    drag_coeff: float = 1.0
    fouling_coeff: float = 0.5  # kg/h per day since dry dock
    noise: float = 0.05  # relative standard deviation of FOC
    start: str = "2020-01-01T00:00:00Z"
    voyage_hours: tuple = (150, 330)
    port_hours: tuple = (12, 48)
    cruise_speed: tuple = (8.0, 15.0)
    draught: tuple = (7.0, 12.0)
    iws_after_voyage: int | None = None  # index of the port call that gets an in-water survey
    imo: int = 9000001


def generate_fleet(seed: int, n_voyages: int, params: FleetParams | None = None):
    """Hourly records, cleaning events and weather for one vessel.

    The hull is dry-docked just before the first voyage. Port calls leave
    gaps in the hourly series. Weather is reported at every sensor row.
    """
    if n_voyages < 1:
        raise ValueError("n_voyages must be >= 1")
    p = params or FleetParams()
    rng = np.random.default_rng(seed)
    t0 = parse_time(p.start)
    cleanings = [CleaningEvent(t0, CleaningKind.DDM)]
    rows = []  # dicts of raw values
    t = t0
    lat, lon = 50.0, 0.0
    for v in range(n_voyages):
        if v > 0:
            port = int(rng.integers(p.port_hours[0], p.port_hours[1] + 1))
            if p.iws_after_voyage is not None and v == p.iws_after_voyage:
                cleanings.append(CleaningEvent(t + timedelta(hours=port // 2), CleaningKind.IWS))
            t = t + timedelta(hours=port)
        hours = int(rng.integers(p.voyage_hours[0], p.voyage_hours[1] + 1))
        cruise = rng.uniform(*p.cruise_speed)
        draught = rng.uniform(*p.draught)
        cargo = draught * 4000.0
        course = rng.uniform(0, 360)
        fuel = FuelType.MGO if rng.random() < 0.15 else FuelType.HFO
        for h in range(hours):
            t = t + timedelta(hours=1)
            manoeuvre = h < 3 or h >= hours - 3
            stw = rng.uniform(0.5, 6.0) if manoeuvre else max(0.0, cruise + rng.normal(0, 0.6))
            cog = (course + rng.normal(0, 5)) % 360
            current = abs(rng.normal(0.3, 0.2))
            current_dir = rng.uniform(0, 360)
            sog = max(0.0, stw + current * np.cos(np.radians(cog - current_dir)))
            step = sog / 60.0
            lat = float(np.clip(lat + step * np.cos(np.radians(cog)), -70, 70))
            lon = float((lon + step * np.sin(np.radians(cog)) + 180) % 360 - 180)
            wind = abs(rng.normal(7, 3))
            wind_dir = rng.uniform(0, 360)
            rows.append({
                "timestamp": t, "voyage_id": v + 1, "lat": lat, "lon": lon, "stw": stw, "sog": sog,
                "cargo": cargo, "draught": draught + rng.normal(0, 0.05), "trim": rng.normal(0.5, 0.2),
                "wuk": rng.uniform(10, 200), "cog": cog, "wind_speed": wind, "wind_dir": wind_dir,
                "fuel_type": fuel, "shaft_rpm": 6.0 * stw, "pitch": 80.0,
                "wave_height": float(rng.gamma(2.0, 0.5)), "wave_dir": rng.uniform(0, 360),
                "wave_period": rng.uniform(4, 10), "current": current, "current_dir": current_dir,
                "temperature": 15 + 10 * np.sin(2 * np.pi * (t.timetuple().tm_yday / 365.25)) + rng.normal(0, 2),
            })
    # label with the same fouling features ingest will derive
    stub = [
        HourlyRecord(r["timestamp"], r["voyage_id"], p.imo, r["lat"], r["lon"], 0.0, r["sog"], r["stw"],
                     r["cargo"], r["draught"], r["trim"], r["wuk"], r["cog"], r["wind_speed"], r["wind_dir"],
                     r["fuel_type"], r["shaft_rpm"], r["pitch"])
        for r in rows
    ]
    dsddm = derive_fouling_features(stub, cleanings).states[:, 0]
    stw = np.array([r["stw"] for r in rows])
    load = np.array([r["draught"] + r["wave_height"] for r in rows])
    clean_foc = p.drag_coeff * load * stw ** 2 + p.fouling_coeff * dsddm
    foc = np.maximum(clean_foc * (1.0 + p.noise * rng.standard_normal(len(rows))), 0.0)
    records = [
        HourlyRecord(**{**s.__dict__, "foc": float(f)}) for s, f in zip(stub, foc)
    ]
    weather = [
        WeatherRecord(r["timestamp"], r["lat"], r["lon"], float(r["temperature"]), r["wind_speed"], r["wind_dir"],
                      r["wave_height"], r["wave_dir"], r["wave_period"], r["current"], r["current_dir"], 3.0)
        for r in rows
    ]
    return records, cleanings, weather
