"""Domain types and fouling-state arithmetic shared by every other module."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from datetime import datetime
from typing import Iterable, Sequence

import numpy as np

FOULING_FIELDS = ("dsddm", "dsiws", "hu", "has0", "has6", "has9", "has12")
FOULING_UNITS = {
    "dsddm": "days",
    "dsiws": "days",
    "hu": "h",
    "has0": "h",
    "has6": "h",
    "has9": "h",
    "has12": "h",
}

# hourly sampling granularity
ELAPSED_HOURS_TOLERANCE = 1.0


@dataclass(frozen=True)
class FoulingVector:
    """Cumulative hull-fouling state since the last cleaning.

    Days since dry-dock / in-water survey, unaccounted hours and hours spent
    in the four speed bands. The all-zero vector is the state right after a
    cleaning.
    """

    dsddm: float = 0.0
    dsiws: float = 0.0
    hu: float = 0.0
    has0: float = 0.0
    has6: float = 0.0
    has9: float = 0.0
    has12: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            value = float(getattr(self, f.name))
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"fouling component {f.name} must be finite and >= 0, got {value}")
            object.__setattr__(self, f.name, value)

    @classmethod
    def scalar(cls, value: float) -> "FoulingVector":
        """Scalar fouling measure stored in the dsddm slot."""
        return cls(dsddm=value)

    @classmethod
    def from_array(cls, values: Iterable[float]) -> "FoulingVector":
        values = [float(v) for v in values]
        if len(values) != len(FOULING_FIELDS):
            raise ValueError(f"expected {len(FOULING_FIELDS)} components, got {len(values)}")
        return cls(*values)

    def to_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FOULING_FIELDS], dtype=float)

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in FOULING_FIELDS}

    @classmethod
    def from_dict(cls, data: dict) -> "FoulingVector":
        return cls(**{name: float(data.get(name, 0.0)) for name in FOULING_FIELDS})

    def __add__(self, other: "FoulingVector") -> "FoulingVector":
        return accumulate(self, other)

    def dominated_by(self, other: "FoulingVector") -> bool:
        """True when every component is <= the matching component of ``other``."""
        return bool(np.all(self.to_array() <= other.to_array()))

    def scalarized(self) -> float:
        return self.dsddm


def accumulate(state: FoulingVector, increment: FoulingVector) -> FoulingVector:
    return FoulingVector.from_array(state.to_array() + increment.to_array())


def reset() -> FoulingVector:
    return FoulingVector()


def as_fouling_array(b) -> np.ndarray:
    """Accept a FoulingVector, a scalar (dsddm slot) or a length-7 array."""
    if isinstance(b, FoulingVector):
        return b.to_array()
    arr = np.asarray(b, dtype=float)
    if arr.ndim == 0:
        out = np.zeros(len(FOULING_FIELDS))
        out[0] = float(arr)
        return out
    if arr.shape != (len(FOULING_FIELDS),):
        raise ValueError(f"fouling array must have shape (7,), got {arr.shape}")
    return arr


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered feature names with units and provenance of each column."""

    names: tuple[str, ...]
    units: dict = field(default_factory=dict, compare=False)
    sources: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if len(set(self.names)) != len(self.names):
            raise ValueError("feature names must be unique")

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown feature {name!r}") from None

    def fouling_columns(self) -> dict[int, int]:
        """Map fouling component index -> column index for fouling features present."""
        return {
            comp: self.names.index(name)
            for comp, name in enumerate(FOULING_FIELDS)
            if name in self.names
        }

    def subset(self, names: Sequence[str]) -> "FeatureSchema":
        return FeatureSchema(
            tuple(names),
            {n: self.units[n] for n in names if n in self.units},
            {n: self.sources[n] for n in names if n in self.sources},
        )

    def to_dict(self) -> dict:
        return {"names": list(self.names), "units": dict(self.units), "sources": dict(self.sources)}

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureSchema":
        return cls(tuple(data["names"]), dict(data.get("units", {})), dict(data.get("sources", {})))


@dataclass(frozen=True, eq=False)
class VoyageProfile:
    """Hourly feature rows of one voyage plus the fouling it accrues."""

    voyage_id: int
    rows: np.ndarray
    columns: tuple[str, ...]
    fouling_increment: FoulingVector
    start_time: datetime | None = None
    end_time: datetime | None = None

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[0] < 1:
            raise ValueError(f"voyage {self.voyage_id}: rows must be a non-empty 2-D matrix")
        if rows.shape[1] != len(self.columns):
            raise ValueError(
                f"voyage {self.voyage_id}: {rows.shape[1]} columns but {len(self.columns)} names"
            )
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "columns", tuple(self.columns))

    @property
    def m(self) -> int:
        return self.rows.shape[0]

    def elapsed_hours(self) -> float | None:
        if self.start_time is None or self.end_time is None:
            return None
        return (self.end_time - self.start_time).total_seconds() / 3600.0

    def check_increment_consistency(self, tol: float = ELAPSED_HOURS_TOLERANCE) -> bool:
        """Speed-band hours plus unaccounted hours must cover the elapsed time."""
        elapsed = self.elapsed_hours()
        if elapsed is None:
            return True
        inc = self.fouling_increment
        counted = inc.hu + inc.has0 + inc.has6 + inc.has9 + inc.has12
        return abs(counted - elapsed) <= tol


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    cleaning_costs: np.ndarray
    voyages: tuple[VoyageProfile, ...]
    initial_fouling: FoulingVector
    fuel_price: float = 1.0

    def __post_init__(self):
        costs = np.array(self.cleaning_costs, dtype=float).reshape(-1)
        voyages = tuple(self.voyages)
        if len(voyages) < 1:
            raise ValueError("an instance needs at least one voyage")
        if costs.shape[0] != len(voyages):
            raise ValueError(f"{costs.shape[0]} cleaning costs for {len(voyages)} voyages")
        if np.any(costs < 0) or not np.all(np.isfinite(costs)):
            raise ValueError("cleaning costs must be finite and >= 0")
        for prev, nxt in zip(voyages, voyages[1:]):
            if prev.end_time is not None and nxt.start_time is not None and nxt.start_time < prev.end_time:
                raise ValueError(f"voyages {prev.voyage_id} and {nxt.voyage_id} overlap or are out of order")
        costs.setflags(write=False)
        object.__setattr__(self, "cleaning_costs", costs)
        object.__setattr__(self, "voyages", voyages)

    @property
    def n(self) -> int:
        return len(self.voyages)

    def increments(self) -> np.ndarray:
        """(n, 7) matrix of per-voyage fouling increments."""
        return np.stack([v.fouling_increment.to_array() for v in self.voyages])

    def sub_instance(self, start: int, initial_fouling: FoulingVector) -> "ProblemInstance":
        """Voyages ``start..n-1`` (0-based) entered with the given fouling state."""
        return ProblemInstance(
            self.cleaning_costs[start:], self.voyages[start:], initial_fouling, self.fuel_price
        )


@dataclass(frozen=True)
class Schedule:
    decisions: tuple[int, ...]
    objective: float
    fuel_cost_per_voyage: tuple[float, ...]
    cleaning_cost_total: float
    fouling_trajectory: tuple[FoulingVector, ...]
    calls: int | None = None
    solver: str = ""

    @property
    def n_cleanings(self) -> int:
        return int(sum(self.decisions))

    def to_dict(self) -> dict:
        return {
            "z": list(self.decisions),
            "objective": self.objective,
            "fuel_cost_per_voyage": list(self.fuel_cost_per_voyage),
            "cleaning_cost_total": self.cleaning_cost_total,
            "fouling_trajectory": [b.to_dict() for b in self.fouling_trajectory],
            "calls": self.calls,
            "solver": self.solver,
        }


def _check_decisions(n: int, decisions) -> tuple[int, ...]:
    z = tuple(int(d) for d in decisions)
    if len(z) != n:
        raise ValueError(f"decision vector has length {len(z)}, instance has {n} voyages")
    if any(d not in (0, 1) for d in z):
        raise ValueError("decisions must be binary")
    return z


def trajectory_arrays(b0: np.ndarray, increments: np.ndarray, decisions: Sequence[int]) -> np.ndarray:
    """Fouling state before each voyage as an (n, 7) array.

    Sums left to right so every solver sees bit-identical states.
    """
    n = len(decisions)
    out = np.empty((n, increments.shape[1]))
    state = b0
    for j in range(n):
        if decisions[j]:
            state = np.zeros_like(b0)
        out[j] = state
        state = state + increments[j]
    return out


def realize_trajectory(instance: ProblemInstance, decisions) -> list[FoulingVector]:
    z = _check_decisions(instance.n, decisions)
    arrs = trajectory_arrays(instance.initial_fouling.to_array(), instance.increments(), z)
    return [FoulingVector.from_array(a) for a in arrs]
