"""Reduction from the 0-1 knapsack decision problem to the general cleaning decision problem.

Item values become negative cleaning costs, weights become scalar voyage
profiles and the target value becomes the negated target cost. An
overweight selection is charged a sentinel large enough that no cleaning
credit can bring it back under the target.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from hullclean.solve import SolverRefusal, enumerate_schedules

DECISION_CAP = 20


@dataclass(frozen=True)
class KnapsackInstance:
    values: tuple
    weights: tuple
    capacity: float
    target: float

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "weights", tuple(self.weights))
        if len(self.values) < 1 or len(self.values) != len(self.weights):
            raise ValueError("need n >= 1 items with one value and one weight each")
        if not all(np.isfinite(self.weights)) or not np.isfinite(self.capacity):
            raise ValueError("weights and capacity must be finite")

    @property
    def n(self):
        return len(self.values)


@dataclass(frozen=True)
class CleaningDecisionInstance:
    cleaning_costs: tuple
    profiles: tuple  # one scalar per voyage
    capacity: float
    target: float
    sentinel: float
    penalty: str = "terminal"

    @property
    def n(self):
        return len(self.cleaning_costs)

    def cost_fn(self) -> Callable[[int, tuple], float]:
        """f(i, z[:i+1]) for 0-based voyage i.

        ``terminal`` charges the sentinel once, on the last voyage, when the
        full selection is overweight. ``every_prefix`` charges it on every
        overweight prefix, which over-counts whenever the sentinel is negative.
        """
        profiles = self.profiles
        n = self.n

        def f(i, z_prefix):
            load = sum(x * zi for x, zi in zip(profiles[: i + 1], z_prefix))
            if self.penalty == "every_prefix":
                return self.sentinel if load > self.capacity else 0.0
            return self.sentinel if i == n - 1 and load > self.capacity else 0.0

        return f

    def schedule_cost(self, z) -> float:
        f = self.cost_fn()
        fuel = sum(f(i, tuple(z[: i + 1])) for i in range(self.n))
        return fuel + sum(c * zi for c, zi in zip(self.cleaning_costs, z))


def transform(k: KnapsackInstance, penalty: str = "terminal") -> CleaningDecisionInstance:
    if penalty not in ("terminal", "every_prefix"):
        raise ValueError(f"unknown penalty mode {penalty!r}")
    c = tuple(-v for v in k.values)
    C = -k.target
    sentinel = C + k.n * max(abs(x) for x in c) + 1
    return CleaningDecisionInstance(c, tuple(k.weights), k.capacity, C, sentinel, penalty)


def decide_cleaning(instance: CleaningDecisionInstance, cap: int = DECISION_CAP):
    """(True, witness) for the first schedule with cost <= target, else (False, None)."""
    if instance.n > cap:
        raise SolverRefusal(f"decision by enumeration refused for n={instance.n} > cap={cap}")
    for z in enumerate_schedules(instance.n):
        if instance.schedule_cost(z) <= instance.target:
            return True, z
    return False, None


def decide_knapsack(k: KnapsackInstance):
    """Independent exhaustive decider, written against the knapsack statement only."""
    n = k.n
    for mask in range(1 << n):
        weight = 0
        value = 0
        for i in range(n):
            if mask >> i & 1:
                weight += k.weights[i]
                value += k.values[i]
        if weight <= k.capacity and value >= k.target:
            return True, tuple((mask >> i) & 1 for i in range(n))
    return False, None


def random_knapsack(rng: np.random.Generator, n: int, max_item: int = 20) -> KnapsackInstance:
    values = [int(v) for v in rng.integers(1, max_item + 1, n)]
    weights = [int(w) for w in rng.integers(1, max_item + 1, n)]
    capacity = int(rng.integers(0, sum(weights) + 1))
    # reach a little past the total value so some instances are trivially infeasible
    target = int(rng.integers(0, sum(values) + 3))
    return KnapsackInstance(tuple(values), tuple(weights), capacity, target)


def equivalence_campaign(n_instances: int = 50, size_range=(2, 10), seed: int = 0,
                         penalty: str = "terminal") -> dict:
    lo, hi = size_range
    if hi > 12 or lo < 1 or lo > hi:
        raise ValueError("size_range must satisfy 1 <= lo <= hi <= 12")
    rng = np.random.default_rng(seed)
    agreements = 0
    first_disagreement = None
    sentinel_ok = True
    for idx in range(n_instances):
        k = random_knapsack(rng, int(rng.integers(lo, hi + 1)))
        expected, _ = decide_knapsack(k)
        t = transform(k, penalty)
        got, witness = decide_cleaning(t)
        # the sentinel alone exceeds the target by more than any cleaning credit
        sentinel_ok &= t.sentinel - t.n * max(abs(c) for c in t.cleaning_costs) > t.target
        if got == expected:
            agreements += 1
        elif first_disagreement is None:
            first_disagreement = {
                "index": idx,
                "values": list(k.values),
                "weights": list(k.weights),
                "capacity": k.capacity,
                "target": k.target,
                "knapsack": expected,
                "cleaning": got,
                "witness": list(witness) if witness else None,
            }
    return {
        "schema_version": 1,
        "instances": n_instances,
        "agreements": agreements,
        "first_disagreement": first_disagreement,
        "sentinel_check": bool(sentinel_ok),
        "seed": seed,
        "size_range": [lo, hi],
        "penalty": penalty,
    }
