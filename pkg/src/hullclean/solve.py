"""Exact cleaning-schedule optimizers.

``brute_force`` enumerates all 2**n schedules; ``dp_optimize`` solves the
cumulative-fouling formulation with O(n^2) cost evaluations. Both count
logical cost-function calls through a CallCounter; the optional memo cache
sits behind the counter so counts do not depend on it.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from hullclean.core import (
    FoulingVector,
    ProblemInstance,
    Schedule,
    _check_decisions,
    trajectory_arrays,
)

BRUTE_FORCE_CAP = 22


class SolverRefusal(RuntimeError):
    pass


@dataclass
class CallCounter:
    count: int = 0

    def add(self, k: int = 1) -> None:
        self.count += k

    def reset(self) -> None:
        self.count = 0


class _Evaluator:
    """Counts every logical call; optionally memoizes on (voyage index, fouling bytes)."""

    def __init__(self, instance: ProblemInstance, cost_fn, counter: CallCounter | None, cache: bool):
        self.voyages = instance.voyages
        self.cost_fn = cost_fn
        self.counter = counter if counter is not None else CallCounter()
        self.cache = {} if cache else None

    def _raw(self, i, bs):
        batch = getattr(self.cost_fn, "batch", None)
        if batch is not None:
            return np.asarray(batch(self.voyages[i], bs), dtype=float)
        return np.array([self.cost_fn(self.voyages[i], FoulingVector.from_array(b)) for b in bs])

    def one(self, i: int, b: np.ndarray) -> float:
        return float(self.many(i, b[None, :])[0])

    def many(self, i: int, bs: np.ndarray) -> np.ndarray:
        self.counter.add(len(bs))
        if self.cache is None:
            return self._raw(i, bs)
        out = np.empty(len(bs))
        keys = [(i, b.tobytes()) for b in bs]
        todo = [r for r, key in enumerate(keys) if key not in self.cache]
        if todo:
            values = self._raw(i, bs[todo])
            for r, v in zip(todo, values):
                self.cache[keys[r]] = float(v)
        for r, key in enumerate(keys):
            out[r] = self.cache[key]
        return out


def _schedule(instance, z, fuel, traj, calls, solver) -> Schedule:
    fuel = tuple(float(v) for v in fuel)
    cleaning = float(sum(float(c) for c, d in zip(instance.cleaning_costs, z) if d))
    return Schedule(
        decisions=tuple(int(d) for d in z),
        objective=sum(fuel) + cleaning,
        fuel_cost_per_voyage=fuel,
        cleaning_cost_total=cleaning,
        fouling_trajectory=tuple(FoulingVector.from_array(b) for b in traj),
        calls=calls,
        solver=solver,
    )


def objective(instance: ProblemInstance, decisions, cost_fn, counter: CallCounter | None = None,
              cache: bool = False) -> Schedule:
    """Fuel plus cleaning cost of one fixed schedule (n cost calls)."""
    z = _check_decisions(instance.n, decisions)
    ev = _Evaluator(instance, cost_fn, counter, cache)
    traj = trajectory_arrays(instance.initial_fouling.to_array(), instance.increments(), z)
    fuel = [ev.one(j, traj[j]) for j in range(instance.n)]
    return _schedule(instance, z, fuel, traj, ev.counter.count, "objective")


def enumerate_schedules(n: int):
    """All binary vectors in lexicographic order, last position varying fastest."""
    return itertools.product((0, 1), repeat=n)


def brute_force(instance: ProblemInstance, cost_fn, counter: CallCounter | None = None,
                cache: bool = True, cap: int = BRUTE_FORCE_CAP) -> Schedule:
    """Exhaustive search with exactly n * 2**n cost calls; ties keep the first schedule."""
    n = instance.n
    if n > cap:
        raise SolverRefusal(
            f"brute force refused for n={n} > cap={cap}: it needs n*2^n = {n * 2 ** n:,} cost evaluations"
        )
    ev = _Evaluator(instance, cost_fn, counter, cache)
    b0 = instance.initial_fouling.to_array()
    inc = instance.increments()
    costs = instance.cleaning_costs
    best = None
    best_obj = np.inf
    for z in enumerate_schedules(n):
        traj = trajectory_arrays(b0, inc, z)
        fuel = [ev.one(j, traj[j]) for j in range(n)]
        obj = sum(fuel) + float(sum(float(costs[j]) for j in range(n) if z[j]))
        if obj < best_obj:
            best_obj = obj
            best = (z, fuel, traj)
    z, fuel, traj = best
    return _schedule(instance, z, fuel, traj, ev.counter.count, "brute_force")


@dataclass
class DPTables:
    """Optimal sub-problem values and decisions.

    ``phi[i, j]`` (0-based voyage ``i``) is the optimal cost of voyages
    ``i..n-1`` when the last cleaning happened before 1-based voyage ``j``;
    ``j = 0`` means no cleaning since the initial state. Row ``n`` is the
    empty-suffix boundary of zeros. ``parent`` holds 1 (clean), 0 (skip) or
    -1 for unreachable cells.
    """

    phi: np.ndarray
    parent: np.ndarray
    states: list  # states[i][j]: fouling array entering voyage i in state j
    clean_cost: np.ndarray
    fouled_cost: list

    def subproblem_value(self, i: int, j: int) -> float:
        """Value of the sub-problem with 1-based voyage ``i`` and last-clean index ``j``."""
        return float(self.phi[i - 1, j])

    def suffix_schedule(self, i: int, j: int) -> tuple[int, ...]:
        """Optimal decisions for voyages ``i..n-1`` (0-based) from state ``j``."""
        n = self.phi.shape[0] - 1
        z = []
        for row in range(i, n):
            d = int(self.parent[row, j])
            z.append(d)
            if d:
                j = row + 1
        return tuple(z)


def _fouling_states(instance: ProblemInstance) -> list[np.ndarray]:
    """states[i] has shape (i+2, 7): fouling before voyage i for last-clean index 0..i+1.

    Summed left to right, identical to ``trajectory_arrays``.
    """
    n = instance.n
    b0 = instance.initial_fouling.to_array()
    inc = instance.increments()
    shifted = np.vstack([b0[None, :], inc[:-1]])  # fouling carried into voyage k
    states = []
    prev = None
    for i in range(n):
        cur = np.zeros((i + 2, len(b0)))
        if prev is not None:
            cur[:i] = prev[:i] + shifted[i]
        cur[i] = 0.0 + shifted[i]
        states.append(cur)
        prev = cur
    return states


def dp_tables(instance: ProblemInstance, cost_fn, counter: CallCounter | None = None,
              cache: bool = True) -> DPTables:
    n = instance.n
    if n < 1:
        raise ValueError("dynamic programming needs n >= 1")
    ev = _Evaluator(instance, cost_fn, counter, cache)
    states = _fouling_states(instance)
    zero = np.zeros(states[0].shape[1])
    phi = np.full((n + 1, n + 1), np.inf)
    phi[n, :] = 0.0
    parent = np.full((n + 1, n + 1), -1, dtype=np.int8)
    clean_cost = np.empty(n)
    fouled_cost = [None] * n
    c = instance.cleaning_costs
    for i in reversed(range(n)):
        f_clean = ev.one(i, zero)
        clean_cost[i] = f_clean
        phi_clean = float(c[i]) + f_clean + phi[i + 1, i + 1]
        f_not = ev.many(i, states[i])
        fouled_cost[i] = f_not
        for j in range(i + 2):
            phi_not = f_not[j] + phi[i + 1, j]
            if phi_clean <= phi_not:
                phi[i, j] = phi_clean
                parent[i, j] = 1
            else:
                phi[i, j] = phi_not
                parent[i, j] = 0
    return DPTables(phi, parent, states, clean_cost, fouled_cost)


def dp_optimize(instance: ProblemInstance, cost_fn, counter: CallCounter | None = None,
                cache: bool = True, tables: bool = False):
    """Optimal schedule with exactly 2n + n(n+1)/2 logical cost calls.

    Clean wins ties. Returns ``(schedule, DPTables)`` when ``tables`` is set.
    """
    counter = counter if counter is not None else CallCounter()
    start = counter.count
    t = dp_tables(instance, cost_fn, counter, cache)
    z = t.suffix_schedule(0, 0)
    fuel = []
    j = 0
    for i, d in enumerate(z):
        if d:
            fuel.append(t.clean_cost[i])
            j = i + 1
        else:
            fuel.append(t.fouled_cost[i][j])
    traj = trajectory_arrays(instance.initial_fouling.to_array(), instance.increments(), z)
    sched = _schedule(instance, z, fuel, traj, counter.count - start, "dp")
    return (sched, t) if tables else sched


@dataclass
class MonotonicityCertificate:
    passed: bool
    samples: int
    counterexample: dict | None = None

    def to_dict(self):
        return {"passed": self.passed, "samples": self.samples, "counterexample": self.counterexample}


def check_monotonicity(cost_fn, instance: ProblemInstance, samples: int = 1000, seed: int = 0,
                       rtol: float = 0.0) -> MonotonicityCertificate:
    """Search for a violation of f(X, 0) <= f(X, b) <= f(X, b') with 0 <= b <= b'.

    Fouling states are drawn uniformly up to the instance's total fouling
    (b0 plus all increments) in each component.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    span = instance.initial_fouling.to_array() + instance.increments().sum(axis=0)
    ev = _Evaluator(instance, cost_fn, None, cache=False)
    for s in range(1, samples + 1):
        j = int(rng.integers(instance.n))
        b = rng.uniform(0, 1, span.shape) * span
        b_prime = b + rng.uniform(0, 1, span.shape) * span
        f0, fb, fbp = ev.many(j, np.stack([np.zeros_like(b), b, b_prime]))
        slack = rtol * max(abs(f0), abs(fb), abs(fbp))
        if f0 > fb + slack or fb > fbp + slack:
            return MonotonicityCertificate(False, s, {
                "voyage": j,
                "b": b.tolist(),
                "b_prime": b_prime.tolist(),
                "f_zero": f0,
                "f_b": fb,
                "f_b_prime": fbp,
            })
    return MonotonicityCertificate(True, samples)


def _label(extra: int) -> str:
    if extra <= 0:
        return "No additional cleaning"
    return "One additional cleaning" if extra == 1 else "Multiple additional cleaning"


def _fuel_kg(instance, cost_fn, sched: Schedule) -> float:
    fuel_kg = getattr(cost_fn, "fuel_kg", None)
    total = 0.0
    for j, voyage in enumerate(instance.voyages):
        if fuel_kg is not None:
            total += fuel_kg(voyage, sched.fouling_trajectory[j])
        else:
            total += sched.fuel_cost_per_voyage[j] / instance.fuel_price
    return total


def _date(ts):
    return None if ts is None else ts.strftime("%Y-%m-%dT%H:%M:%SZ")


def savings_report(instance: ProblemInstance, cost_fn, optimized: Schedule, baseline_z=None) -> dict:
    """Baseline vs optimized fuel (kg) and cost (USD); deltas are savings (baseline - optimized)."""
    baseline_z = tuple(baseline_z) if baseline_z is not None else (0,) * instance.n
    baseline = objective(instance, baseline_z, cost_fn)
    base_kg = _fuel_kg(instance, cost_fn, baseline)
    opt_kg = _fuel_kg(instance, cost_fn, optimized)
    d_kg = base_kg - opt_kg
    d_cost = baseline.objective - optimized.objective
    voyages = instance.voyages
    extra = optimized.n_cleanings - baseline.n_cleanings
    return {
        "Number of voyages": instance.n,
        "Hours of sailing": int(sum(v.m for v in voyages)),
        "Start date": _date(voyages[0].start_time),
        "End date": _date(voyages[-1].end_time),
        "No additional cleaning": {
            "z": list(baseline.decisions),
            "Fuel (kg)": base_kg,
            "Cost ($)": baseline.objective,
        },
        "Optimized": {
            "label": _label(extra),
            "z": list(optimized.decisions),
            "Number of cleanings": optimized.n_cleanings,
            "Cleaning dates": [
                _date(voyages[j].start_time) if voyages[j].start_time else f"voyage {voyages[j].voyage_id}"
                for j, d in enumerate(optimized.decisions) if d
            ],
            "Fuel (kg)": opt_kg,
            "Cost ($)": optimized.objective,
            "Δ Fuel (kg)": d_kg,
            "Δ Fuel (%)": 100.0 * d_kg / base_kg if base_kg else 0.0,
            "Δ Cost ($)": d_cost,
            "Δ Cost (%)": 100.0 * d_cost / baseline.objective if baseline.objective else 0.0,
        },
    }


def timed(fn, *args, **kwargs):
    start = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - start
