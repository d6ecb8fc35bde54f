import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hullclean.core import (
    FOULING_FIELDS,
    FeatureSchema,
    FoulingVector,
    ProblemInstance,
    Schedule,
    VoyageProfile,
    accumulate,
    as_fouling_array,
    realize_trajectory,
    reset,
    trajectory_arrays,
)
from oracles import scalar_trajectory

component = st.floats(min_value=0, max_value=1e6, allow_nan=False)
vectors = st.builds(FoulingVector, *([component] * 7))


def scalar_instance(b0, increments, costs=None):
    voyages = [
        VoyageProfile(j + 1, np.ones((2, 1)), ("x",), FoulingVector.scalar(inc)) for j, inc in enumerate(increments)
    ]
    costs = costs if costs is not None else [1.0] * len(increments)
    return ProblemInstance(costs, voyages, FoulingVector.scalar(b0))


def test_zero_identity():
    inc = FoulingVector(25, 25, 0, 240, 0, 0, 120)
    assert accumulate(FoulingVector(), inc) == inc


def test_anchor_then_sailing_increment():
    # ten days at anchor plus five days at 10 kn
    anchor = FoulingVector(dsddm=10, dsiws=10, has0=240)
    sailing = FoulingVector(dsddm=5, dsiws=5, has12=120)
    assert accumulate(anchor, sailing) == FoulingVector(15, 15, 0, 240, 0, 0, 120)


@given(vectors, vectors)
def test_accumulate_commutative(a, b):
    assert accumulate(a, b) == accumulate(b, a)


@given(vectors, vectors, vectors)
def test_accumulate_associative_and_non_decreasing(a, b, c):
    left = accumulate(accumulate(a, b), c).to_array()
    right = accumulate(a, accumulate(b, c)).to_array()
    np.testing.assert_allclose(left, right, rtol=1e-12)
    assert a.dominated_by(accumulate(a, b))


def test_reset_is_zero_and_identity():
    assert reset().to_array().tolist() == [0.0] * 7
    assert reset() == FoulingVector()
    x = FoulingVector(1, 2, 3, 4, 5, 6, 7)
    assert accumulate(reset(), x) == x


@pytest.mark.parametrize("bad", [-1.0, float("nan"), float("inf")])
def test_fouling_rejects_invalid(bad):
    with pytest.raises(ValueError):
        FoulingVector(hu=bad)


def test_fouling_round_trips():
    x = FoulingVector(1.5, 2, 3, 4, 5, 6, 7)
    assert FoulingVector.from_array(x.to_array()) == x
    assert FoulingVector.from_dict(x.to_dict()) == x
    assert FoulingVector.scalar(3.0).to_array().tolist() == [3.0, 0, 0, 0, 0, 0, 0]
    assert as_fouling_array(4.0)[0] == 4.0
    with pytest.raises(ValueError):
        FoulingVector.from_array([1, 2])


def test_schema_unique_and_fouling_columns():
    with pytest.raises(ValueError):
        FeatureSchema(("a", "a"))
    s = FeatureSchema(("stw", "hu", "dsddm"))
    assert s.fouling_columns() == {0: 2, 2: 1}
    assert FeatureSchema.from_dict(s.to_dict()) == s
    with pytest.raises(KeyError):
        s.index("missing")


def test_voyage_profile_validation():
    with pytest.raises(ValueError):
        VoyageProfile(1, np.zeros((0, 2)), ("a", "b"), FoulingVector())
    with pytest.raises(ValueError):
        VoyageProfile(1, np.zeros((3, 2)), ("a",), FoulingVector())
    v = VoyageProfile(1, np.zeros((3, 2)), ("a", "b"), FoulingVector())
    with pytest.raises(ValueError):
        v.rows[0, 0] = 1.0


def test_voyage_hours_consistency():
    from datetime import datetime, timedelta, timezone

    t0 = datetime(2021, 1, 1, tzinfo=timezone.utc)
    inc = FoulingVector(5, 5, 2, 0, 0, 0, 118)
    ok = VoyageProfile(1, np.zeros((118, 1)), ("a",), inc, t0, t0 + timedelta(hours=120.5))
    bad = VoyageProfile(1, np.zeros((118, 1)), ("a",), inc, t0, t0 + timedelta(hours=122))
    assert ok.check_increment_consistency()
    assert not bad.check_increment_consistency()


def test_instance_validation():
    v = VoyageProfile(1, np.ones((1, 1)), ("x",), FoulingVector())
    with pytest.raises(ValueError):
        ProblemInstance([], [], FoulingVector())
    with pytest.raises(ValueError):
        ProblemInstance([1.0, 2.0], [v], FoulingVector())
    with pytest.raises(ValueError):
        ProblemInstance([-1.0], [v], FoulingVector())


def test_overlapping_voyages_rejected():
    from datetime import datetime, timezone

    t = lambda h: datetime(2021, 1, 1, h, tzinfo=timezone.utc)  # noqa: E731
    a = VoyageProfile(1, np.ones((1, 1)), ("x",), FoulingVector(), t(0), t(5))
    b = VoyageProfile(2, np.ones((1, 1)), ("x",), FoulingVector(), t(4), t(8))
    with pytest.raises(ValueError):
        ProblemInstance([1, 1], [a, b], FoulingVector())


def test_trajectory_examples():
    inst = scalar_instance(100, [25] * 5)
    dsddm = lambda z: [b.dsddm for b in realize_trajectory(inst, z)]  # noqa: E731
    assert dsddm((0, 0, 0, 0, 0)) == [100, 125, 150, 175, 200]
    assert all(b == FoulingVector() for b in realize_trajectory(inst, (1, 1, 1, 1, 1)))
    assert dsddm((0, 1, 0, 0, 1)) == [100, 0, 25, 50, 0]
    with pytest.raises(ValueError):
        realize_trajectory(inst, (0, 1))
    with pytest.raises(ValueError):
        realize_trajectory(inst, (0, 1, 2, 0, 0))


@pytest.mark.parametrize("n", range(1, 11))
def test_trajectory_invariants_all_schedules(n):
    rng = np.random.default_rng(n)
    b0 = FoulingVector.from_array(rng.uniform(0, 50, 7))
    incs = [FoulingVector.from_array(rng.uniform(0, 10, 7)) for _ in range(n)]
    voyages = [VoyageProfile(j, np.ones((1, 1)), ("x",), incs[j]) for j in range(n)]
    inst = ProblemInstance(np.ones(n), voyages, b0)
    for z in itertools.product((0, 1), repeat=n):
        traj = realize_trajectory(inst, z)
        for j in range(n):
            if z[j]:
                assert traj[j] == FoulingVector()
            elif j == 0:
                assert traj[0] == b0
            else:
                assert traj[j] == accumulate(traj[j - 1], incs[j - 1])


@given(st.lists(st.integers(0, 1), min_size=1, max_size=12), st.integers(0, 1000),
       st.lists(st.integers(0, 100), min_size=12, max_size=12))
def test_trajectory_matches_scalar_oracle(z, b0, incs):
    n = len(z)
    inst = scalar_instance(b0, incs[:n])
    got = [b.dsddm for b in realize_trajectory(inst, z)]
    assert got == scalar_trajectory(b0, incs[:n], z)


@given(st.lists(st.integers(0, 1), min_size=2, max_size=10), st.data())
def test_prefix_unaffected_by_later_decisions(z, data):
    j = data.draw(st.integers(0, len(z) - 1))
    flipped = list(z)
    flipped[j] = 1 - flipped[j]
    inst = scalar_instance(7, list(range(1, len(z) + 1)))
    a = realize_trajectory(inst, z)
    b = realize_trajectory(inst, flipped)
    assert a[:j] == b[:j]


def test_trajectory_bit_identical_on_repeat():
    rng = np.random.default_rng(0)
    b0 = rng.uniform(0, 10, 7)
    inc = rng.uniform(0, 1, (8, 7))
    z = (0, 1, 0, 0, 1, 0, 0, 0)
    assert trajectory_arrays(b0, inc, z).tobytes() == trajectory_arrays(b0, inc, z).tobytes()


def test_schedule_counts_and_dict():
    s = Schedule((0, 1, 1), 10.0, (1.0, 2.0, 3.0), 4.0, tuple(FoulingVector() for _ in range(3)))
    assert s.n_cleanings == 2
    d = s.to_dict()
    assert d["z"] == [0, 1, 1] and len(d["fouling_trajectory"]) == 3
    assert set(d["fouling_trajectory"][0]) == set(FOULING_FIELDS)


def test_sub_instance():
    inst = scalar_instance(100, [25] * 5, [1, 2, 3, 4, 5])
    sub = inst.sub_instance(2, FoulingVector.scalar(10))
    assert sub.n == 3
    assert sub.cleaning_costs.tolist() == [3, 4, 5]
    assert sub.initial_fouling.dsddm == 10
