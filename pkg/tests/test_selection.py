import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cfoas.config import SystemConfig
from cfoas.selection import (
    assign_users_multi,
    assign_users_single,
    build_plan,
    nearest_aps_fixed,
    nearest_aps_threshold,
    round_robin_aps,
    uc_association,
    uc_nearest,
)

positive = st.floats(1e-6, 1e3, allow_nan=False)


def test_fixed_examples():
    assert nearest_aps_fixed([0.1, 0.5, 0.3], 2).tolist() == [1, 2]
    assert nearest_aps_fixed([0.1, 0.5, 0.3], 3).tolist() == [1, 2, 0]
    assert nearest_aps_fixed([0.5, 0.5], 1).tolist() == [0]
    with pytest.raises(ValueError):
        nearest_aps_fixed([0.1, 0.2], 3)


@given(arrays(float, st.integers(2, 30), elements=positive), st.floats(1e-3, 1e3))
def test_fixed_scale_invariant(beta, scale):
    n = max(1, beta.size // 2)
    assert np.array_equal(nearest_aps_fixed(beta, n), nearest_aps_fixed(beta * scale, n))


def test_threshold_examples():
    assert sorted(nearest_aps_threshold([1.0, 2.0, 3.0], 1.0).tolist()) == [1, 2]
    assert sorted(nearest_aps_threshold([0.3, 0.1, 0.2], 0.0).tolist()) == [0, 1, 2]
    assert nearest_aps_threshold([0.3, 0.1, 0.2], 1e9).size == 0
    with pytest.raises(ValueError):
        nearest_aps_threshold([1.0], -1.0)


def test_threshold_descending_order():
    assert nearest_aps_threshold([1.0, 2.0, 3.0], 1.0).tolist() == [2, 1]


def test_assign_single():
    assert [g.tolist() for g in assign_users_single(2, 2)] == [[0], [1]]
    assert [g.tolist() for g in assign_users_single(2, 4)] == [[0], [1], [0], [1]]
    assert assign_users_single(0, 3) == []
    assert all(len(g) == 1 for g in assign_users_single(5, 9))


def test_assign_multi():
    groups = assign_users_multi(16, 4)
    assert [g.tolist() for g in groups] == [list(range(i, i + 4)) for i in (0, 4, 8, 12)]
    assert [g.tolist() for g in assign_users_multi(3, 1)] == [[0], [1], [2]]
    assert [g.tolist() for g in assign_users_multi(5, 5)] == [[0, 1, 2, 3, 4]]
    assert [g.tolist() for g in assign_users_multi(5, 2)] == [[0, 1], [2, 3], [4]]


def test_round_robin_identical_columns():
    beta = np.array([[0.9, 0.9], [0.5, 0.5], [0.1, 0.1]])
    assert round_robin_aps(beta, [0, 1], 2).tolist() == [0, 1]


def test_round_robin_all_aps(rng):
    beta = rng.uniform(size=(7, 3))
    assert sorted(round_robin_aps(beta, [0, 1, 2], 7).tolist()) == list(range(7))


def test_round_robin_alternates():
    beta = np.array([[0.9, 0.1], [0.8, 0.2], [0.1, 0.9], [0.2, 0.8]])
    assert round_robin_aps(beta, [0, 1], 3).tolist() == [0, 2, 1]


@settings(max_examples=200)
@given(arrays(float, st.tuples(st.integers(1, 20), st.integers(1, 4)), elements=positive),
       st.data())
def test_round_robin_single_user_equals_fixed(beta, data):
    n = data.draw(st.integers(1, beta.shape[0]))
    k = data.draw(st.integers(0, beta.shape[1] - 1))
    assert np.array_equal(round_robin_aps(beta, [k], n), nearest_aps_fixed(beta[:, k], n))


def test_uc_association_examples():
    users, aps = uc_association(np.array([[0.3, 0.7]]), 1)
    assert users[0].tolist() == [1]
    assert aps[1].tolist() == [0] and aps[0].size == 0
    users, aps = uc_association(np.random.default_rng(0).uniform(size=(5, 3)), 3)
    assert all(a.tolist() == list(range(5)) for a in aps)


@pytest.mark.parametrize("builder,param", [(uc_association, 2), (uc_nearest, 3)])
def test_membership_duality(builder, param):
    rng = np.random.default_rng(4)
    for _ in range(20):
        beta = rng.uniform(size=(8, 4))
        users, aps = builder(beta, param)
        for m in range(8):
            for k in range(4):
                assert (k in users[m]) == (m in aps[k])


def test_build_plan_defaults(rng):
    beta = rng.uniform(size=(40, 8))
    plan = build_plan(beta, SystemConfig(num_aps=40, num_users=8, aps_per_user=3, users_per_rb=4))
    assert all(len(a) == 3 for a in plan.per_user_aps)
    assert [len(u) for u in plan.rb_users] == [4, 4]
    assert all(len(a) == 12 for a in plan.rb_aps)
    assert plan.rb_of_user(5) == 1 and plan.num_users == 8
    for k in range(8):
        assert np.array_equal(np.sort(plan.uc_ap_sets[k]), np.sort(plan.per_user_aps[k]))
        col = beta[plan.per_user_aps[k], k]
        assert np.all(np.diff(col) <= 0)


def test_build_plan_threshold(rng):
    beta = rng.uniform(size=(10, 3))
    plan = build_plan(beta, SystemConfig(num_aps=10, num_users=3, selection="threshold",
                                         threshold_coeff=0.0))
    assert all(len(a) == 10 for a in plan.per_user_aps)
