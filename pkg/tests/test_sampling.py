import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from batchbandit.core.sampling import (
    ForcedSampler,
    SampleSet,
    forced_draw,
    forced_probability,
    predicted_rewards,
    screening_set,
    select_arm_two_stage,
)
from batchbandit.errors import MissingReward, UnknownStep
from batchbandit.rng import substream


def test_early_steps_always_forced():
    s = ForcedSampler(10, 3, substream(0, "forced"))
    assert all(s.draw(t) is not None for t in range(1, 11))


def test_zero_t0_never_forces():
    s = ForcedSampler(0, 3, substream(0, "forced"))
    assert all(s.draw(t) is None for t in range(1, 500))


def test_probability():
    assert forced_probability(50, 10) == 1.0
    assert forced_probability(50, 100) == 0.5
    assert forced_probability(0, 1) == 0.0


def test_forced_count_expectation_over_seeds():
    t0, K, T = 50, 2, 10_000
    expected = sum(min(1.0, t0 / t) for t in range(1, T + 1)) / K
    assert expected == pytest.approx(t0 / K * (1 + math.log(T / t0)), rel=0.02)
    totals = []
    for seed in range(200):
        s = ForcedSampler(t0, K, substream(seed, "forced"))
        counts = np.zeros(K)
        for t in range(1, T + 1):
            k = s.draw(t)
            if k is not None:
                counts[k] += 1
        totals.append(counts.mean())
    assert abs(np.mean(totals) - expected) / expected <= 0.05


def test_forced_arm_is_roughly_uniform():
    s = ForcedSampler(10_000, 4, substream(3, "forced"))
    counts = np.bincount([s.draw(t) for t in range(1, 8001)], minlength=4)
    assert np.all(np.abs(counts - 2000) < 200)


def test_forced_draw_rejects_step_zero():
    with pytest.raises(ValueError):
        forced_draw(ForcedSampler(1, 2, substream(0, "forced")), 0)


def test_screening_examples():
    x = np.array([1.0])
    assert screening_set(x, np.array([[0.3]]), 0.1) == [0]
    assert screening_set(x, np.zeros((4, 1)), 0.1) == [0, 1, 2, 3]
    assert screening_set(x, np.array([[1.0], [0.9], [0.2]]), 0.5) == [0, 1]


def test_two_stage_examples():
    x = np.array([1.0])
    zero = SimpleNamespace(forced_estimators=np.zeros((3, 1)), whole_estimators=np.zeros((3, 1)), h=1.0)
    assert select_arm_two_stage(x, zero) == 0
    single = SimpleNamespace(
        forced_estimators=np.array([[0.0], [0.0], [5.0]]),
        whole_estimators=np.array([[9.0], [9.0], [-9.0]]),
        h=1.0,
    )
    assert select_arm_two_stage(x, single) == 2
    both = SimpleNamespace(
        forced_estimators=np.array([[1.0], [0.98]]), whole_estimators=np.array([[0.2], [0.9]]), h=0.1
    )
    assert select_arm_two_stage(x, both) == 1


def test_predicted_rewards_matrix_inner_product():
    x = np.arange(4.0).reshape(2, 2)
    est = np.stack([np.eye(2), np.ones((2, 2))])
    np.testing.assert_allclose(predicted_rewards(x, est), [3.0, 6.0])


@given(st.integers(1, 6), st.integers(1, 5), st.floats(0.01, 5), st.integers(0, 2**31))
@settings(max_examples=200)
def test_screening_contains_forced_argmax(K, d, h, seed):
    rng = np.random.default_rng(seed)
    est = rng.standard_normal((K, d))
    x = rng.uniform(-1, 1, d)
    sel = screening_set(x, est, h)
    assert int(np.argmax(est @ x)) in sel


def test_sample_set_bookkeeping():
    s = SampleSet(2)
    s.append(1, np.array([1.0, 0.0]))
    s.append(2, np.array([0.0, 2.0]))
    assert s.pending_steps() == [1, 2]
    with pytest.raises(MissingReward):
        s.stats()
    s.fill(2, 4.0)
    G, c, yy, n = s.stats()
    assert n == 1
    np.testing.assert_allclose(G, [[0, 0], [0, 4]])
    np.testing.assert_allclose(c, [0, 8])
    assert yy == 16.0
    with pytest.raises(UnknownStep):
        s.fill(2, 1.0)
    with pytest.raises(UnknownStep):
        s.fill(7, 1.0)
    X, y = s.arrays()
    np.testing.assert_allclose(X, [[0, 2]])
    np.testing.assert_allclose(y, [4.0])


def test_substreams_are_independent_and_repeatable():
    a = substream(7, "noise").random(5)
    b = substream(7, "noise").random(5)
    c = substream(7, "contexts").random(5)
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c)
    with pytest.raises(ValueError):
        substream(7, "nonsense")
