"""Forced sampling, per-arm sample sets and the two-stage arm choice."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from batchbandit.errors import MissingReward, UnknownStep

PENDING = None


@dataclass
class ForcedSampler:
    """Decaying-probability forced exploration.

    At step t exploration happens with probability min(1, t0 / t); the
    explored arm is uniform over K. Each call consumes one uniform draw, plus
    a second one when exploration fires.
    """

    t0: float
    K: int
    rng: np.random.Generator

    def draw(self, t: int) -> int | None:
        return forced_draw(self, t)


def forced_probability(t0: float, t: int) -> float:
    return min(1.0, t0 / t)


def forced_draw(sampler: ForcedSampler, t: int) -> int | None:
    if t < 1:
        raise ValueError("steps are 1-based")
    u = sampler.rng.random()
    if u >= forced_probability(sampler.t0, t):
        return None
    k = int(sampler.rng.random() * sampler.K)
    return min(k, sampler.K - 1)


class SampleSet:
    """Covariate rows with deferred rewards plus running sufficient statistics.

    Rows are appended with a pending reward; ``fill`` supplies the reward and
    folds the row into X'X, X'y and y'y.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self.steps: list[int] = []
        self.xs: list[np.ndarray] = []
        self.rewards: list[float | None] = []
        self._index: dict[int, int] = {}
        self._gram = np.zeros((dim, dim))
        self._xty = np.zeros(dim)
        self._yty = 0.0
        self.n_filled = 0
        self.version = 0  # bumps whenever filled data change

    def __len__(self):
        return len(self.steps)

    def append(self, t: int, x: np.ndarray):
        self._index[t] = len(self.steps)
        self.steps.append(t)
        self.xs.append(x)
        self.rewards.append(PENDING)

    def pending_steps(self) -> list[int]:
        return [s for s, r in zip(self.steps, self.rewards) if r is PENDING]

    def fill(self, t: int, reward: float):
        try:
            i = self._index[t]
        except KeyError:
            raise UnknownStep(f"step {t} is not in this sample set") from None
        if self.rewards[i] is not PENDING:
            raise UnknownStep(f"step {t} already has a reward")
        x = self.xs[i]
        self.rewards[i] = float(reward)
        self._gram += np.outer(x, x)
        self._xty += reward * x
        self._yty += reward * reward
        self.n_filled += 1
        self.version += 1

    def stats(self):
        """Normalised statistics (X'X/n, X'y/n, y'y/n, n) over filled rows."""
        n = self.n_filled
        if n == 0:
            raise MissingReward("no filled samples")
        return self._gram / n, self._xty / n, self._yty / n, n

    def arrays(self):
        """Filled rows as (X, y) arrays, in insertion order."""
        rows = [(x, r) for x, r in zip(self.xs, self.rewards) if r is not PENDING]
        if not rows:
            return np.zeros((0, self.dim)), np.zeros(0)
        return np.array([x for x, _ in rows]), np.array([r for _, r in rows])


class ArmSampleSet:
    """Forced-sample set R and whole-sample set W for one arm."""

    def __init__(self, dim: int):
        self.forced = SampleSet(dim)
        self.whole = SampleSet(dim)


def predicted_rewards(x, estimators) -> np.ndarray:
    """<x, est_k> for every arm; vectors or matrices (trace inner product)."""
    est = np.asarray(estimators, dtype=float)
    x = np.asarray(x, dtype=float)
    K = est.shape[0]
    return est.reshape(K, -1) @ x.reshape(-1)


def screening_set(x, forced_estimators, h: float) -> list[int]:
    """Arms whose forced-sample prediction is within h/2 of the best one."""
    preds = predicted_rewards(x, forced_estimators)
    cutoff = preds.max() - h / 2.0
    return [k for k in range(len(preds)) if preds[k] >= cutoff]


def select_arm_two_stage(x, state) -> int:
    """Screen with forced-sample estimators, then pick by whole-sample ones.

    ``state`` needs ``forced_estimators``, ``whole_estimators`` and ``h``.
    Ties go to the lowest arm index.
    """
    cand = screening_set(x, state.forced_estimators, state.h)
    if len(cand) == 1:
        return cand[0]
    preds = predicted_rewards(x, np.asarray(state.whole_estimators)[cand])
    return cand[int(np.argmax(preds))]
