"""Synthetic sparse-linear and low-rank environments.

Covariates are standard Gaussian entries clamped to [-1, 1]. Each arm's
parameter has ``s0`` (sparse) or ``r`` diagonal (low-rank) nonzero entries
drawn uniformly on [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from batchbandit.envs.base import Episode, Round
from batchbandit.errors import InvalidConfig
from batchbandit.rng import substream


def truncated_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return np.clip(rng.standard_normal(shape), -1.0, 1.0)


@dataclass(frozen=True)
class SparseEnv:
    K: int
    d: int
    s0: int
    sigma: float
    beta: np.ndarray  # (K, d)

    @property
    def context_shape(self):
        return (self.d,)

    def episode(self, T: int, seed: int) -> "ArrayEpisode":
        rng_x = substream(seed, "contexts")
        rng_e = substream(seed, "noise")
        X = truncated_gaussian(rng_x, (T, self.d))
        eps = self.sigma * rng_e.standard_normal(T)
        return ArrayEpisode(X, X @ self.beta.T, eps)


def sparse_env_new(K: int, d: int, s0: int, sigma: float, seed: int) -> SparseEnv:
    if K < 1 or d < 1:
        raise InvalidConfig("K and d must be positive")
    if not 1 <= s0 <= d:
        raise InvalidConfig(f"need 1 <= s0 <= d, got s0={s0}, d={d}")
    if sigma < 0:
        raise InvalidConfig("sigma must be nonnegative")
    rng = substream(seed, "params")
    beta = np.zeros((K, d))
    for k in range(K):
        support = rng.choice(d, size=s0, replace=False)
        beta[k, support] = rng.uniform(0.0, 1.0, size=s0)
    return SparseEnv(K, d, s0, float(sigma), beta)


@dataclass(frozen=True)
class LowRankEnv:
    K: int
    d: int
    r: int
    sigma: float
    theta: np.ndarray  # (K, d, d)

    @property
    def context_shape(self):
        return (self.d, self.d)

    def episode(self, T: int, seed: int) -> "ArrayEpisode":
        rng_x = substream(seed, "contexts")
        rng_e = substream(seed, "noise")
        X = truncated_gaussian(rng_x, (T, self.d, self.d))
        eps = self.sigma * rng_e.standard_normal(T)
        means = X.reshape(T, -1) @ self.theta.reshape(self.K, -1).T
        return ArrayEpisode(X, means, eps)


def lowrank_env_new(K: int, d: int, r: int, sigma: float, seed: int) -> LowRankEnv:
    if K < 1 or d < 1:
        raise InvalidConfig("K and d must be positive")
    if not 1 <= r <= d:
        raise InvalidConfig(f"need 1 <= r <= d, got r={r}, d={d}")
    if sigma < 0:
        raise InvalidConfig("sigma must be nonnegative")
    rng = substream(seed, "params")
    theta = np.zeros((K, d, d))
    for k in range(K):
        idx = rng.choice(d, size=r, replace=False)
        # strictly positive so the rank is exactly r
        vals = rng.uniform(0.0, 1.0, size=r)
        vals[vals == 0.0] = np.finfo(float).tiny
        theta[k, idx, idx] = vals
    return LowRankEnv(K, d, r, float(sigma), theta)


class ArrayEpisode(Episode):
    def __init__(self, contexts, means, noise):
        self.contexts = contexts
        self.means = means
        self.noise = noise
        self.T = len(contexts)

    @property
    def context_shape(self):
        return self.contexts.shape[1:]

    @property
    def n_arms(self):
        return self.means.shape[1]

    def round(self, t: int) -> Round:
        i = t - 1
        return Round(t, self.contexts[i], self.means[i], float(self.noise[i]))
