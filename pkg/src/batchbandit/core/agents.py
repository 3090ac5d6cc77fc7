"""Batched bandit agents.

All agents share the same protocol:

    a = agent.act(t, x)            # for every step t of the open batch
    agent.commit([(t, r), ...])    # once the batch is over

Rewards are only revealed at ``commit``; between commits the decision rule
is frozen. The sequential bandit is the special case of a grid with one step
per batch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from batchbandit.core.grid import BatchGrid, build_grid, sequential_grid, solve_a_for_batches
from batchbandit.core.sampling import (
    ArmSampleSet,
    ForcedSampler,
    SampleSet,
    forced_draw,
    select_arm_two_stage,
)
from batchbandit.errors import BatchClosed, InvalidConfig, MissingReward, ProtocolError, UnknownStep
from batchbandit.rng import substream
from batchbandit.solvers.lasso import lasso_fit_gram
from batchbandit.solvers.trace_regression import trace_regression_gram


@dataclass(frozen=True)
class AgentConfig:
    """Tunable inputs of the batched agents.

    Exactly one of ``a`` / ``L`` selects the grid unless ``sequential`` is set.
    ``lambda0`` and the price fields are only used by the pricing agent.
    """

    kind: str = "sparse"  # sparse | lowrank | pricing
    T: int = 10_000
    t1: int = 2
    a: float | None = None
    L: int | None = None
    sequential: bool = False
    t0: float = 2.0
    h: float = 5.0
    lambda1: float = 0.05
    lambda2_0: float = 0.2
    lambda0: float = 0.01
    prices: tuple[float, ...] = (200.0, 600.0)
    p_min: float = 0.0
    p_max: float = 1000.0
    tol: float = 1e-7
    max_iter: int | None = None

    def grid(self) -> BatchGrid:
        if self.sequential:
            return sequential_grid(self.T, self.t1)
        if (self.a is None) == (self.L is None):
            raise InvalidConfig("give exactly one of grid parameter a or batch count L")
        if self.a is not None:
            return build_grid(self.T, self.t1, self.a)
        if self.L == self.T - self.t1 + 1:
            return sequential_grid(self.T, self.t1)
        return build_grid(self.T, self.t1, solve_a_for_batches(self.T, self.t1, self.L))


class BatchedAgent:
    """Batch bookkeeping shared by every agent.

    Subclasses implement ``_decide(t, x, forced_choice)`` returning
    (action, sample_sets_to_record) and ``_refit(t_l)``.
    """

    def __init__(self, config: AgentConfig, grid: BatchGrid, n_choices: int, seed: int):
        if config.t0 < 0:
            raise InvalidConfig("t0 must be nonnegative")
        self.config = config
        self.grid = grid
        self.sampler = ForcedSampler(config.t0, n_choices, substream(seed, "forced"))
        self.batch = 0  # index of the open batch
        self.lambda_history: list[float] = []
        self._pending: dict[int, list[SampleSet]] = {}
        self._next_t = 1
        self.last_forced = False

    @property
    def batch_bounds(self) -> tuple[int, int]:
        lo = 1 if self.batch == 0 else self.grid.points[self.batch - 1] + 1
        return lo, self.grid.points[self.batch]

    @property
    def finished(self) -> bool:
        return self.batch >= self.grid.L

    def act(self, t: int, x):
        """Choose an action for step t (arm index, or price for pricing)."""
        if self.finished:
            raise BatchClosed("all batches have been committed")
        lo, hi = self.batch_bounds
        if t > hi:
            raise BatchClosed(f"step {t} is past the end of batch {self.batch + 1} (t={hi}); commit first")
        if t != self._next_t:
            raise ProtocolError(f"expected step {self._next_t}, got {t}")
        x = np.asarray(x, dtype=float)
        choice = forced_draw(self.sampler, t)
        action, sets = self._decide(t, x, choice)
        for s in sets:
            s.append(t, self._features(x, action))
        self._pending[t] = sets
        self._next_t += 1
        self.last_forced = choice is not None
        return action

    def commit(self, rewards) -> "BatchedAgent":
        """Reveal the rewards of the closing batch and refit the estimators."""
        if self.finished:
            raise BatchClosed("all batches have been committed")
        lo, hi = self.batch_bounds
        if self._next_t <= hi:
            raise ProtocolError(f"batch {self.batch + 1} still has unplayed steps {self._next_t}..{hi}")
        got = {}
        for t, r in rewards:
            t = int(t)
            if t not in self._pending:
                raise UnknownStep(f"no pending sample at step {t}")
            if t in got:
                raise UnknownStep(f"duplicate reward for step {t}")
            if not math.isfinite(r):
                raise ValueError(f"non-finite reward at step {t}")
            got[t] = float(r)
        missing = sorted(set(self._pending) - set(got))
        if missing:
            raise MissingReward(f"no reward for pending steps {missing[:10]}")
        for t in sorted(got):
            for s in self._pending[t]:
                s.fill(t, got[t])
        self._pending.clear()
        t_l = self.grid.points[self.batch]
        self._refit(t_l)
        self.batch += 1
        return self

    def _features(self, x, action):
        return x.reshape(-1)

    def _decide(self, t, x, choice):
        raise NotImplementedError

    def _refit(self, t_l):
        raise NotImplementedError


class _ArmAgent(BatchedAgent):
    """Forced sampling plus two-stage selection over K arms."""

    def __init__(self, config: AgentConfig, K: int, shape: tuple[int, ...], seed: int, grid=None):
        if K < 1:
            raise InvalidConfig("need at least one arm")
        if config.h <= 0:
            raise InvalidConfig("h must be positive")
        super().__init__(config, grid or config.grid(), K, seed)
        self.K = K
        self.shape = tuple(shape)
        self.dim = int(np.prod(shape))
        self.h = config.h
        self.lambda1 = config.lambda1
        self.lambda2 = config.lambda2_0
        self.arms = [ArmSampleSet(self.dim) for _ in range(K)]
        self.forced_estimators = np.zeros((K,) + self.shape)
        self.whole_estimators = np.zeros((K,) + self.shape)
        self._forced_version = [0] * K

    def _decide(self, t, x, choice):
        if choice is not None:
            arm = choice
            return arm, [self.arms[arm].forced, self.arms[arm].whole]
        arm = select_arm_two_stage(x, self)
        return arm, [self.arms[arm].whole]

    def lambda2_at(self, t_l: int) -> float:
        return self.config.lambda2_0 * math.sqrt((math.log(t_l) + math.log(self._penalty_dim())) / t_l)

    def _penalty_dim(self):
        return self.dim

    def _refit(self, t_l):
        self.lambda2 = self.lambda2_at(t_l)
        self.lambda_history.append(self.lambda2)
        for k, arm in enumerate(self.arms):
            if arm.forced.n_filled and arm.forced.version != self._forced_version[k]:
                self.forced_estimators[k] = self._fit(arm.forced, self.lambda1, self.forced_estimators[k])
                self._forced_version[k] = arm.forced.version
            if arm.whole.n_filled:
                self.whole_estimators[k] = self._fit(arm.whole, self.lambda2, self.whole_estimators[k])

    def _fit(self, samples: SampleSet, lam: float, warm):
        raise NotImplementedError


class BatchedSparseAgent(_ArmAgent):
    """LASSO arm estimators on d-dimensional covariates."""

    def __init__(self, config: AgentConfig, K: int, d: int, seed: int, grid=None):
        super().__init__(config, K, (d,), seed, grid)

    def _fit(self, samples, lam, warm):
        G, c, yy, _ = samples.stats()
        kw = {} if self.config.max_iter is None else {"max_iter": self.config.max_iter}
        return lasso_fit_gram(G, c, yy, lam, tol=self.config.tol, beta0=warm, **kw).beta


class BatchedLowRankAgent(_ArmAgent):
    """Nuclear-norm arm estimators on d1 x d2 covariate matrices."""

    def __init__(self, config: AgentConfig, K: int, d1: int, d2: int, seed: int, grid=None):
        super().__init__(config, K, (d1, d2), seed, grid)

    def _penalty_dim(self):
        return self.shape[0] + self.shape[1]

    def _fit(self, samples, lam, warm):
        G, c, yy, _ = samples.stats()
        kw = {} if self.config.max_iter is None else {"max_iter": self.config.max_iter}
        return trace_regression_gram(G, c, yy, self.shape, lam, tol=self.config.tol, theta0=warm, **kw).theta


def greedy_price(x, beta0, beta1, p_min, p_max) -> float:
    """Truncated maximiser of estimated revenue p * (<x,b0> + p <x,b1>)."""
    base = float(x @ beta0)
    slope = float(x @ beta1)
    if slope >= 0.0:
        # revenue is not concave in p; it increases on the feasible interval
        return float(p_max)
    return float(min(max(base / (-2.0 * slope), p_min), p_max))


class BatchedPricingAgent(BatchedAgent):
    """Batched LASSO pricing with two fixed experimental prices.

    Demand is modelled as <x, b0> + p <x, b1>; both halves are estimated
    jointly by one LASSO on the stacked features [x, p x].
    """

    def __init__(self, config: AgentConfig, d: int, seed: int, grid=None):
        if len(config.prices) < 1:
            raise InvalidConfig("need at least one experimental price")
        if not config.p_min <= config.p_max:
            raise InvalidConfig("p_min must not exceed p_max")
        super().__init__(config, grid or config.grid(), len(config.prices), seed)
        self.d = d
        self.samples = SampleSet(2 * d)
        self.beta = np.zeros(2 * d)
        self.lam = config.lambda0

    @property
    def beta0(self):
        return self.beta[: self.d]

    @property
    def beta1(self):
        return self.beta[self.d:]

    def _features(self, x, price):
        return np.concatenate([x, price * x])

    def _decide(self, t, x, choice):
        if choice is not None:
            return float(self.config.prices[choice]), [self.samples]
        return greedy_price(x, self.beta0, self.beta1, self.config.p_min, self.config.p_max), [self.samples]

    def lambda_at(self, t_l: int) -> float:
        return self.config.lambda0 * t_l ** 0.25 * math.sqrt(math.log(t_l) + math.log(self.d))

    def _refit(self, t_l):
        self.lam = self.lambda_at(t_l)
        self.lambda_history.append(self.lam)
        if self.samples.n_filled:
            G, c, yy, _ = self.samples.stats()
            kw = {} if self.config.max_iter is None else {"max_iter": self.config.max_iter}
            self.beta = lasso_fit_gram(G, c, yy, self.lam, tol=self.config.tol, beta0=self.beta, **kw).beta


def make_agent(config: AgentConfig, dims: tuple[int, ...], K: int, seed: int, grid=None) -> BatchedAgent:
    """Build the agent named by ``config.kind`` for covariates of shape ``dims``."""
    if config.kind == "sparse":
        (d,) = dims
        return BatchedSparseAgent(config, K, d, seed, grid)
    if config.kind == "lowrank":
        d1, d2 = dims
        return BatchedLowRankAgent(config, K, d1, d2, seed, grid)
    if config.kind == "pricing":
        (d,) = dims
        return BatchedPricingAgent(config, d, seed, grid)
    raise InvalidConfig(f"unknown agent kind {config.kind!r}")


def sequential_config(config: AgentConfig, T: int | None = None) -> AgentConfig:
    """Same agent settings with one step per batch after the first."""
    T = config.T if T is None else T
    if T < 2:
        raise InvalidConfig("sequential horizon must be at least 2")
    return replace(config, T=T, sequential=True, a=None, L=None)


def make_sequential(config: AgentConfig, T: int, dims: tuple[int, ...], K: int, seed: int) -> BatchedAgent:
    """The fully sequential (one reward per batch) version of ``config``'s agent."""
    return make_agent(sequential_config(config, T), dims, K, seed)
