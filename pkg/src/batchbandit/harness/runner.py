"""Multi-trial simulation driver."""

from __future__ import annotations

import functools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from batchbandit.core.agents import make_agent
from batchbandit.core.grid import BatchGrid
from batchbandit.envs.pricing import pricing_env_new, pricing_load
from batchbandit.envs.synthetic import lowrank_env_new, sparse_env_new
from batchbandit.envs.warfarin import WarfarinEnv, warfarin_load
from batchbandit.errors import ConfigError, DegenerateFit
from batchbandit.harness.config import ExperimentConfig
from batchbandit.harness.fitting import fit_log2_curve

log = logging.getLogger(__name__)

N_CHECKPOINTS = 50
Z95 = 1.96


@dataclass
class RegretTrace:
    instantaneous: np.ndarray
    cumulative: np.ndarray
    actions: np.ndarray  # arm index, or price for pricing runs
    forced: np.ndarray  # bool

    @property
    def T(self):
        return len(self.instantaneous)


@dataclass
class TrialSummary:
    trial: int
    seed: int
    final_regret: float
    checkpoints: list
    regret_at_checkpoints: list
    fraction_incorrect: list | None = None
    revenue_regret: float | None = None
    forced_count: int = 0

    def as_dict(self):
        d = {
            "trial": self.trial,
            "seed": self.seed,
            "final_regret": self.final_regret,
            "forced_count": self.forced_count,
            "checkpoints": self.checkpoints,
            "regret_at_checkpoints": self.regret_at_checkpoints,
        }
        if self.fraction_incorrect is not None:
            d["fraction_incorrect"] = self.fraction_incorrect
        if self.revenue_regret is not None:
            d["revenue_regret"] = self.revenue_regret
        return d


@dataclass
class TrialResult:
    trial: int
    seed: int
    trace: RegretTrace | None
    summary: TrialSummary | None
    error: dict | None = None


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    grid: BatchGrid | None
    trials: list = field(default_factory=list)

    @property
    def ok(self):
        return [r for r in self.trials if r.error is None]

    @property
    def errors(self):
        return [r.error for r in self.trials if r.error is not None]


def log_checkpoints(T: int, n: int = N_CHECKPOINTS) -> list[int]:
    """Up to n distinct log-spaced steps in 1..T, always ending at T."""
    if T < 1:
        return []
    pts = np.unique(np.round(np.logspace(0, math.log10(T), n)).astype(int))
    pts = [int(p) for p in pts if 1 <= p <= T]
    if pts[-1] != T:
        pts.append(T)
    return pts


@functools.lru_cache(maxsize=8)
def _warfarin(path, n_features):
    return warfarin_load(path, n_features=n_features)


@functools.lru_cache(maxsize=8)
def _pricing(path, n_features):
    return pricing_load(path, n_features=n_features)


def build_env(cfg: ExperimentConfig, seed: int):
    e = cfg.env
    if cfg.env_kind == "sparse":
        return sparse_env_new(e["K"], e["d"], e["s0"], e["sigma"], seed)
    if cfg.env_kind == "lowrank":
        return lowrank_env_new(e["K"], e["d"], e["r"], e["sigma"], seed)
    if cfg.env_kind == "warfarin":
        return WarfarinEnv(_warfarin(e["path"], e.get("n_features", 93)))
    if cfg.env_kind == "pricing":
        ds = _pricing(e["path"], e.get("n_features", 21))
        return pricing_env_new(ds, e.get("sigma"))
    raise ConfigError(f"unknown env kind {cfg.env_kind!r}")


def resolve_horizon(cfg: ExperimentConfig) -> ExperimentConfig:
    """Fill in T from the dataset size for data-driven environments."""
    if cfg.agent.T:
        return cfg
    env = build_env(cfg, cfg.base_seed)
    n = env.dataset.n
    return replace(cfg, agent=replace(cfg.agent, T=n))


def default_t_start(grid: BatchGrid | None, T: int) -> int:
    """End of the first batch reaching t >= 100 (or 100 without a grid)."""
    if grid is not None:
        for p in grid.points:
            if p >= 100 and p < T:
                return p
    return 100 if T > 102 else 1


def run_trial(cfg: ExperimentConfig, trial: int) -> TrialResult:
    seed = cfg.base_seed + trial
    try:
        trace = simulate(cfg, seed)
    except Exception as exc:  # reported per trial, never swallowed silently
        log.exception("trial %d failed", trial)
        err = {"trial": trial, "seed": seed, "type": type(exc).__name__, "message": str(exc)}
        return TrialResult(trial, seed, None, None, err)
    return TrialResult(trial, seed, trace, summarize(cfg, trial, seed, trace))


def simulate(cfg: ExperimentConfig, seed: int) -> RegretTrace:
    """Play one trial; rewards of each batch are revealed only at its end."""
    T = cfg.agent.T
    env = build_env(cfg, seed)
    ep = env.episode(T, seed)
    inst = np.zeros(T)
    forced = np.zeros(T, dtype=bool)
    pricing = cfg.env_kind == "pricing"
    actions = np.zeros(T, dtype=float if pricing else int)

    if cfg.agent_kind == "oracle":
        for t in range(1, T + 1):
            rd = ep.round(t)
            a = rd.best_action()
            actions[t - 1] = a
            inst[t - 1] = rd.regret(a)
    else:
        K = ep.n_arms if not pricing else 0
        agent = make_agent(cfg.agent, tuple(ep.context_shape), K, seed)
        for lo, hi in agent.grid.batches():
            rewards = []
            for t in range(lo, hi + 1):
                rd = ep.round(t)
                a = agent.act(t, rd.context)
                actions[t - 1] = a
                forced[t - 1] = agent.last_forced
                inst[t - 1] = rd.regret(a)
                rewards.append((t, rd.reward(a)))
            agent.commit(rewards)
    return RegretTrace(inst, np.cumsum(inst), actions, forced)


def summarize(cfg: ExperimentConfig, trial: int, seed: int, trace: RegretTrace) -> TrialSummary:
    cps = log_checkpoints(trace.T)
    at = [float(trace.cumulative[c - 1]) for c in cps]
    frac = None
    rev = None
    if cfg.env_kind == "warfarin":
        # regret per step is the 0/1 wrong-dose indicator
        frac = [float(trace.cumulative[c - 1] / c) for c in cps]
    if cfg.env_kind == "pricing":
        rev = float(trace.cumulative[-1])
    return TrialSummary(trial, seed, float(trace.cumulative[-1]), cps, at, frac, rev, int(trace.forced.sum()))


def aggregate(traces) -> dict:
    """Per-step mean and 95% normal-approximation band over trials."""
    C = np.array([tr.cumulative for tr in traces])
    n = C.shape[0]
    mean = C.mean(axis=0)
    std = C.std(axis=0, ddof=1) if n > 1 else np.zeros(C.shape[1])
    half = Z95 * std / math.sqrt(n)
    return {"mean": mean, "std": std, "lower": mean - half, "upper": mean + half, "n": n}


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """Run ``cfg.trials`` independent trials; trial i uses seed base_seed + i."""
    cfg = resolve_horizon(cfg)
    grid = None if cfg.agent_kind == "oracle" else cfg.agent.grid()
    trials = range(cfg.trials)
    if jobs > 1 and cfg.trials > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_trial, [cfg] * cfg.trials, trials))
    else:
        results = [run_trial(cfg, i) for i in trials]
    # pool.map preserves submission order, so output does not depend on scheduling
    return ExperimentResult(cfg, grid, results)


def experiment_summary(res: ExperimentResult) -> dict:
    cfg = res.config
    ok = res.ok
    T = cfg.agent.T
    out = {
        "config": cfg.raw,
        "resolved": {
            "T": T,
            "t1": cfg.agent.t1,
            "L": res.grid.L if res.grid else None,
            "a": res.grid.a if res.grid else None,
            "t0": cfg.agent.t0,
            "env_kind": cfg.env_kind,
            "agent_kind": cfg.agent_kind,
        },
        "trials": len(res.trials),
        "completed": len(ok),
        "errors": res.errors,
        "per_trial": [r.summary.as_dict() for r in ok],
        "confidence_interval": "mean +/- 1.96 * sample_std / sqrt(trials)",
        "log_base": "natural",
    }
    if ok:
        agg = aggregate([r.trace for r in ok])
        cps = log_checkpoints(T)
        idx = [c - 1 for c in cps]
        out["aggregate"] = {
            "checkpoints": cps,
            "mean": [float(agg["mean"][i]) for i in idx],
            "lower": [float(agg["lower"][i]) for i in idx],
            "upper": [float(agg["upper"][i]) for i in idx],
            "final_mean": float(agg["mean"][-1]),
        }
        t_start = cfg.t_start or default_t_start(res.grid, T)
        try:
            out["log2_fit"] = fit_log2_curve(agg["mean"], t_start).as_dict()
        except DegenerateFit as exc:
            out["log2_fit"] = {"error": str(exc)}
    return out
