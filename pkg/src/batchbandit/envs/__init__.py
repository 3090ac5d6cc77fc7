"""Reward-generating environments."""

from batchbandit.envs.base import Episode, Round
from batchbandit.envs.pricing import (
    PricingDataset,
    PricingEnv,
    ReferenceModel,
    pricing_env_new,
    pricing_fit_reference,
    pricing_load,
)
from batchbandit.envs.synthetic import LowRankEnv, SparseEnv, lowrank_env_new, sparse_env_new
from batchbandit.envs.warfarin import WarfarinDataset, WarfarinEnv, warfarin_load, warfarin_reward

__all__ = [
    "Episode",
    "LowRankEnv",
    "PricingDataset",
    "PricingEnv",
    "ReferenceModel",
    "Round",
    "SparseEnv",
    "WarfarinDataset",
    "WarfarinEnv",
    "lowrank_env_new",
    "pricing_env_new",
    "pricing_fit_reference",
    "pricing_load",
    "sparse_env_new",
    "warfarin_load",
    "warfarin_reward",
]
