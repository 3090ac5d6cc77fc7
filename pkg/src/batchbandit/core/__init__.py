"""Batch grid, forced sampling and the batched agents."""

from batchbandit.core.agents import (
    AgentConfig,
    BatchedAgent,
    BatchedLowRankAgent,
    BatchedPricingAgent,
    BatchedSparseAgent,
    greedy_price,
    make_agent,
    make_sequential,
    sequential_config,
)
from batchbandit.core.grid import BatchGrid, build_grid, sequential_grid, solve_a_for_batches
from batchbandit.core.sampling import (
    ArmSampleSet,
    ForcedSampler,
    SampleSet,
    forced_draw,
    screening_set,
    select_arm_two_stage,
)

__all__ = [
    "AgentConfig",
    "ArmSampleSet",
    "BatchGrid",
    "BatchedAgent",
    "BatchedLowRankAgent",
    "BatchedPricingAgent",
    "BatchedSparseAgent",
    "ForcedSampler",
    "SampleSet",
    "build_grid",
    "forced_draw",
    "greedy_price",
    "make_agent",
    "make_sequential",
    "screening_set",
    "select_arm_two_stage",
    "sequential_config",
    "sequential_grid",
    "solve_a_for_batches",
]
