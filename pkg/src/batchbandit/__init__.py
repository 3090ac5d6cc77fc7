"""Batched high-dimensional contextual bandits: solvers, agents, environments, harness."""

__version__ = "0.1.0"
