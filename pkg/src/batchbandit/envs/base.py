from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Round:
    """One step of a finite-armed environment.

    ``means`` are the expected rewards of every arm; ``noise`` is the single
    noise draw of this step, shared by all arms.
    """

    t: int
    context: np.ndarray
    means: np.ndarray
    noise: float = 0.0

    def reward(self, arm: int) -> float:
        return float(self.means[arm] + self.noise)

    def regret(self, arm: int) -> float:
        return float(self.means.max() - self.means[arm])

    def best_action(self) -> int:
        return int(np.argmax(self.means))


class Episode:
    """Pre-drawn sequence of rounds for one trial; ``round(t)`` is 1-based."""

    T: int

    def round(self, t: int) -> Round:
        raise NotImplementedError

    @property
    def context_shape(self) -> tuple[int, ...]:
        raise NotImplementedError

    @property
    def n_arms(self) -> int:
        raise NotImplementedError
