"""FIFO experience replay."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .env import EpisodeState

__all__ = ["Transition", "ReplayBuffer"]


@dataclass(eq=False)
class Transition:
    state: EpisodeState
    action: int
    reward: float
    next_state: EpisodeState
    terminal: bool


class ReplayBuffer:
    """Bounded ring buffer; once full, each push evicts the oldest record."""

    def __init__(self, capacity: int = 10**6):
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._data: list[Transition] = []
        self._pos = 0

    def push(self, t: Transition) -> None:
        if len(self._data) < self.capacity:
            self._data.append(t)
        else:
            self._data[self._pos] = t
            self._pos = (self._pos + 1) % self.capacity

    def __len__(self) -> int:
        return len(self._data)

    def __iter__(self):
        # oldest-first
        if len(self._data) < self.capacity:
            return iter(self._data)
        return iter(self._data[self._pos:] + self._data[: self._pos])

    def sample(self, rng: np.random.Generator, size: int) -> list[Transition]:
        """Uniform sample with replacement."""
        if not self._data:
            raise ValueError("cannot sample from an empty buffer")
        idx = rng.integers(len(self._data), size=size)
        return [self._data[i] for i in idx]
