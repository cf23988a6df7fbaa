"""Uniform experience replay with a fixed-capacity ring buffer."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Experience:
    """One completed transition (continuing task: no terminal flag)."""

    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray


class ReplayBuffer:
    """Ring of experiences; overwrites the oldest once capacity is reached.

    Storage is columnar (preallocated arrays) so minibatch gathers are single
    fancy-indexing operations.
    """

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._states = None
        self._actions = np.empty(capacity, dtype=np.int64)
        self._rewards = np.empty(capacity, dtype=np.float64)
        self._next_states = None
        self._size = 0
        self._cursor = 0

    def __len__(self) -> int:
        return self._size

    def push(self, exp: Experience) -> None:
        if self._states is None:
            dim = len(exp.state)
            self._states = np.empty((self.capacity, dim))
            self._next_states = np.empty((self.capacity, dim))
        i = self._cursor
        self._states[i] = exp.state
        self._actions[i] = exp.action
        self._rewards[i] = exp.reward
        self._next_states[i] = exp.next_state
        self._cursor = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator):
        """Uniform sample with replacement: (states, actions, rewards, next_states)."""
        if self._size == 0:
            raise ValueError("cannot sample from an empty buffer")
        idx = rng.integers(0, self._size, size=batch_size)
        return (self._states[idx], self._actions[idx],
                self._rewards[idx], self._next_states[idx])

    def peek(self, i: int) -> Experience:
        """The i-th oldest experience currently held (0 = oldest)."""
        if not 0 <= i < self._size:
            raise IndexError(i)
        if self._size < self.capacity:
            pos = i
        else:
            pos = (self._cursor + i) % self.capacity
        return Experience(state=self._states[pos].copy(),
                          action=int(self._actions[pos]),
                          reward=float(self._rewards[pos]),
                          next_state=self._next_states[pos].copy())
