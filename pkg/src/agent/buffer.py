"""Replay buffer of risk-labelled transitions."""

from dataclasses import dataclass

import numpy as np

from src.exceptions import BufferEmptyError, ConfigurationError, RiskDomainError


@dataclass(frozen=True)
class Transition:
    """``(s, a, R, r_b, delta, s', done)``; states are observation vectors."""

    s: np.ndarray
    a: np.ndarray
    reward: float
    r_b: float
    delta: float
    s_next: np.ndarray
    done: bool

    def __post_init__(self):
        """Check the probability-valued fields."""
        if not 0.0 <= self.r_b <= 1.0:
            raise RiskDomainError("r_b {} outside [0, 1]".format(self.r_b))
        if not 0.0 <= self.delta <= 1.0:
            raise RiskDomainError("delta {} outside [0, 1]".format(self.delta))


class ReplayBuffer:
    """Fixed-capacity ring buffer with uniform sampling with replacement."""

    def __init__(self, capacity, obs_dim, action_dim):
        """Preallocate storage."""
        if capacity < 1:
            raise ConfigurationError("Replay buffer capacity must be >= 1")
        self.capacity = int(capacity)
        self.cursor = 0
        self.size = 0
        self.s = np.zeros((self.capacity, obs_dim))
        self.a = np.zeros((self.capacity, action_dim))
        self.reward = np.zeros(self.capacity)
        self.r_b = np.zeros(self.capacity)
        self.delta = np.zeros(self.capacity)
        self.s_next = np.zeros((self.capacity, obs_dim))
        self.done = np.zeros(self.capacity)

    def __len__(self):
        """Number of stored transitions."""
        return self.size

    def push(self, transition):
        """Store a transition, overwriting the oldest one when full."""
        i = self.cursor
        self.s[i] = transition.s
        self.a[i] = transition.a
        self.reward[i] = transition.reward
        self.r_b[i] = transition.r_b
        self.delta[i] = transition.delta
        self.s_next[i] = transition.s_next
        self.done[i] = float(transition.done)
        self.cursor = (self.cursor + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample_indices(self, n, rng):
        """Uniform i.i.d. indices into the stored items."""
        if self.size == 0:
            raise BufferEmptyError("Cannot sample from an empty replay buffer")
        return rng.integers(0, self.size, size=n)

    def sample(self, n, rng):
        """Batch of ``n`` transitions as a dict of arrays."""
        idx = self.sample_indices(n, rng)
        return {"s": self.s[idx], "a": self.a[idx], "reward": self.reward[idx],
                "r_b": self.r_b[idx], "delta": self.delta[idx], "s_next": self.s_next[idx],
                "done": self.done[idx]}

    def transition(self, index):
        """Transition at a storage slot."""
        return Transition(self.s[index].copy(), self.a[index].copy(), float(self.reward[index]),
                          float(self.r_b[index]), float(self.delta[index]),
                          self.s_next[index].copy(), bool(self.done[index]))


def buffer_push(buffer, transition):
    """Append a transition to ``buffer``."""
    buffer.push(transition)


def buffer_sample(buffer, n, rng):
    """List of ``n`` transitions sampled uniformly with replacement."""
    return [buffer.transition(i) for i in buffer.sample_indices(n, rng)]
