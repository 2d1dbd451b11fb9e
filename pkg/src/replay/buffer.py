from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Transition:
    s: np.ndarray
    a: np.ndarray
    r: float
    s_next: np.ndarray
    done: bool


@dataclass(frozen=True)
class Minibatch:
    s: np.ndarray
    a: np.ndarray
    r: np.ndarray
    s_next: np.ndarray
    done: np.ndarray
    indices: np.ndarray

    def __len__(self) -> int:
        return int(self.r.shape[0])


class ReplayBuffer:
    """Fixed-capacity ring of transitions stored column-wise."""

    def __init__(self, capacity: int, obs_dim: int, act_dim: int):
        if capacity < 1:
            raise ValueError("replay capacity must be >= 1")
        self.capacity = int(capacity)
        self.obs_dim = int(obs_dim)
        self.act_dim = int(act_dim)
        self.s = np.zeros((self.capacity, self.obs_dim))
        self.a = np.zeros((self.capacity, self.act_dim))
        self.r = np.zeros(self.capacity)
        self.s_next = np.zeros((self.capacity, self.obs_dim))
        self.done = np.zeros(self.capacity)
        self.write_index = 0
        self.size = 0

    def __len__(self) -> int:
        return self.size

    def push(self, t: Transition) -> None:
        s = np.asarray(t.s, dtype=np.float64).reshape(-1)
        a = np.asarray(t.a, dtype=np.float64).reshape(-1)
        s_next = np.asarray(t.s_next, dtype=np.float64).reshape(-1)
        if s.shape != (self.obs_dim,) or s_next.shape != (self.obs_dim,) or a.shape != (self.act_dim,):
            raise ValueError(
                f"transition shapes s={s.shape} a={a.shape} s'={s_next.shape} "
                f"do not match buffer ({self.obs_dim}, {self.act_dim})"
            )
        i = self.write_index
        self.s[i] = s
        self.a[i] = a
        self.r[i] = float(t.r)
        self.s_next[i] = s_next
        self.done[i] = 1.0 if t.done else 0.0
        self.write_index = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, n: int, rng: np.random.Generator) -> Minibatch:
        if self.size < 1:
            raise ValueError("cannot sample from an empty replay buffer")
        idx = rng.integers(0, self.size, size=int(n))
        return Minibatch(
            s=self.s[idx],
            a=self.a[idx],
            r=self.r[idx],
            s_next=self.s_next[idx],
            done=self.done[idx],
            indices=idx,
        )
