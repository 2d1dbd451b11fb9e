from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class StepResult:
    next_obs: np.ndarray
    reward: float
    done: bool
    truncated: bool


@dataclass(frozen=True)
class DelayedRewardConfig:
    positional_delay_c: float = 1.0
    action_cost_w_a: float = 0.5
    health_reward_H: float = 0.0
    episode_limit: int = 200

    def __post_init__(self) -> None:
        if self.episode_limit <= 0:
            raise ValueError("episode_limit must be positive")
        if self.action_cost_w_a < 0:
            raise ValueError("action_cost_w_a must be non-negative")


def clip_action(action: np.ndarray | float, dim: int) -> np.ndarray:
    a = np.asarray(action, dtype=np.float64).reshape(-1)
    if a.shape != (dim,):
        raise ValueError(f"action shape {a.shape} does not match action dim {dim}")
    return np.clip(a, -1.0, 1.0)


class Environment(ABC):
    name: str = ""
    obs_dim: int = 0
    act_dim: int = 1
    max_steps: int = 1

    def __init__(self) -> None:
        self._t = 0
        self._needs_reset = True

    @abstractmethod
    def _reset_state(self, rng: np.random.Generator) -> None:
        raise NotImplementedError

    @abstractmethod
    def _advance(self, action: np.ndarray) -> tuple[np.ndarray, float, bool]:
        """Apply one step; returns (next_obs, reward, terminated)."""
        raise NotImplementedError

    @abstractmethod
    def observe(self) -> np.ndarray:
        raise NotImplementedError

    @abstractmethod
    def obs_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        self._t = 0
        self._needs_reset = False
        self._reset_state(rng)
        return self.observe()

    def step(self, action: np.ndarray | float) -> StepResult:
        if self._needs_reset:
            raise RuntimeError(f"{self.name}: step() called before reset() or after episode end")
        a = clip_action(action, self.act_dim)
        next_obs, reward, done = self._advance(a)
        self._t += 1
        truncated = (not done) and self._t >= self.max_steps
        if done or truncated:
            self._needs_reset = True
        return StepResult(next_obs=next_obs, reward=float(reward), done=bool(done), truncated=bool(truncated))
