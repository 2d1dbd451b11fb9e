from __future__ import annotations

import math

import numpy as np

from src.envs.base import Environment, StepResult, clip_action

POWER = 0.0015
GRAVITY = 0.0025
MAX_SPEED = 0.07
MIN_POS = -1.2
MAX_POS = 0.6
GOAL_POS = 0.45
ACTION_COST = 0.01
EPISODE_LIMIT = 999


def mountaincar_sparse_step(
    state: tuple[float, float],
    action: np.ndarray | float,
) -> tuple[tuple[float, float], StepResult]:
    p, v = float(state[0]), float(state[1])
    a = float(clip_action(action, 1)[0])
    v_next = v + POWER * a - GRAVITY * math.cos(3.0 * p)
    v_next = min(MAX_SPEED, max(-MAX_SPEED, v_next))
    p_next = min(MAX_POS, max(MIN_POS, p + v_next))
    goal = p_next >= GOAL_POS
    reward = (1.0 if goal else 0.0) - ACTION_COST * a * a
    obs = np.array([p_next, v_next], dtype=np.float64)
    return (p_next, v_next), StepResult(next_obs=obs, reward=reward, done=goal, truncated=False)


class MountainCarSparse(Environment):
    name = "mountaincar-sparse"
    obs_dim = 2
    act_dim = 1
    max_steps = EPISODE_LIMIT

    def __init__(self) -> None:
        super().__init__()
        self.state = (-0.5, 0.0)

    def _reset_state(self, rng: np.random.Generator) -> None:
        self.state = (float(rng.uniform(-0.6, -0.4)), 0.0)

    def _advance(self, action: np.ndarray) -> tuple[np.ndarray, float, bool]:
        self.state, res = mountaincar_sparse_step(self.state, action)
        return res.next_obs, res.reward, res.done

    def observe(self) -> np.ndarray:
        return np.array(self.state, dtype=np.float64)

    def obs_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array([MIN_POS, -MAX_SPEED]), np.array([MAX_POS, MAX_SPEED])
